#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgnet/error.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparqlml/ast.hpp"

namespace kgnet::dataset {

using NodeId = std::uint32_t;

/// One node type. `nodes[id]` is the node with local id `id`; ids are
/// contiguous from 0 and follow term order.
struct NodeTable {
  std::string name;      // file-safe table name
  std::string type_iri;  // empty for synthetic types (Class, Untyped, Literal_*)
  std::vector<rdf::Term> nodes;

  bool operator==(const NodeTable&) const = default;
};

struct Edge {
  std::string src_type;
  NodeId src_id = 0;
  std::string dst_type;
  NodeId dst_id = 0;

  auto operator<=>(const Edge&) const = default;
  bool operator==(const Edge&) const = default;
};

/// All edges of one predicate, sorted.
struct EdgeTable {
  std::string name;
  std::string predicate;
  std::vector<Edge> edges;

  bool operator==(const EdgeTable&) const = default;
};

/// NC: (target id, label id). LP: (source id, destination id) of a link.
struct LabelRow {
  NodeId target_id = 0;
  NodeId label_id = 0;

  auto operator<=>(const LabelRow&) const = default;
  bool operator==(const LabelRow&) const = default;
};

/// NC and NodeSimilarity split target ids; LP splits label-row indices.
struct Splits {
  std::vector<NodeId> train;
  std::vector<NodeId> valid;
  std::vector<NodeId> test;

  std::size_t size() const { return train.size() + valid.size() + test.size(); }
  bool operator==(const Splits&) const = default;
};

struct DatasetStats {
  std::map<std::string, std::uint64_t> n_nodes;  // per node table
  std::map<std::string, std::uint64_t> n_edges;  // per edge table
  std::uint64_t n_node_types = 0;
  std::uint64_t n_edge_types = 0;
  std::uint64_t n_labels = 0;  // NC: label classes; LP: link rows
  std::uint64_t total_triples = 0;

  std::uint64_t total_nodes() const {
    std::uint64_t n = 0;
    for (const auto& [k, v] : n_nodes) n += v;
    return n;
  }
  std::uint64_t total_edges() const {
    std::uint64_t n = 0;
    for (const auto& [k, v] : n_edges) n += v;
    return n;
  }
  bool operator==(const DatasetStats&) const = default;
};

inline nlohmann::json to_json(const DatasetStats& s) {
  return {{"n_nodes", s.n_nodes},           {"n_edges", s.n_edges},
          {"n_node_types", s.n_node_types}, {"n_edge_types", s.n_edge_types},
          {"n_labels", s.n_labels},         {"total_triples", s.total_triples}};
}

inline DatasetStats stats_from_json(const nlohmann::json& j) {
  DatasetStats s;
  s.n_nodes = j.at("n_nodes").get<std::map<std::string, std::uint64_t>>();
  s.n_edges = j.at("n_edges").get<std::map<std::string, std::uint64_t>>();
  s.n_node_types = j.at("n_node_types").get<std::uint64_t>();
  s.n_edge_types = j.at("n_edge_types").get<std::uint64_t>();
  s.n_labels = j.at("n_labels").get<std::uint64_t>();
  s.total_triples = j.at("total_triples").get<std::uint64_t>();
  return s;
}

enum class LabelKind { None, NodeClass, Link };

struct SplitInfo {
  std::string strategy = "random";
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::string> community_edge_type;

  bool operator==(const SplitInfo&) const = default;
};

struct MultiTyped {
  std::string node;  // N-Triples spelling
  std::vector<std::string> types;
  std::string chosen;

  bool operator==(const MultiTyped&) const = default;
};

/// ID-encoded, split dataset ready for a trainer.
struct DatasetPackage {
  static constexpr int kFormatVersion = 1;

  int version = kFormatVersion;
  nlohmann::json task;           // TrainGML spec in strict JSON form
  std::string kg_digest;         // sha256 of the sorted canonical N-Triples of KG'
  std::string target_table;      // NC/NS: target type; LP: source type
  std::string destination_table;  // LP only
  LabelKind label_kind = LabelKind::None;
  std::vector<NodeTable> node_tables;  // sorted by name
  std::vector<EdgeTable> relations;    // sorted by name; never empty tables
  std::vector<LabelRow> labels;        // sorted
  std::vector<rdf::Term> label_dict;   // NC: label terms by id; LP: destination nodes
  Splits splits;
  SplitInfo split_info;
  DatasetStats stats;
  std::vector<MultiTyped> multi_typed;
  std::vector<std::string> warnings;

  const NodeTable& table(std::string_view name) const {
    for (const auto& t : node_tables) {
      if (t.name == name) return t;
    }
    throw UserError("dataset has no node type '" + std::string(name) + "'");
  }
  const NodeTable* find_table(std::string_view name) const {
    for (const auto& t : node_tables) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }

  bool operator==(const DatasetPackage&) const = default;
};

inline std::string_view to_string(LabelKind k) {
  switch (k) {
    case LabelKind::None: return "none";
    case LabelKind::NodeClass: return "node";
    case LabelKind::Link: return "link";
  }
  return "none";
}

inline LabelKind label_kind_from(std::string_view s) {
  if (s == "node") return LabelKind::NodeClass;
  if (s == "link") return LabelKind::Link;
  if (s == "none") return LabelKind::None;
  throw IoError("dataset manifest: unknown label kind '" + std::string(s) + "'");
}

/// Statistics recomputed from tables and relations.
inline DatasetStats compute_stats(const DatasetPackage& pkg) {
  DatasetStats s;
  for (const auto& t : pkg.node_tables) s.n_nodes[t.name] = t.nodes.size();
  for (const auto& r : pkg.relations) s.n_edges[r.name] = r.edges.size();
  s.n_node_types = pkg.node_tables.size();
  s.n_edge_types = pkg.relations.size();
  s.n_labels = pkg.label_kind == LabelKind::NodeClass ? pkg.label_dict.size()
               : pkg.label_kind == LabelKind::Link    ? pkg.labels.size()
                                                      : 0;
  s.total_triples = s.total_edges();
  return s;
}

/// Triples represented by the node tables and relations.
inline std::vector<rdf::Triple> decode_triples(const DatasetPackage& pkg) {
  std::map<std::string, const NodeTable*> tables;
  for (const auto& t : pkg.node_tables) tables[t.name] = &t;
  auto node = [&](const std::string& type, NodeId id) -> const rdf::Term& {
    auto it = tables.find(type);
    if (it == tables.end() || id >= it->second->nodes.size()) {
      throw IoError("dataset: edge references missing node " + type + "#" + std::to_string(id));
    }
    return it->second->nodes[id];
  };
  std::vector<rdf::Triple> out;
  for (const auto& r : pkg.relations) {
    const rdf::Term p = rdf::Term::iri(r.predicate);
    for (const auto& e : r.edges) out.push_back({node(e.src_type, e.src_id), p, node(e.dst_type, e.dst_id)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kgnet::dataset
