#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgnet/dataset/package.hpp"
#include "kgnet/dataset/splits.hpp"
#include "kgnet/error.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/sparqlml/train_spec.hpp"
#include "kgnet/util/hash.hpp"

namespace kgnet::dataset {

struct TransformOptions {
  std::string split_strategy = "random";  // "random" or "community"
  SplitRatios ratios;
  std::uint64_t seed = 0;
  std::optional<std::string> community_edge_type;
  bool convert_literals = true;  // false drops literal-valued triples
  bool allow_untyped = true;     // false rejects IRIs without rdf:type
};

/// sha256 of the sorted, duplicate-free canonical N-Triples of `triples`.
inline std::string kg_digest(std::vector<rdf::Triple> triples) {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  util::Sha256 h;
  for (const auto& t : triples) h.update(rdf::to_ntriples_line(t));
  return h.hex();
}

inline constexpr std::string_view kClassTable = "Class";
inline constexpr std::string_view kUntypedTable = "Untyped";

namespace detail {

inline std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    out += (std::isalnum(u) || c == '_' || c == '-') ? c : '_';
  }
  return out.empty() ? std::string("T") : out;
}

inline std::string literal_table(const rdf::Term& lit) {
  if (!lit.lang().empty()) return "Literal_langString";
  if (lit.datatype().empty()) return "Literal_string";
  return "Literal_" + sanitize(rdf::local_name(lit.datatype()));
}

/// File-safe, unique names for IRIs. Names that clash with each other or with
/// `reserved` get an 8-hex digest suffix.
inline std::map<std::string, std::string> assign_names(const std::set<std::string>& iris,
                                                       const std::set<std::string>& reserved) {
  std::map<std::string, std::vector<std::string>> by_base;
  for (const auto& iri : iris) by_base[sanitize(rdf::local_name(iri))].push_back(iri);
  std::map<std::string, std::string> out;
  for (const auto& [base, members] : by_base) {
    const bool clash = members.size() > 1 || reserved.contains(base) || base.starts_with("Literal_");
    for (const auto& iri : members) {
      out[iri] = clash ? base + "_" + util::sha256_hex(iri).substr(0, 8) : base;
    }
  }
  return out;
}

}  // namespace detail

/// Encodes KG' into a DatasetPackage for `task`.
inline DatasetPackage transform(const std::vector<rdf::Triple>& kg_prime, const sparqlml::TrainGmlSpec& task,
                                const TransformOptions& opt = {}) {
  using sparqlml::TaskType;
  if (kg_prime.empty()) throw UserError("KG' is empty; nothing to transform");
  opt.ratios.validate();

  std::vector<rdf::Triple> triples(kg_prime);
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

  DatasetPackage pkg;
  pkg.task = sparqlml::to_json(task);
  pkg.kg_digest = kg_digest(triples);
  pkg.split_info = {opt.split_strategy, opt.ratios.train, opt.ratios.valid, opt.ratios.test, opt.seed,
                    opt.community_edge_type};

  // Node typing.
  const rdf::Term type_pred = rdf::rdf_type();
  std::map<rdf::Term, std::vector<std::string>> types;
  std::set<rdf::Term> class_nodes;
  for (const auto& t : triples) {
    if (t.predicate == type_pred && t.object.is_iri()) {
      types[t.subject].push_back(t.object.value());
      class_nodes.insert(t.object);
    }
  }
  std::vector<std::string> preferred{task.target_node_type};
  if (task.source_node_type) preferred.push_back(*task.source_node_type);
  if (task.destination_node_type) preferred.push_back(*task.destination_node_type);

  std::set<std::string> chosen_iris;
  std::map<rdf::Term, std::string> chosen;  // resource -> type IRI
  for (auto& [node, ts] : types) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::string pick = ts.front();
    for (const auto& p : preferred) {
      if (std::binary_search(ts.begin(), ts.end(), p)) {
        pick = p;
        break;
      }
    }
    if (ts.size() > 1) pkg.multi_typed.push_back({node.to_string(), ts, pick});
    chosen[node] = pick;
    chosen_iris.insert(pick);
  }
  const auto names = detail::assign_names(
      chosen_iris, {std::string(kClassTable), std::string(kUntypedTable)});
  auto table_of = [&](const rdf::Term& n) -> std::string {
    if (n.is_literal()) return detail::literal_table(n);
    if (auto it = chosen.find(n); it != chosen.end()) return names.at(it->second);
    if (class_nodes.contains(n)) return std::string(kClassTable);
    return std::string(kUntypedTable);
  };

  auto has_type_table = [&](const std::string& iri) { return chosen_iris.contains(iri); };
  if (!has_type_table(task.target_node_type)) {
    throw UserError("target type <" + task.target_node_type + "> is absent from KG'");
  }
  pkg.target_table = names.at(task.target_node_type);
  if (task.task_type == TaskType::LinkPredictor) {
    if (!task.destination_node_type || !has_type_table(*task.destination_node_type)) {
      throw UserError("destination type <" + task.destination_node_type.value_or("") +
                      "> is absent from KG'");
    }
    pkg.destination_table = names.at(*task.destination_node_type);
  }

  // Label edges and literal handling.
  std::vector<const rdf::Triple*> kept;
  std::vector<const rdf::Triple*> label_triples;
  std::size_t dropped_literals = 0;
  const std::optional<rdf::Term> label_pred =
      task.task_type == TaskType::NodeClassifier ? std::optional(rdf::Term::iri(*task.label_predicate))
                                                 : std::nullopt;
  for (const auto& t : triples) {
    if (label_pred && t.predicate == *label_pred) {
      label_triples.push_back(&t);
      continue;
    }
    if (t.object.is_literal() && !opt.convert_literals) {
      ++dropped_literals;
      continue;
    }
    if (!opt.allow_untyped) {
      for (const rdf::Term* n : {&t.subject, &t.object}) {
        if (!n->is_literal() && table_of(*n) == kUntypedTable) {
          throw UserError("node " + n->to_string() + " has no rdf:type and untyped nodes are disabled");
        }
      }
    }
    kept.push_back(&t);
  }
  if (dropped_literals > 0) {
    pkg.warnings.push_back("dropped " + std::to_string(dropped_literals) + " literal-valued triples");
  }
  if (label_pred && label_triples.empty()) {
    throw UserError("label predicate <" + label_pred->value() + "> is absent from KG'");
  }

  // Node tables over the kept triples.
  std::map<std::string, std::set<rdf::Term>> members;
  for (const auto* t : kept) {
    members[table_of(t->subject)].insert(t->subject);
    members[table_of(t->object)].insert(t->object);
  }
  std::map<std::string, std::string> table_type_iri;
  for (const auto& [iri, name] : names) table_type_iri[name] = iri;
  std::map<std::string, std::unordered_map<rdf::Term, NodeId, rdf::TermHash>> ids;
  for (auto& [name, nodes] : members) {
    NodeTable nt;
    nt.name = name;
    if (auto it = table_type_iri.find(name); it != table_type_iri.end()) nt.type_iri = it->second;
    nt.nodes.assign(nodes.begin(), nodes.end());
    auto& idx = ids[name];
    for (NodeId i = 0; i < nt.nodes.size(); ++i) idx.emplace(nt.nodes[i], i);
    pkg.node_tables.push_back(std::move(nt));
  }
  auto id_of = [&](const rdf::Term& n) { return ids.at(table_of(n)).at(n); };
  const NodeTable* target = pkg.find_table(pkg.target_table);
  if (target == nullptr) throw UserError("target type <" + task.target_node_type + "> has no nodes in KG'");

  // Labels and the ids to split.
  std::vector<NodeId> split_ids;
  std::vector<rdf::Term> split_nodes;  // node whose community decides the group
  std::set<const rdf::Triple*> held_out;
  if (task.task_type == TaskType::NodeClassifier) {
    pkg.label_kind = LabelKind::NodeClass;
    std::map<rdf::Term, rdf::Term> label_of;
    std::set<rdf::Term> multi;
    for (const auto* t : label_triples) {
      if (table_of(t->subject) != pkg.target_table || !ids.at(pkg.target_table).contains(t->subject)) continue;
      auto [it, fresh] = label_of.emplace(t->subject, t->object);
      if (!fresh) {
        multi.insert(t->subject);
        if (t->object < it->second) it->second = t->object;
      }
    }
    if (!multi.empty()) {
      pkg.warnings.push_back(std::to_string(multi.size()) +
                             " targets carry several labels; the smallest label was kept");
    }
    std::set<rdf::Term> dict;
    for (const auto& [n, l] : label_of) dict.insert(l);
    pkg.label_dict.assign(dict.begin(), dict.end());
    for (const auto& [n, l] : label_of) {
      const NodeId lid = static_cast<NodeId>(
          std::lower_bound(pkg.label_dict.begin(), pkg.label_dict.end(), l) - pkg.label_dict.begin());
      pkg.labels.push_back({id_of(n), lid});
    }
    std::sort(pkg.labels.begin(), pkg.labels.end());
    for (const auto& row : pkg.labels) {
      split_ids.push_back(row.target_id);
      split_nodes.push_back(target->nodes[row.target_id]);
    }
    if (pkg.labels.empty()) throw UserError("no target node carries the label predicate");
  } else if (task.task_type == TaskType::LinkPredictor) {
    pkg.label_kind = LabelKind::Link;
    const NodeTable* dst = pkg.find_table(pkg.destination_table);
    if (dst == nullptr) throw UserError("destination type has no nodes in KG'");
    pkg.label_dict = dst->nodes;
    const std::optional<rdf::Term> link_pred =
        task.link_predicate ? std::optional(rdf::Term::iri(*task.link_predicate)) : std::nullopt;
    std::vector<std::pair<LabelRow, const rdf::Triple*>> links;
    for (const auto* t : kept) {
      if (t->predicate == type_pred || t->object.is_literal()) continue;
      if (link_pred && t->predicate != *link_pred) continue;
      if (table_of(t->subject) != pkg.target_table || table_of(t->object) != pkg.destination_table) continue;
      links.push_back({{id_of(t->subject), id_of(t->object)}, t});
    }
    std::sort(links.begin(), links.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : *a.second < *b.second;
    });
    if (links.empty()) throw UserError("no link between the source and destination types in KG'");
    // One label row per (source, destination) pair, however many predicates link them.
    for (const auto& [row, t] : links) {
      if (!pkg.labels.empty() && pkg.labels.back() == row) continue;
      split_ids.push_back(static_cast<NodeId>(pkg.labels.size()));
      split_nodes.push_back(target->nodes[row.target_id]);
      pkg.labels.push_back(row);
    }
    // Candidate links; the non-training ones leave the relations after the split.
    for (const auto& l : links) held_out.insert(l.second);
  } else {
    pkg.label_kind = LabelKind::None;
    for (NodeId i = 0; i < target->nodes.size(); ++i) {
      split_ids.push_back(i);
      split_nodes.push_back(target->nodes[i]);
    }
  }

  // Splits.
  SplitResult sr;
  if (opt.split_strategy == "random") {
    sr = split_random(split_ids, opt.ratios, opt.seed);
  } else if (opt.split_strategy == "community") {
    if (!opt.community_edge_type) throw UserError("community split requires a community edge type");
    const rdf::Term cp = rdf::Term::iri(*opt.community_edge_type);
    std::map<rdf::Term, rdf::Term> community;
    bool present = false;
    for (const auto& t : triples) {
      if (t.predicate != cp) continue;
      present = true;
      auto [it, fresh] = community.emplace(t.subject, t.object);
      if (!fresh && t.object < it->second) it->second = t.object;
    }
    if (!present) {
      throw UserError("community edge type <" + *opt.community_edge_type +
                      "> does not occur in KG'; use the random split instead");
    }
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < split_nodes.size(); ++i) {
      auto it = community.find(split_nodes[i]);
      keys.push_back(it != community.end() ? "c" + it->second.to_string()
                                           : "s" + split_nodes[i].to_string() + "#" + std::to_string(i));
    }
    // split_groups keys each id; LP ids are row indices, unique by construction.
    sr = split_groups(split_ids, keys, opt.ratios);
  } else {
    throw UserError("unknown split strategy '" + opt.split_strategy + "' (expected random or community)");
  }
  pkg.splits = std::move(sr.splits);
  pkg.warnings.insert(pkg.warnings.end(), sr.warnings.begin(), sr.warnings.end());

  // LP: only training links stay in the relations.
  if (pkg.label_kind == LabelKind::Link) {
    std::map<LabelRow, std::vector<const rdf::Triple*>> by_row;
    for (const auto* t : held_out) by_row[{id_of(t->subject), id_of(t->object)}].push_back(t);
    std::set<LabelRow> train_rows;
    for (NodeId i : pkg.splits.train) train_rows.insert(pkg.labels[i]);
    std::set<const rdf::Triple*> remove;
    for (const auto& [row, ts] : by_row) {
      if (train_rows.contains(row)) continue;
      remove.insert(ts.begin(), ts.end());
    }
    held_out = std::move(remove);
  }

  // Relations.
  std::set<std::string> predicates;
  for (const auto* t : kept) {
    if (!held_out.contains(t)) predicates.insert(t->predicate.value());
  }
  const auto rel_names = detail::assign_names(predicates, {});
  std::map<std::string, EdgeTable> rels;
  for (const auto* t : kept) {
    if (held_out.contains(t)) continue;
    auto& r = rels[rel_names.at(t->predicate.value())];
    r.predicate = t->predicate.value();
    r.edges.push_back({table_of(t->subject), id_of(t->subject), table_of(t->object), id_of(t->object)});
  }
  for (auto& [name, r] : rels) {
    r.name = name;
    std::sort(r.edges.begin(), r.edges.end());
    pkg.relations.push_back(std::move(r));
  }
  pkg.stats = compute_stats(pkg);
  return pkg;
}

}  // namespace kgnet::dataset
