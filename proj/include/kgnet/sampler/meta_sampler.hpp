#pragma once

#include <set>
#include <string>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/rdf/backend.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparqlml/ast.hpp"

namespace kgnet::sampler {

/// Scope of a task-specific subgraph: direction d (1 outgoing, 2 both) and
/// hop count h around nodes typed `target_node_type`.
struct SamplingSpec {
  std::string target_node_type;
  int d = 1;
  int h = 1;

  void validate() const {
    if (!rdf::is_absolute_iri(target_node_type)) {
      throw UserError("sampling target type must be an absolute IRI: <" + target_node_type + ">");
    }
    if ((d != 1 && d != 2) || (h != 1 && h != 2)) {
      throw UserError("sampling scope must have d in {1,2} and h in {1,2}, got d" +
                      std::to_string(d) + "h" + std::to_string(h));
    }
  }
  bool operator==(const SamplingSpec&) const = default;
};

/// d1h1 for node classification, d2h1 for link prediction. NodeSimilarity
/// falls back to d1h1 (see is_extension_default).
inline SamplingSpec default_spec(sparqlml::TaskType task, std::string target_node_type) {
  SamplingSpec s{std::move(target_node_type), 1, 1};
  if (task == sparqlml::TaskType::LinkPredictor) s.d = 2;
  return s;
}

inline bool is_extension_default(sparqlml::TaskType task) {
  return task == sparqlml::TaskType::NodeSimilarity;
}

/// CONSTRUCT query for the scope. WHERE is the UNION of the hop blocks:
/// outgoing hop 1, incoming hop 1 (d=2), outgoing hop 2 chained through
/// hop-1 objects (h=2), incoming hop 2 chained through hop-1 subjects (d=2, h=2).
inline std::string build_bgp(const SamplingSpec& spec) {
  spec.validate();
  const std::string type = "<" + std::string(rdf::vocab::kRdfType) + ">";
  const std::string head = "?s " + type + " <" + spec.target_node_type + "> . ";
  std::vector<std::string> blocks{head + "?s ?p ?o ."};
  std::string tpl = "?s ?p ?o .";
  if (spec.d == 2) {
    blocks.push_back(head + "?i ?pi ?s .");
    tpl += " ?i ?pi ?s .";
  }
  if (spec.h == 2) {
    blocks.push_back(head + "?s ?p ?o . ?o ?p2 ?o2 .");
    tpl += " ?o ?p2 ?o2 .";
    if (spec.d == 2) {
      blocks.push_back(head + "?i ?pi ?s . ?i2 ?pi2 ?i .");
      tpl += " ?i2 ?pi2 ?i .";
    }
  }
  std::string q = "CONSTRUCT { " + tpl + " }\nWHERE {\n";
  if (blocks.size() == 1) {
    q += "  " + blocks.front() + "\n";
  } else {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      q += std::string(i ? "  UNION { " : "  { ") + blocks[i] + " }\n";
    }
  }
  return q + "}";
}

struct Subgraph {
  std::vector<rdf::Triple> triples;  // sorted, duplicate-free
  std::vector<std::string> warnings;
  std::size_t pages = 0;
};

/// Runs build_bgp(spec) page by page (LIMIT/OFFSET over solutions) until a
/// page comes back empty.
inline Subgraph extract_subgraph(rdf::SparqlBackend& backend, const SamplingSpec& spec,
                                 std::size_t page_size = 100000) {
  if (page_size == 0) throw UserError("sampler page size must be positive");
  const std::string base = build_bgp(spec);
  std::set<rdf::Triple> acc;
  Subgraph out;
  for (std::size_t offset = 0;; offset += page_size) {
    auto page = backend.construct(base + "\nLIMIT " + std::to_string(page_size) + " OFFSET " +
                                  std::to_string(offset));
    ++out.pages;
    if (page.empty()) break;
    acc.insert(page.begin(), page.end());
  }
  out.triples.assign(acc.begin(), acc.end());
  if (out.triples.empty()) {
    out.warnings.push_back("no node of type <" + spec.target_node_type +
                           "> found; the extracted subgraph is empty");
  }
  return out;
}

}  // namespace kgnet::sampler
