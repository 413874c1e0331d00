#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgnet/dataset/package.hpp"
#include "kgnet/error.hpp"
#include "kgnet/gml/method.hpp"
#include "kgnet/gml/model.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/sparqlml/train_spec.hpp"
#include "kgnet/util/hash.hpp"

namespace kgnet::gml {

/// Undirected view of a package over resource nodes. rdf:type edges and
/// literal endpoints are left out.
struct PackageGraph {
  std::vector<rdf::Term> nodes;
  std::vector<std::string> table;  // table name per node
  std::vector<std::vector<std::uint32_t>> adjacency;  // sorted, duplicate-free
  std::map<std::string, std::uint32_t> offset;        // first global index per table

  std::uint32_t global(const std::string& t, dataset::NodeId id) const { return offset.at(t) + id; }

  explicit PackageGraph(const dataset::DatasetPackage& pkg) {
    for (const auto& t : pkg.node_tables) {
      offset[t.name] = static_cast<std::uint32_t>(nodes.size());
      for (const auto& n : t.nodes) {
        nodes.push_back(n);
        table.push_back(t.name);
      }
    }
    adjacency.resize(nodes.size());
    const std::string type_iri(rdf::vocab::kRdfType);
    for (const auto& r : pkg.relations) {
      if (r.predicate == type_iri) continue;
      for (const auto& e : r.edges) {
        const auto a = global(e.src_type, e.src_id), b = global(e.dst_type, e.dst_id);
        if (nodes[a].is_literal() || nodes[b].is_literal() || a == b) continue;
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
      }
    }
    for (auto& adj : adjacency) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }
};

namespace detail {

inline double mean_ms(const std::vector<double>& samples) {
  if (samples.empty()) return 1e-6;
  double s = 0;
  for (double x : samples) s += x;
  return std::max(s / static_cast<double>(samples.size()), 1e-6);
}

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline bool flag(const nlohmann::json& hp, const std::string& key, bool fallback) {
  for (const auto& [k, v] : hp.items()) {
    if (sparqlml::detail::normalize_key(k) == sparqlml::detail::normalize_key(key)) {
      if (v.is_boolean()) return v.get<bool>();
      if (v.is_string()) return v.get<std::string>() == "true";
      throw UserError("hyperparameter '" + key + "' must be a boolean");
    }
  }
  return fallback;
}

/// Label-frequency votes of the training nodes adjacent to `v` or two hops
/// away through a non-target node. Returns the winning label or -1.
inline long long neighbor_vote(const PackageGraph& g, std::uint32_t v, const std::string& target_table,
                               const std::map<std::uint32_t, dataset::NodeId>& train_label) {
  std::set<std::uint32_t> neigh;
  for (std::uint32_t w : g.adjacency[v]) {
    if (g.table[w] == target_table) {
      neigh.insert(w);
      continue;
    }
    for (std::uint32_t u : g.adjacency[w]) {
      if (g.table[u] == target_table) neigh.insert(u);
    }
  }
  neigh.erase(v);
  std::map<dataset::NodeId, std::size_t> votes;
  for (std::uint32_t u : neigh) {
    if (auto it = train_label.find(u); it != train_label.end()) ++votes[it->second];
  }
  long long best = -1;
  std::size_t best_n = 0;
  for (const auto& [label, n] : votes) {  // ascending label id keeps the smallest on ties
    if (n > best_n) {
      best = label;
      best_n = n;
    }
  }
  return best;
}

}  // namespace detail

/// Trains `method` on `pkg`, evaluates on the test split and measures the
/// mean inference latency. The returned model has no artifact_ref yet.
inline TrainedModel train_model(const sparqlml::TrainGmlSpec& task, const dataset::DatasetPackage& pkg,
                                const MethodProfile& method) {
  using sparqlml::TaskType;
  if (!method.supports(task.task_type)) {
    throw UserError("method '" + method.name + "' does not support " + std::string(sparqlml::to_string(task.task_type)));
  }
  if (pkg.splits.train.empty()) throw UserError("the training split is empty");
  const std::string& trainer = method.trainer_name();

  TrainedModel m;
  m.method_name = method.name;
  m.task_type = task.task_type;
  m.task = sparqlml::to_json(task);
  m.dataset_digest = pkg.kg_digest;
  m.created_at = util::utc_timestamp();
  m.estimate = estimate_cost(method, pkg.stats);
  m.warnings = pkg.warnings;
  m.metrics.test_size = pkg.splits.test.size();

  const PackageGraph g(pkg);
  const dataset::NodeTable& target = pkg.table(pkg.target_table);
  const std::string& tt = pkg.target_table;

  if (task.task_type == TaskType::NodeClassifier) {
    if (trainer != "majority-label" && trainer != "neighbor-label-frequency") {
      throw UserError("no node-classification trainer named '" + trainer + "'");
    }
    if (pkg.label_dict.size() < 2) {
      throw UserError("node classification needs at least 2 labels, found " + std::to_string(pkg.label_dict.size()));
    }
    std::map<dataset::NodeId, dataset::NodeId> label_of;
    for (const auto& l : pkg.labels) label_of[l.target_id] = l.label_id;
    std::map<std::uint32_t, dataset::NodeId> train_label;
    std::vector<std::size_t> counts(pkg.label_dict.size(), 0);
    for (auto id : pkg.splits.train) {
      const auto lab = label_of.at(id);
      train_label[g.global(tt, id)] = lab;
      ++counts[lab];
    }
    const auto majority =
        static_cast<dataset::NodeId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    NodeClassModel nc;
    std::size_t fallbacks = 0;
    for (dataset::NodeId id = 0; id < target.nodes.size(); ++id) {
      dataset::NodeId lab = majority;
      if (trainer == "neighbor-label-frequency") {
        const long long vote = detail::neighbor_vote(g, g.global(tt, id), tt, train_label);
        if (vote >= 0) {
          lab = static_cast<dataset::NodeId>(vote);
        } else {
          ++fallbacks;
        }
      }
      nc.predictions[node_key(target.nodes[id])] = node_key(pkg.label_dict[lab]);
    }
    if (fallbacks > 0) {
      m.warnings.push_back(std::to_string(fallbacks) + " nodes have no labelled neighbour and get the majority label");
    }
    std::size_t correct = 0;
    std::vector<double> samples;
    for (auto id : pkg.splits.test) {
      const std::string key = node_key(target.nodes[id]);
      const std::string* got = nullptr;
      samples.push_back(detail::time_ms([&] { got = nc.predict(key); }));
      if (got != nullptr && *got == node_key(pkg.label_dict[label_of.at(id)])) ++correct;
    }
    m.metrics.accuracy = pkg.splits.test.empty() ? 0.0 : static_cast<double>(correct) / pkg.splits.test.size();
    m.metrics.inference_ms = detail::mean_ms(samples);
    m.metrics.cardinality = nc.predictions.size();
    m.state = std::move(nc);
  } else if (task.task_type == TaskType::LinkPredictor) {
    if (trainer != "common-neighbors") throw UserError("no link-prediction trainer named '" + trainer + "'");
    LinkModel lm;
    lm.adamic_adar = detail::flag(task.hyperparams, "adamic_adar", false);
    // Index nodes by key order so ranking ties resolve by key.
    std::vector<std::uint32_t> order;
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
      if (!g.nodes[i].is_literal()) order.push_back(i);
    }
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return node_key(g.nodes[a]) < node_key(g.nodes[b]); });
    std::vector<std::uint32_t> local(g.nodes.size(), UINT32_MAX);
    for (std::uint32_t i = 0; i < order.size(); ++i) {
      local[order[i]] = i;
      lm.nodes.push_back(node_key(g.nodes[order[i]]));
    }
    lm.adjacency.resize(order.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) {
      for (auto n : g.adjacency[order[i]]) lm.adjacency[i].push_back(local[n]);
      std::sort(lm.adjacency[i].begin(), lm.adjacency[i].end());
    }
    for (dataset::NodeId id = 0; id < target.nodes.size(); ++id) lm.sources.push_back(local[g.global(tt, id)]);
    const auto& dst = pkg.table(pkg.destination_table);
    for (dataset::NodeId id = 0; id < dst.nodes.size(); ++id) {
      lm.destinations.push_back(local[g.global(pkg.destination_table, id)]);
    }
    std::sort(lm.sources.begin(), lm.sources.end());
    std::sort(lm.destinations.begin(), lm.destinations.end());
    std::size_t hits = 0;
    std::vector<double> samples;
    for (auto row : pkg.splits.test) {
      const auto& l = pkg.labels.at(row);
      const auto s = local[g.global(tt, l.target_id)];
      const std::string want = node_key(dst.nodes[l.label_id]);
      std::vector<RankedLink> top;
      samples.push_back(detail::time_ms([&] { top = lm.rank(s, 10); }));
      for (const auto& r : top) {
        if (r.iri == want) {
          ++hits;
          break;
        }
      }
    }
    const double h10 = pkg.splits.test.empty() ? 0.0 : static_cast<double>(hits) / pkg.splits.test.size();
    m.metrics.hits_at_10 = h10;
    m.metrics.accuracy = h10;
    m.metrics.inference_ms = detail::mean_ms(samples);
    m.metrics.cardinality = lm.sources.size();
    m.state = std::move(lm);
  } else {
    if (trainer != "embedding-similarity") throw UserError("no node-similarity trainer named '" + trainer + "'");
    // Out- and in-degree per edge type, L2-normalised.
    const std::size_t dim = 2 * pkg.relations.size();
    std::vector<std::vector<double>> vec(target.nodes.size(), std::vector<double>(dim, 0.0));
    for (std::size_t r = 0; r < pkg.relations.size(); ++r) {
      for (const auto& e : pkg.relations[r].edges) {
        if (e.src_type == tt) vec[e.src_id][2 * r] += 1;
        if (e.dst_type == tt) vec[e.dst_id][2 * r + 1] += 1;
      }
    }
    SimilarityModel sm{EmbeddingStore(dim)};
    for (dataset::NodeId id = 0; id < target.nodes.size(); ++id) {
      double n = 0;
      for (double x : vec[id]) n += x * x;
      n = std::sqrt(n);
      if (n == 0) continue;
      for (double& x : vec[id]) x /= n;
      sm.store.put(node_key(target.nodes[id]), vec[id]);
    }
    std::vector<double> samples;
    for (auto id : pkg.splits.test) {
      const std::string key = node_key(target.nodes[id]);
      if (!sm.store.contains(key)) continue;
      samples.push_back(detail::time_ms([&] { (void)sm.store.knn(key, 10); }));
    }
    m.metrics.accuracy = 0.0;
    m.metrics.inference_ms = detail::mean_ms(samples);
    m.metrics.cardinality = sm.store.size();
    m.state = std::move(sm);
  }
  return m;
}

}  // namespace kgnet::gml
