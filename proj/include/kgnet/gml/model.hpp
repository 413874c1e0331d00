#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kgnet/error.hpp"
#include "kgnet/gml/embedding_store.hpp"
#include "kgnet/gml/method.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparqlml/ast.hpp"

namespace kgnet::gml {

/// API spelling of a node: the IRI itself, or `_:label` for blank nodes.
inline std::string node_key(const rdf::Term& t) { return t.is_iri() ? t.value() : t.to_string(); }

/// Transductive node classifier: one stored label per target node.
struct NodeClassModel {
  std::map<std::string, std::string> predictions;

  const std::string* predict(const std::string& node) const {
    auto it = predictions.find(node);
    return it == predictions.end() ? nullptr : &it->second;
  }
  bool operator==(const NodeClassModel&) const = default;
};

struct RankedLink {
  std::string iri;
  double score = 0;
  bool operator==(const RankedLink&) const = default;
};

/// Common-neighbours ranker over the undirected training graph.
struct LinkModel {
  bool adamic_adar = false;
  std::vector<std::string> nodes;                 // node keys, sorted
  std::vector<std::vector<std::uint32_t>> adjacency;  // sorted, duplicate-free
  std::vector<std::uint32_t> sources;              // sorted indices
  std::vector<std::uint32_t> destinations;         // sorted indices

  std::optional<std::uint32_t> index_of(const std::string& key) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), key);
    if (it == nodes.end() || *it != key) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes.begin());
  }
  bool is_source(std::uint32_t i) const { return std::binary_search(sources.begin(), sources.end(), i); }

  /// Destinations by score descending, ties by node key; the source itself is skipped.
  std::vector<RankedLink> rank(std::uint32_t source, std::size_t k) const {
    std::map<std::uint32_t, double> score;
    for (std::uint32_t z : adjacency[source]) {
      const double w = adamic_adar ? 1.0 / std::log(static_cast<double>(adjacency[z].size())) : 1.0;
      for (std::uint32_t d : adjacency[z]) {
        if (d != source) score[d] += w;
      }
    }
    std::vector<std::pair<double, std::uint32_t>> all;
    all.reserve(destinations.size());
    for (std::uint32_t d : destinations) {
      if (d == source) continue;
      auto it = score.find(d);
      all.emplace_back(it == score.end() ? 0.0 : it->second, d);
    }
    // Node keys are sorted, so index order is key order.
    auto order = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), order);
    std::vector<RankedLink> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({nodes[all[i].second], all[i].first});
    return out;
  }
  bool operator==(const LinkModel&) const = default;
};

struct SimilarityModel {
  EmbeddingStore store;
};

using ModelState = std::variant<NodeClassModel, LinkModel, SimilarityModel>;

struct Metrics {
  double accuracy = 0;  // NC: test accuracy; LP: Hits@10; NodeSimilarity: 0
  std::optional<double> hits_at_10;
  double inference_ms = 0;  // mean per test-split call
  std::uint64_t cardinality = 0;
  std::uint64_t test_size = 0;
  bool operator==(const Metrics&) const = default;
};

struct TrainedModel {
  std::string artifact_ref;
  std::string method_name;
  sparqlml::TaskType task_type = sparqlml::TaskType::NodeClassifier;
  nlohmann::json task;  // TrainGML spec, strict JSON
  std::string dataset_digest;
  std::string created_at;
  Metrics metrics;
  CostEstimate estimate;
  std::vector<std::string> warnings;
  ModelState state;
};

inline nlohmann::json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"hits_at_10", m.hits_at_10 ? nlohmann::json(*m.hits_at_10) : nlohmann::json(nullptr)},
          {"inference_ms", m.inference_ms},
          {"cardinality", m.cardinality},
          {"test_size", m.test_size}};
}

inline Metrics metrics_from_json(const nlohmann::json& j) {
  Metrics m;
  m.accuracy = j.at("accuracy").get<double>();
  if (!j.at("hits_at_10").is_null()) m.hits_at_10 = j.at("hits_at_10").get<double>();
  m.inference_ms = j.at("inference_ms").get<double>();
  m.cardinality = j.at("cardinality").get<std::uint64_t>();
  m.test_size = j.at("test_size").get<std::uint64_t>();
  return m;
}

inline constexpr int kArtifactVersion = 1;

/// Metadata part of the artifact, without the model state.
inline nlohmann::json summary_json(const TrainedModel& m) {
  return {{"v", kArtifactVersion},
          {"ref", m.artifact_ref},
          {"method", m.method_name},
          {"task_type", sparqlml::to_string(m.task_type)},
          {"task", m.task},
          {"dataset_digest", m.dataset_digest},
          {"created_at", m.created_at},
          {"metrics", metrics_json(m.metrics)},
          {"estimate", {{"memory_bytes", m.estimate.memory_bytes}, {"time_seconds", m.estimate.time_seconds}}},
          {"warnings", m.warnings}};
}

inline nlohmann::json to_json(const TrainedModel& m) {
  nlohmann::json j = summary_json(m);
  j["state"] = std::visit(
      [](const auto& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NodeClassModel>) {
          return {{"kind", "node_class"}, {"predictions", s.predictions}};
        } else if constexpr (std::is_same_v<T, LinkModel>) {
          return {{"kind", "links"},
                  {"adamic_adar", s.adamic_adar},
                  {"nodes", s.nodes},
                  {"adjacency", s.adjacency},
                  {"sources", s.sources},
                  {"destinations", s.destinations}};
        } else {
          nlohmann::json entries = nlohmann::json::object();
          for (const auto& iri : s.store.iris()) entries[iri] = s.store.get(iri);
          return {{"kind", "embedding"}, {"dimension", s.store.dimension()}, {"entries", entries}};
        }
      },
      m.state);
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("v").get<int>() != kArtifactVersion) {
      throw IoError("artifact format version " + j.at("v").dump() + " is not supported");
    }
    TrainedModel m;
    m.artifact_ref = j.at("ref").get<std::string>();
    m.method_name = j.at("method").get<std::string>();
    auto tt = sparqlml::task_type_from_name(j.at("task_type").get<std::string>());
    if (!tt) throw IoError("artifact has unknown task type");
    m.task_type = *tt;
    m.task = j.at("task");
    m.dataset_digest = j.at("dataset_digest").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.metrics = metrics_from_json(j.at("metrics"));
    m.estimate = {j.at("estimate").at("memory_bytes").get<std::uint64_t>(),
                  j.at("estimate").at("time_seconds").get<double>()};
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    const auto& s = j.at("state");
    const auto kind = s.at("kind").get<std::string>();
    if (kind == "node_class") {
      m.state = NodeClassModel{s.at("predictions").get<std::map<std::string, std::string>>()};
    } else if (kind == "links") {
      LinkModel lm;
      lm.adamic_adar = s.at("adamic_adar").get<bool>();
      lm.nodes = s.at("nodes").get<std::vector<std::string>>();
      lm.adjacency = s.at("adjacency").get<std::vector<std::vector<std::uint32_t>>>();
      lm.sources = s.at("sources").get<std::vector<std::uint32_t>>();
      lm.destinations = s.at("destinations").get<std::vector<std::uint32_t>>();
      if (lm.adjacency.size() != lm.nodes.size()) throw IoError("artifact adjacency does not match its nodes");
      for (const auto* list : {&lm.sources, &lm.destinations}) {
        for (auto i : *list) {
          if (i >= lm.nodes.size()) throw IoError("artifact node index out of range");
        }
      }
      for (const auto& adj : lm.adjacency) {
        for (auto i : adj) {
          if (i >= lm.nodes.size()) throw IoError("artifact node index out of range");
        }
      }
      m.state = std::move(lm);
    } else if (kind == "embedding") {
      SimilarityModel sm{EmbeddingStore(s.at("dimension").get<std::size_t>())};
      for (const auto& [iri, v] : s.at("entries").items()) sm.store.put(iri, v.get<std::vector<double>>());
      m.state = std::move(sm);
    } else {
      throw IoError("artifact has unknown state kind '" + kind + "'");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed artifact: ") + e.what());
  }
}

}  // namespace kgnet::gml
