#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgnet/error.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparql/lexer.hpp"

namespace kgnet::sparqlml {

enum class TaskType { NodeClassifier, LinkPredictor, NodeSimilarity };

inline std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::NodeClassifier: return "NodeClassifier";
    case TaskType::LinkPredictor: return "LinkPredictor";
    case TaskType::NodeSimilarity: return "NodeSimilarity";
  }
  return "?";
}

/// Accepts the kgnet class names and the task nicknames used in train
/// payloads, with or without a `kgnet:` prefix.
inline std::optional<TaskType> task_type_from_name(std::string_view name) {
  if (auto colon = name.rfind(':'); colon != std::string_view::npos) name = name.substr(colon + 1);
  if (auto slash = name.rfind('/'); slash != std::string_view::npos) name = name.substr(slash + 1);
  if (name == "NodeClassifier" || name == "NodeClassification" || name == "NC") {
    return TaskType::NodeClassifier;
  }
  if (name == "LinkPredictor" || name == "LinkPrediction" || name == "LP") {
    return TaskType::LinkPredictor;
  }
  if (name == "NodeSimilarity" || name == "EntitySimilarity" || name == "ES") {
    return TaskType::NodeSimilarity;
  }
  return std::nullopt;
}

inline rdf::Term task_class(TaskType t) { return rdf::kgnet_term(to_string(t)); }

enum class ConstraintKey { TargetNode, NodeLabel, SourceNode, DestinationNode, TopK };

inline std::string_view to_string(ConstraintKey k) {
  switch (k) {
    case ConstraintKey::TargetNode: return "TargetNode";
    case ConstraintKey::NodeLabel: return "NodeLabel";
    case ConstraintKey::SourceNode: return "SourceNode";
    case ConstraintKey::DestinationNode: return "DestinationNode";
    case ConstraintKey::TopK: return "TopK";
  }
  return "?";
}

/// Local names under kgnet: that denote a constraint key. `TopK-Links`,
/// `SimilarTo`, `classifierTarget` and `classifierLabel` are aliases.
inline std::optional<ConstraintKey> constraint_key_from_local(std::string_view local) {
  if (local == "TargetNode" || local == "classifierTarget" || local == "SimilarTo") {
    return ConstraintKey::TargetNode;
  }
  if (local == "NodeLabel" || local == "NodeLable" || local == "classifierLabel") {
    return ConstraintKey::NodeLabel;
  }
  if (local == "SourceNode") return ConstraintKey::SourceNode;
  if (local == "DestinationNode") return ConstraintKey::DestinationNode;
  if (local == "TopK" || local == "TopK-Links") return ConstraintKey::TopK;
  return std::nullopt;
}

inline rdf::Term constraint_predicate(ConstraintKey k) { return rdf::kgnet_term(to_string(k)); }

enum class Priority { ModelScore, TrainingTime, Memory };

inline std::string_view to_string(Priority p) {
  switch (p) {
    case Priority::ModelScore: return "ModelScore";
    case Priority::TrainingTime: return "TrainingTime";
    case Priority::Memory: return "Memory";
  }
  return "?";
}

struct Budget {
  std::uint64_t max_memory_bytes = 0;
  std::uint64_t max_time_seconds = 0;
  Priority priority = Priority::ModelScore;
  bool operator==(const Budget&) const = default;
};

/// Meta-sampling scope requested in a train payload.
struct SamplingOverride {
  int d = 1;
  int h = 1;
  bool operator==(const SamplingOverride&) const = default;
};

/// A TrainGML request. NodeClassifier carries `label_predicate`;
/// LinkPredictor carries the source/destination pair and uses the source
/// type as `target_node_type`; NodeSimilarity carries only the target.
struct TrainGmlSpec {
  std::string name;
  TaskType task_type = TaskType::NodeClassifier;
  std::string target_node_type;
  std::optional<std::string> label_predicate;
  std::optional<std::string> source_node_type;
  std::optional<std::string> destination_node_type;
  std::optional<std::string> link_predicate;
  Budget budget;
  nlohmann::json hyperparams = nlohmann::json::object();
  std::optional<std::string> method_override;
  std::optional<SamplingOverride> sampling;

  bool operator==(const TrainGmlSpec&) const = default;
};

/// One user-defined predicate and its constraints. Subject and object
/// variables are absent for DELETE queries, which have no application triple.
struct UdpGroup {
  std::string predicate_var;
  TaskType task_type = TaskType::NodeClassifier;
  std::optional<std::string> subject_var;
  std::optional<std::string> object_var;
  std::map<ConstraintKey, rdf::Term> constraints;

  std::optional<std::int64_t> top_k() const {
    auto it = constraints.find(ConstraintKey::TopK);
    if (it == constraints.end()) return std::nullopt;
    return std::stoll(it->second.value());
  }
  const rdf::Term* constraint(ConstraintKey k) const {
    auto it = constraints.find(k);
    return it == constraints.end() ? nullptr : &it->second;
  }

  bool operator==(const UdpGroup&) const = default;
};

struct SparqlMlAst {
  enum class Kind { Select, InsertTrain, DeleteModel };

  Kind kind = Kind::Select;
  sparql::PrefixMap prefixes;
  bool distinct = false;
  std::vector<std::string> projection;  // empty means '*'
  std::vector<rdf::TriplePattern> data_patterns;
  std::vector<UdpGroup> gml_patterns;
  std::optional<TrainGmlSpec> train_payload;
  std::optional<std::string> target_graph;
  std::optional<std::size_t> limit;

  bool operator==(const SparqlMlAst&) const = default;
};

inline bool in_kgnet_namespace(const rdf::Term& t) {
  return t.is_iri() && t.value().starts_with(rdf::vocab::kKgnet);
}

}  // namespace kgnet::sparqlml
