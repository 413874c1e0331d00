#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "kgnet/dataset/package.hpp"
#include "kgnet/error.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/util/hash.hpp"
#include "kgnet/util/zip.hpp"

namespace kgnet::gml {

using sparqlml::Budget;
using sparqlml::Priority;
using sparqlml::TaskType;

enum class Family { FullBatch, MiniBatchSampling };

inline std::string_view to_string(Family f) {
  return f == Family::FullBatch ? "FullBatch" : "MiniBatchSampling";
}

struct MethodProfile {
  std::string name;
  std::string trainer;  // baseline trainer; empty means `name`
  Family family = Family::FullBatch;
  std::set<TaskType> tasks;
  double alpha_nodes = 0;  // bytes per node per embedding dimension
  double alpha_edges = 0;  // bytes per edge
  double alpha_fixed = 0;  // bytes
  double beta_epoch_edge = 0;  // seconds per edge per epoch
  double beta_epoch_node = 0;  // seconds per node per epoch
  int epochs = 10;
  int dim = 64;
  double batch_fraction = 1.0;  // MiniBatchSampling only, in (0,1]
  int quality = 0;              // ordinal prior, higher is better

  void validate() const {
    if (name.empty()) throw UserError("method profile without a name");
    if (tasks.empty()) throw UserError("method profile '" + name + "' supports no task");
    for (double c : {alpha_nodes, alpha_edges, alpha_fixed, beta_epoch_edge, beta_epoch_node}) {
      if (!(c >= 0) || !std::isfinite(c)) {
        throw UserError("method profile '" + name + "' has a negative or non-finite coefficient");
      }
    }
    if (epochs < 0 || dim < 0) throw UserError("method profile '" + name + "' has negative epochs or dim");
    if (family == Family::MiniBatchSampling && !(batch_fraction > 0 && batch_fraction <= 1)) {
      throw UserError("method profile '" + name + "' needs a batch fraction in (0,1]");
    }
  }
  bool supports(TaskType t) const { return tasks.contains(t); }
  const std::string& trainer_name() const { return trainer.empty() ? name : trainer; }
  bool operator==(const MethodProfile&) const = default;
};

struct CostEstimate {
  std::uint64_t memory_bytes = 0;
  double time_seconds = 0;
  bool operator==(const CostEstimate&) const = default;
};

/// memory = a_fixed + f*(a_nodes*V*dim + a_edges*E), rounded up to whole bytes;
/// time = epochs*(b_edge*E + b_node*V). f is the batch fraction for
/// MiniBatchSampling and 1 for FullBatch.
inline CostEstimate estimate_cost(const MethodProfile& p, const dataset::DatasetStats& stats, int dim, int epochs) {
  const double v = static_cast<double>(stats.total_nodes());
  const double e = static_cast<double>(stats.total_edges());
  const double f = p.family == Family::MiniBatchSampling ? p.batch_fraction : 1.0;
  const double mem = p.alpha_fixed + f * (p.alpha_nodes * v * dim + p.alpha_edges * e);
  CostEstimate c;
  c.memory_bytes = mem >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                 : static_cast<std::uint64_t>(std::ceil(mem));
  c.time_seconds = epochs * (p.beta_epoch_edge * e + p.beta_epoch_node * v);
  return c;
}

inline CostEstimate estimate_cost(const MethodProfile& p, const dataset::DatasetStats& stats) {
  return estimate_cost(p, stats, p.dim, p.epochs);
}

/// A zero limit means unlimited.
inline bool fits(const CostEstimate& c, const Budget& b) {
  return (b.max_memory_bytes == 0 || c.memory_bytes <= b.max_memory_bytes) &&
         (b.max_time_seconds == 0 || c.time_seconds <= static_cast<double>(b.max_time_seconds));
}

class BudgetInfeasible : public UserError {
 public:
  using UserError::UserError;
};

/// Sort key; the best profile has the lexicographically greatest key.
/// ModelScore ranks (quality, -time, -memory); TrainingTime ranks
/// (-time, quality, -memory); Memory ranks (-memory, quality, -time). The name
/// breaks remaining ties, smaller first.
inline auto selection_key(const MethodProfile& p, const CostEstimate& c, Priority priority) {
  const double q = p.quality, t = -c.time_seconds, m = -static_cast<double>(c.memory_bytes);
  switch (priority) {
    case Priority::TrainingTime: return std::make_tuple(t, q, m);
    case Priority::Memory: return std::make_tuple(m, q, t);
    case Priority::ModelScore: break;
  }
  return std::make_tuple(q, t, m);
}

inline bool better(const MethodProfile& a, const CostEstimate& ca, const MethodProfile& b, const CostEstimate& cb,
                   Priority priority) {
  const auto ka = selection_key(a, ca, priority), kb = selection_key(b, cb, priority);
  if (ka != kb) return ka > kb;
  return a.name < b.name;
}

/// Best profile supporting `task` whose estimate fits `budget`.
inline MethodProfile select_method(const std::vector<MethodProfile>& profiles, const dataset::DatasetStats& stats,
                                   const Budget& budget, std::optional<TaskType> task = std::nullopt) {
  if (profiles.empty()) throw UserError("no method profiles configured");
  const MethodProfile* best = nullptr;
  CostEstimate best_cost;
  std::string report;
  for (const auto& p : profiles) {
    if (task && !p.supports(*task)) continue;
    const CostEstimate c = estimate_cost(p, stats);
    report += "\n  " + p.name + ": memory " + std::to_string(c.memory_bytes) + " B, time " +
              util::format_double(c.time_seconds) + " s";
    if (!fits(c, budget)) continue;
    if (best == nullptr || better(p, c, *best, best_cost, budget.priority)) {
      best = &p;
      best_cost = c;
    }
  }
  if (best == nullptr) {
    if (report.empty()) throw UserError("no configured method supports " + std::string(sparqlml::to_string(*task)));
    throw BudgetInfeasible("no method fits the budget (max memory " +
                           (budget.max_memory_bytes ? std::to_string(budget.max_memory_bytes) + " B" : "unlimited") +
                           ", max time " +
                           (budget.max_time_seconds ? std::to_string(budget.max_time_seconds) + " s" : "unlimited") +
                           "):" + report);
  }
  return *best;
}

inline nlohmann::json to_json(const MethodProfile& p) {
  std::vector<std::string> tasks;
  for (auto t : p.tasks) tasks.emplace_back(sparqlml::to_string(t));
  return {{"name", p.name},
          {"trainer", p.trainer_name()},
          {"family", to_string(p.family)},
          {"tasks", tasks},
          {"alpha_nodes", p.alpha_nodes},
          {"alpha_edges", p.alpha_edges},
          {"alpha_fixed", p.alpha_fixed},
          {"beta_epoch_edge", p.beta_epoch_edge},
          {"beta_epoch_node", p.beta_epoch_node},
          {"epochs", p.epochs},
          {"dim", p.dim},
          {"batch_fraction", p.batch_fraction},
          {"quality", p.quality}};
}

inline MethodProfile profile_from_json(const nlohmann::json& j) {
  try {
    MethodProfile p;
    p.name = j.at("name").get<std::string>();
    p.trainer = j.value("trainer", std::string());
    const auto fam = j.value("family", std::string("FullBatch"));
    if (fam == "FullBatch") {
      p.family = Family::FullBatch;
    } else if (fam == "MiniBatchSampling" || fam == "MiniBatch") {
      p.family = Family::MiniBatchSampling;
    } else {
      throw UserError("method profile '" + p.name + "': unknown family '" + fam + "'");
    }
    for (const auto& t : j.at("tasks")) {
      auto tt = sparqlml::task_type_from_name(t.get<std::string>());
      if (!tt) throw UserError("method profile '" + p.name + "': unknown task '" + t.get<std::string>() + "'");
      p.tasks.insert(*tt);
    }
    p.alpha_nodes = j.value("alpha_nodes", 0.0);
    p.alpha_edges = j.value("alpha_edges", 0.0);
    p.alpha_fixed = j.value("alpha_fixed", 0.0);
    p.beta_epoch_edge = j.value("beta_epoch_edge", 0.0);
    p.beta_epoch_node = j.value("beta_epoch_node", 0.0);
    p.epochs = j.value("epochs", 10);
    p.dim = j.value("dim", 64);
    p.batch_fraction = j.value("batch_fraction", 1.0);
    p.quality = j.value("quality", 0);
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("malformed method profile: ") + e.what());
  }
}

/// Built-in profiles of the baseline trainers; config/methods.json carries the same values.
inline std::vector<MethodProfile> default_profiles() {
  const char* text = R"({"methods": [
    {"name": "majority-label", "family": "FullBatch", "tasks": ["NodeClassifier"],
     "alpha_nodes": 4, "alpha_edges": 16, "alpha_fixed": 67108864,
     "beta_epoch_edge": 2e-7, "beta_epoch_node": 1e-7, "epochs": 1, "dim": 1, "quality": 1},
    {"name": "neighbor-label-frequency", "family": "MiniBatchSampling", "tasks": ["NodeClassifier"],
     "alpha_nodes": 4, "alpha_edges": 16, "alpha_fixed": 134217728,
     "beta_epoch_edge": 1e-6, "beta_epoch_node": 5e-7, "epochs": 10, "dim": 64,
     "batch_fraction": 0.1, "quality": 2},
    {"name": "common-neighbors", "family": "FullBatch", "tasks": ["LinkPredictor"],
     "alpha_nodes": 4, "alpha_edges": 16, "alpha_fixed": 134217728,
     "beta_epoch_edge": 1e-6, "beta_epoch_node": 5e-7, "epochs": 1, "dim": 64, "quality": 2},
    {"name": "embedding-similarity", "family": "FullBatch", "tasks": ["NodeSimilarity"],
     "alpha_nodes": 8, "alpha_edges": 16, "alpha_fixed": 67108864,
     "beta_epoch_edge": 5e-7, "beta_epoch_node": 5e-7, "epochs": 1, "dim": 64, "quality": 1}
  ]})";
  const nlohmann::json doc = nlohmann::json::parse(text);
  std::vector<MethodProfile> out;
  for (const auto& m : doc.at("methods")) out.push_back(profile_from_json(m));
  return out;
}

/// Reads {"methods": [...]} from a JSON file.
inline std::vector<MethodProfile> load_profiles(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(util::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UserError("method config " + path + ": " + e.what());
  }
  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
    throw UserError("method config " + path + " needs a non-empty \"methods\" array");
  }
  std::vector<MethodProfile> out;
  for (const auto& m : j.at("methods")) out.push_back(profile_from_json(m));
  return out;
}

}  // namespace kgnet::gml
