#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/util/hash.hpp"

namespace kgnet::planner {

struct Candidate {
  std::string model_uri;
  double accuracy = 0;
  double inference_ms = 0;
  std::uint64_t cardinality = 0;
  bool operator==(const Candidate&) const = default;
};

enum class Objective { MaxAccuracy, MinTime };

inline std::string_view to_string(Objective o) { return o == Objective::MaxAccuracy ? "MaxAccuracy" : "MinTime"; }

/// One candidate list per user-defined predicate. MaxAccuracy maximizes the
/// summed accuracy subject to summed time <= t_max; MinTime minimizes the
/// summed time subject to every chosen accuracy >= a_min.
struct ModelChoiceProblem {
  std::vector<std::vector<Candidate>> groups;
  std::vector<std::string> group_names;  // optional, for diagnostics
  Objective objective = Objective::MaxAccuracy;
  double t_max = std::numeric_limits<double>::infinity();
  double a_min = 0;
};

struct Assignment {
  std::vector<std::size_t> choice;  // candidate index per group
  double total_accuracy = 0;
  double total_time = 0;
  double objective_value = 0;  // total accuracy or total time
  bool operator==(const Assignment&) const = default;
};

class Infeasible : public UserError {
 public:
  using UserError::UserError;
};

namespace detail {

inline std::string group_name(const ModelChoiceProblem& p, std::size_t j) {
  return j < p.group_names.size() ? p.group_names[j] : "group " + std::to_string(j + 1);
}

/// True when assignment `a` beats `b`: better objective, then higher
/// accuracy, lower time, and smaller model URIs in group order.
inline bool preferred(const ModelChoiceProblem& p, const Assignment& a, const Assignment& b) {
  if (a.objective_value != b.objective_value) {
    return p.objective == Objective::MaxAccuracy ? a.objective_value > b.objective_value
                                                 : a.objective_value < b.objective_value;
  }
  if (a.total_accuracy != b.total_accuracy) return a.total_accuracy > b.total_accuracy;
  if (a.total_time != b.total_time) return a.total_time < b.total_time;
  for (std::size_t j = 0; j < a.choice.size(); ++j) {
    const auto& ua = p.groups[j][a.choice[j]].model_uri;
    const auto& ub = p.groups[j][b.choice[j]].model_uri;
    if (ua != ub) return ua < ub;
  }
  return false;
}

}  // namespace detail

/// Exact optimum by enumerating the cross product of candidates. Sums run in
/// group order.
inline Assignment select_models(const ModelChoiceProblem& p) {
  if (p.groups.empty()) return {};
  for (std::size_t j = 0; j < p.groups.size(); ++j) {
    if (p.groups[j].empty()) throw UserError("no candidate model for " + detail::group_name(p, j));
  }
  std::vector<std::size_t> idx(p.groups.size(), 0);
  Assignment best;
  bool found = false;
  for (;;) {
    Assignment a{idx, 0, 0, 0};
    bool ok = true;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto& c = p.groups[j][idx[j]];
      a.total_accuracy += c.accuracy;
      a.total_time += c.inference_ms;
      if (p.objective == Objective::MinTime && c.accuracy < p.a_min) ok = false;
    }
    if (p.objective == Objective::MaxAccuracy && a.total_time > p.t_max) ok = false;
    a.objective_value = p.objective == Objective::MaxAccuracy ? a.total_accuracy : a.total_time;
    if (ok && (!found || detail::preferred(p, a, best))) {
      best = a;
      found = true;
    }
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == p.groups[j].size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  if (found) return best;

  std::string why;
  if (p.objective == Objective::MaxAccuracy) {
    double floor = 0;
    for (std::size_t j = 0; j < p.groups.size(); ++j) {
      double fastest = std::numeric_limits<double>::infinity();
      for (const auto& c : p.groups[j]) fastest = std::min(fastest, c.inference_ms);
      floor += fastest;
      why += "\n  " + detail::group_name(p, j) + ": fastest candidate takes " + util::format_double(fastest) + " ms";
    }
    throw Infeasible("no model assignment meets T_max = " + util::format_double(p.t_max) +
                     " ms; the fastest assignment takes " + util::format_double(floor) + " ms:" + why);
  }
  for (std::size_t j = 0; j < p.groups.size(); ++j) {
    double top = -1;
    for (const auto& c : p.groups[j]) top = std::max(top, c.accuracy);
    if (top < p.a_min) {
      why += "\n  " + detail::group_name(p, j) + ": best accuracy " + util::format_double(top) + " < A_min";
    }
  }
  throw Infeasible("no model assignment meets A_min = " + util::format_double(p.a_min) + ":" + why);
}

enum class Shape { PerBinding, Dictionary };

inline std::string_view to_string(Shape s) { return s == Shape::PerBinding ? "PerBinding" : "Dictionary"; }

/// Milliseconds per inference HTTP call and per dictionary entry transferred.
struct CostModelParams {
  double c_call = 50.0;
  double c_item = 0.01;

  void validate() const {
    if (!(c_call > 0) || !(c_item > 0)) throw UserError("cost-model parameters must be positive");
  }
};

struct PlanChoice {
  Shape shape = Shape::Dictionary;
  double cost_per_binding = 0;
  double cost_dictionary = 0;
  double cost() const { return shape == Shape::PerBinding ? cost_per_binding : cost_dictionary; }
};

/// PerBinding costs B*c_call; Dictionary costs c_call + C*c_item. Ties go to
/// Dictionary. B = 0 always picks PerBinding, which then makes no calls.
inline PlanChoice choose_plan(std::uint64_t bindings, std::uint64_t cardinality, const CostModelParams& params = {}) {
  params.validate();
  PlanChoice c;
  c.cost_per_binding = static_cast<double>(bindings) * params.c_call;
  c.cost_dictionary = params.c_call + static_cast<double>(cardinality) * params.c_item;
  c.shape = c.cost_per_binding < c.cost_dictionary ? Shape::PerBinding : Shape::Dictionary;
  return c;
}

/// Whole-query choice over all groups: sum of B_j*c_call against sum of
/// (c_call + C_j*c_item).
inline PlanChoice choose_plan(const std::vector<std::uint64_t>& bindings, const std::vector<std::uint64_t>& cardinality,
                              const CostModelParams& params = {}) {
  if (bindings.size() != cardinality.size()) throw UserError("choose_plan: one binding and cardinality count per group");
  if (bindings.size() == 1) return choose_plan(bindings[0], cardinality[0], params);
  params.validate();
  PlanChoice c;
  for (std::size_t j = 0; j < bindings.size(); ++j) {
    c.cost_per_binding += static_cast<double>(bindings[j]) * params.c_call;
    c.cost_dictionary += params.c_call + static_cast<double>(cardinality[j]) * params.c_item;
  }
  c.shape = c.cost_per_binding < c.cost_dictionary ? Shape::PerBinding : Shape::Dictionary;
  return c;
}

}  // namespace kgnet::planner
