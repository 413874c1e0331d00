#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/gml/client.hpp"
#include "kgnet/kgmeta/governor.hpp"
#include "kgnet/planner/optimizer.hpp"
#include "kgnet/planner/rewrite.hpp"
#include "kgnet/rdf/backend.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/sparqlml/render.hpp"

namespace kgnet::planner {

struct ExecuteParams {
  CostModelParams cost;
  Objective objective = Objective::MaxAccuracy;
  double t_max = std::numeric_limits<double>::infinity();  // ms, MaxAccuracy
  double a_min = 0;                                         // MinTime
  bool lenient = false;               // unresolved subjects yield unbound cells instead of failing
  bool filtered_dictionary = true;    // Dictionary calls ask only for the bound subjects
  std::size_t max_in_flight = 8;      // PerBinding concurrency
  std::optional<Shape> force_shape;
};

struct CardinalityEstimate {
  std::string variable;
  std::uint64_t count = 0;
  bool estimated = false;  // true when the model cardinality stood in for a failed COUNT
  bool operator==(const CardinalityEstimate&) const = default;
};

struct QueryPlan {
  Shape shape = Shape::Dictionary;
  PlanChoice choice;
  Assignment assignment;
  std::vector<kgmeta::ModelMetadata> models;  // per group
  std::vector<CardinalityEstimate> bindings;  // per group, subject variable
  std::size_t estimated_calls = 0;
  double estimated_cost = 0;
  Rewrite rewrite;
};

struct ExecutionResult {
  rdf::BindingTable table;
  QueryPlan plan;
  std::size_t inference_calls = 0;
  bool short_circuited = false;
};

/// Inference failed mid-query; the message says how far execution got.
class InferenceError : public BackendError {
 public:
  using BackendError::BackendError;
};

namespace detail {

inline std::string group_label(const sparqlml::UdpGroup& g) {
  std::string s = "?" + g.predicate_var + " (" + std::string(sparqlml::to_string(g.task_type));
  for (const auto& [k, v] : g.constraints) {
    if (k == sparqlml::ConstraintKey::TopK) continue;
    s += ", " + std::string(sparqlml::to_string(k)) + "=" + v.to_string();
  }
  return s + ")";
}

inline rdf::Term key_to_term(const std::string& key) {
  if (key.starts_with("_:") || key.starts_with("\"") || key.starts_with("<")) return rdf::parse_ntriples_term(key);
  return rdf::Term::iri(key);
}

/// Patterns mentioning `var`.
inline std::vector<rdf::TriplePattern> patterns_of(const sparqlml::SparqlMlAst& ast, const std::string& var) {
  std::vector<rdf::TriplePattern> out;
  for (const auto& p : ast.data_patterns) {
    for (const rdf::Term* t : {&p.subject, &p.predicate, &p.object}) {
      if (t->is_variable() && t->value() == var) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// COUNT(DISTINCT ?v) over the data patterns mentioning each group's subject
/// variable. A failing backend falls back to `model_cardinality[j]`, flagged.
inline std::vector<CardinalityEstimate> estimate_cardinalities(const sparqlml::SparqlMlAst& ast,
                                                               rdf::SparqlBackend& backend,
                                                               const std::vector<std::uint64_t>& model_cardinality) {
  std::vector<CardinalityEstimate> out;
  for (std::size_t j = 0; j < ast.gml_patterns.size(); ++j) {
    const auto& g = ast.gml_patterns[j];
    if (!g.subject_var) throw UserError("user-defined predicate ?" + g.predicate_var + " has no subject variable");
    const std::string& v = *g.subject_var;
    std::string q = "SELECT (COUNT(DISTINCT ?" + v + ") AS ?c) WHERE {";
    for (const auto& p : detail::patterns_of(ast, v)) q += " " + sparqlml::detail::render_pattern(p, {});
    q += " }";
    CardinalityEstimate e{v, 0, false};
    try {
      const auto t = backend.select(q);
      const auto col = t.require_column("c");
      if (t.rows.size() != 1 || !t.rows[0][col]) throw BackendError("COUNT returned no value");
      e.count = std::stoull(t.rows[0][col]->value());
    } catch (const std::exception&) {
      e.count = j < model_cardinality.size() ? model_cardinality[j] : 0;
      e.estimated = true;
    }
    out.push_back(e);
  }
  return out;
}

/// Model choice, binding estimates, plan shape and rewrite for a SELECT.
inline QueryPlan plan_query(const sparqlml::SparqlMlAst& ast, rdf::SparqlBackend& data, const kgmeta::Governor& meta,
                            const ExecuteParams& params) {
  if (ast.kind != sparqlml::SparqlMlAst::Kind::Select) throw UserError("only SELECT queries can be executed");
  QueryPlan plan;
  ModelChoiceProblem problem;
  problem.objective = params.objective;
  problem.t_max = params.t_max;
  problem.a_min = params.a_min;
  std::vector<std::vector<kgmeta::ModelMetadata>> found;
  for (const auto& g : ast.gml_patterns) {
    auto models = meta.lookup_models(g.task_type, g.constraints);
    if (models.empty()) throw NotFoundError("no model matches " + detail::group_label(g) + " in KGMeta");
    std::vector<Candidate> cands;
    for (const auto& m : models) cands.push_back({m.model_uri, m.accuracy, m.inference_time_ms, m.model_cardinality});
    problem.groups.push_back(std::move(cands));
    problem.group_names.push_back("?" + g.predicate_var);
    found.push_back(std::move(models));
  }
  plan.assignment = select_models(problem);
  std::vector<ModelBinding> bindings;
  std::vector<std::uint64_t> cardinality;
  for (std::size_t j = 0; j < found.size(); ++j) {
    plan.models.push_back(found[j][plan.assignment.choice[j]]);
    bindings.push_back({plan.models.back().model_uri, plan.models.back().artifact_ref});
    cardinality.push_back(plan.models.back().model_cardinality);
  }
  if (!ast.gml_patterns.empty()) {
    plan.bindings = estimate_cardinalities(ast, data, cardinality);
    std::vector<std::uint64_t> b;
    for (const auto& e : plan.bindings) b.push_back(e.count);
    plan.choice = choose_plan(b, cardinality, params.cost);
    plan.shape = params.force_shape.value_or(plan.choice.shape);
    plan.estimated_cost = plan.shape == Shape::PerBinding ? plan.choice.cost_per_binding : plan.choice.cost_dictionary;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const bool per_subject =
          plan.shape == Shape::PerBinding || ast.gml_patterns[j].task_type == sparqlml::TaskType::NodeSimilarity;
      plan.estimated_calls += per_subject ? b[j] : 1;
    }
  }
  plan.rewrite = rewrite(ast, bindings, plan.shape);
  return plan;
}

namespace detail {

/// Predictions for one group, keyed by subject.
struct GroupResult {
  std::map<std::string, std::vector<rdf::Term>> values;  // NC: one value; LP/NS: ranked list
  std::set<std::string> unresolved;
};

/// Runs `call(i)` for i in [0, n) on up to `width` threads. Rethrows the
/// failure with the smallest index after all workers stop.
template <class F>
void run_bounded(std::size_t n, std::size_t width, F&& call, std::size_t& succeeded) {
  std::atomic<std::size_t> next{0}, ok{0};
  std::mutex m;
  std::optional<std::pair<std::size_t, std::exception_ptr>> first;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        call(i);
        ++ok;
      } catch (...) {
        std::lock_guard lock(m);
        if (!first || i < first->first) first = {i, std::current_exception()};
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(width, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  succeeded = ok;
  if (first) std::rethrow_exception(first->second);
}

}  // namespace detail

/// Plans and runs a SPARQL^ML SELECT: data query on `data`, predictions from
/// `gml`, joined client-side. Result columns follow the projection.
inline ExecutionResult execute(const sparqlml::SparqlMlAst& ast, rdf::SparqlBackend& data, const kgmeta::Governor& meta,
                               gml::GmlClient& gml, const ExecuteParams& params = {}) {
  using sparqlml::TaskType;
  ExecutionResult out;
  out.plan = plan_query(ast, data, meta, params);
  const auto& manifest = out.plan.rewrite.manifest;
  const std::vector<std::string> result_vars = result_variables(ast);
  out.table.variables = result_vars;

  if (manifest.empty()) {
    auto t = data.select(out.plan.rewrite.query);
    rdf::BindingTable r{result_vars, {}};
    std::vector<std::optional<std::size_t>> cols;
    for (const auto& v : result_vars) cols.push_back(t.column(v));
    for (const auto& row : t.rows) {
      rdf::BindingTable::Row o;
      for (const auto& c : cols) o.push_back(c ? row[*c] : std::nullopt);
      r.rows.push_back(std::move(o));
    }
    out.table = std::move(r);
    return out;
  }
  for (const auto& b : out.plan.bindings) {
    if (b.count == 0 && !b.estimated) {
      out.short_circuited = true;
      return out;
    }
  }

  const rdf::BindingTable rows = data.select(out.plan.rewrite.query);
  if (rows.empty()) {
    out.short_circuited = true;
    return out;
  }

  std::atomic<std::size_t> calls{0};
  std::vector<detail::GroupResult> results(manifest.size());
  for (std::size_t j = 0; j < manifest.size(); ++j) {
    const CallSpec& c = manifest[j];
    const std::size_t col = rows.require_column(c.subject_var);
    std::set<std::string> subject_set;
    for (const auto& r : rows.rows) {
      if (r[col]) subject_set.insert(gml::node_key(*r[col]));
    }
    const std::vector<std::string> subjects(subject_set.begin(), subject_set.end());
    auto& res = results[j];
    std::mutex res_mutex;

    auto absorb_nc = [&](const gml::NodeClassResult& r) {
      std::lock_guard lock(res_mutex);
      for (const auto& [s, label] : r.predictions) res.values[s] = {detail::key_to_term(label)};
      res.unresolved.insert(r.unresolved.begin(), r.unresolved.end());
    };
    auto absorb_lp = [&](const gml::LinkResult& r) {
      std::lock_guard lock(res_mutex);
      for (const auto& [s, ranked] : r.links) {
        auto& v = res.values[s];
        for (const auto& l : ranked) v.push_back(detail::key_to_term(l.iri));
      }
      res.unresolved.insert(r.unresolved.begin(), r.unresolved.end());
    };
    auto one_subject = [&](std::size_t i) {
      const std::string& s = subjects[i];
      ++calls;
      switch (c.task_type) {
        case TaskType::NodeClassifier: absorb_nc(gml.infer_node_class(c.artifact_ref, {s})); break;
        case TaskType::LinkPredictor: absorb_lp(gml.infer_links(c.artifact_ref, {s}, c.top_k)); break;
        case TaskType::NodeSimilarity: {
          std::vector<rdf::Term> v;
          bool missing = false;
          try {
            for (const auto& h : gml.knn(c.artifact_ref, gml::KnnQuery(s), c.top_k)) v.push_back(detail::key_to_term(h.iri));
          } catch (const NotFoundError& e) {
            if (std::string(e.what()).find("no embedding") == std::string::npos) throw;
            missing = true;
          }
          std::lock_guard lock(res_mutex);
          if (missing) {
            res.unresolved.insert(s);
          } else {
            res.values[s] = std::move(v);
          }
          break;
        }
      }
    };

    try {
      if (c.shape == Shape::Dictionary && c.task_type != TaskType::NodeSimilarity) {
        ++calls;
        if (c.task_type == TaskType::NodeClassifier) {
          absorb_nc(gml.infer_node_class(c.artifact_ref, subjects, !params.filtered_dictionary));
          if (!params.filtered_dictionary) {
            for (const auto& s : subjects) {
              if (!res.values.contains(s)) res.unresolved.insert(s);
            }
          }
        } else {
          absorb_lp(gml.infer_links(c.artifact_ref, subjects, c.top_k));
        }
      } else {
        std::size_t succeeded = 0;
        try {
          detail::run_bounded(subjects.size(), params.max_in_flight, one_subject, succeeded);
        } catch (const std::exception& e) {
          throw InferenceError("inference for ?" + c.predicate_var + " with model <" + c.model_uri + "> failed after " +
                               std::to_string(succeeded) + " of " + std::to_string(subjects.size()) +
                               " calls: " + e.what());
        }
      }
    } catch (const InferenceError&) {
      throw;
    } catch (const std::exception& e) {
      throw InferenceError("inference for ?" + c.predicate_var + " with model <" + c.model_uri +
                           "> failed: " + e.what() + " (" + std::to_string(rows.size()) +
                           " data rows fetched, no rows joined)");
    }
    if (!res.unresolved.empty() && !params.lenient) {
      throw InferenceError("model <" + c.model_uri + "> has no prediction for " +
                           std::to_string(res.unresolved.size()) + " subject(s) of ?" + c.subject_var +
                           ", e.g. <" + *res.unresolved.begin() + ">; use lenient mode to keep them unbound");
    }
  }
  out.inference_calls = calls;

  // Join: each data row expands by the cross product of its group values.
  std::vector<std::optional<std::size_t>> data_cols;
  for (const auto& v : result_vars) data_cols.push_back(rows.column(v));
  std::vector<std::size_t> object_pos(manifest.size());
  for (std::size_t j = 0; j < manifest.size(); ++j) {
    object_pos[j] = static_cast<std::size_t>(
        std::find(result_vars.begin(), result_vars.end(), manifest[j].object_var) - result_vars.begin());
  }
  std::set<rdf::BindingTable::Row> seen;
  for (const auto& r : rows.rows) {
    rdf::BindingTable::Row base;
    for (const auto& c : data_cols) base.push_back(c ? r[*c] : std::nullopt);
    std::vector<rdf::BindingTable::Row> partial{base};
    for (std::size_t j = 0; j < manifest.size() && !partial.empty(); ++j) {
      const auto& s = r[rows.require_column(manifest[j].subject_var)];
      std::vector<std::optional<rdf::Term>> values;
      if (s) {
        auto it = results[j].values.find(gml::node_key(*s));
        if (it != results[j].values.end()) {
          for (const auto& t : it->second) values.emplace_back(t);
        } else {
          values.emplace_back(std::nullopt);  // lenient
        }
      }
      std::vector<rdf::BindingTable::Row> next;
      for (const auto& p : partial) {
        for (const auto& v : values) {
          auto row = p;
          if (object_pos[j] < row.size()) row[object_pos[j]] = v;
          next.push_back(std::move(row));
        }
      }
      partial = std::move(next);
    }
    for (auto& p : partial) {
      if (ast.distinct && !seen.insert(p).second) continue;
      out.table.rows.push_back(std::move(p));
      if (ast.limit && out.table.rows.size() >= *ast.limit) return out;
    }
  }
  return out;
}

}  // namespace kgnet::planner
