#pragma once

#include <string>

#include <json.hpp>

#include "kgnet/kgmeta/governor.hpp"
#include "kgnet/platform/platform.hpp"
#include "kgnet/rdf/results_json.hpp"

namespace kgnet::platform {

/// Stable JSON shapes shared by `--json` output and the HTTP front-end.

inline nlohmann::json model_json(const kgmeta::ModelMetadata& m) {
  auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
  return {{"uri", m.model_uri},
          {"task", sparqlml::to_string(m.task_type)},
          {"target_node_type", m.target_node_type},
          {"label_predicate", opt(m.label_predicate)},
          {"source_node_type", opt(m.source_node_type)},
          {"destination_node_type", opt(m.destination_node_type)},
          {"method", m.method_name},
          {"accuracy", m.accuracy},
          {"inference_time_ms", m.inference_time_ms},
          {"cardinality", m.model_cardinality},
          {"trained_on", m.trained_on},
          {"sampling", {{"d", m.sampling_d}, {"h", m.sampling_h}}},
          {"artifact_ref", m.artifact_ref},
          {"created_at", m.created_at},
          {"dataset_digest", m.dataset_digest},
          {"name", m.name}};
}

inline nlohmann::json train_json(const TrainOutcome& t) {
  return {{"model", model_json(t.model)},
          {"scope", {{"target", t.scope.target_node_type}, {"d", t.scope.d}, {"h", t.scope.h}}},
          {"kg_prime_triples", t.kg_prime_triples},
          {"package", t.package_path},
          {"stats", dataset::to_json(t.stats)},
          {"warnings", t.warnings}};
}

inline nlohmann::json plan_json(const planner::QueryPlan& p) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : p.models) models.push_back(m.model_uri);
  nlohmann::json bindings = nlohmann::json::array();
  for (const auto& b : p.bindings) {
    bindings.push_back({{"variable", b.variable}, {"count", b.count}, {"estimated", b.estimated}});
  }
  return {{"shape", planner::to_string(p.shape)},
          {"cost_per_binding", p.choice.cost_per_binding},
          {"cost_dictionary", p.choice.cost_dictionary},
          {"models", models},
          {"bindings", bindings},
          {"estimated_calls", p.estimated_calls},
          {"data_query", p.rewrite.query}};
}

inline nlohmann::json select_json(const planner::ExecutionResult& r) {
  return {{"results", rdf::bindings_to_json(r.table)},
          {"plan", plan_json(r.plan)},
          {"inference_calls", r.inference_calls}};
}

inline nlohmann::json outcome_json(const QueryOutcome& o) {
  switch (o.kind) {
    case sparqlml::SparqlMlAst::Kind::Select: return {{"kind", "select"}, {"select", select_json(*o.select)}};
    case sparqlml::SparqlMlAst::Kind::InsertTrain: return {{"kind", "train"}, {"train", train_json(*o.train)}};
    case sparqlml::SparqlMlAst::Kind::DeleteModel: return {{"kind", "delete"}, {"deleted", o.deleted}};
  }
  return nullptr;
}

}  // namespace kgnet::platform
