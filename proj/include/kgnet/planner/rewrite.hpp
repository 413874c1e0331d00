#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "kgnet/planner/optimizer.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/sparqlml/render.hpp"

namespace kgnet::planner {

/// One user-defined predicate resolved to a model. The executor fills the
/// object column from the model's predictions for the subject column.
struct CallSpec {
  std::size_t group = 0;
  std::string predicate_var;
  std::string subject_var;
  std::string object_var;
  sparqlml::TaskType task_type = sparqlml::TaskType::NodeClassifier;
  std::string model_uri;
  std::string artifact_ref;
  std::size_t top_k = 10;  // LinkPredictor only
  Shape shape = Shape::Dictionary;

  bool operator==(const CallSpec&) const = default;
};

struct ModelBinding {
  std::string model_uri;
  std::string artifact_ref;
};

struct Rewrite {
  std::string query;  // plain SPARQL over the data patterns
  std::vector<std::string> data_variables;
  std::vector<CallSpec> manifest;
};

inline constexpr std::size_t kDefaultTopK = 10;

/// Variables of the result: the projection, or for `*` every data variable
/// followed by the object variables in group order.
inline std::vector<std::string> result_variables(const sparqlml::SparqlMlAst& ast) {
  if (!ast.projection.empty()) return ast.projection;
  std::vector<std::string> out;
  auto add = [&](const rdf::Term& t) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t.value()) == out.end()) out.push_back(t.value());
  };
  for (const auto& p : ast.data_patterns) {
    add(p.subject);
    add(p.predicate);
    add(p.object);
  }
  for (const auto& g : ast.gml_patterns) {
    if (g.object_var && std::find(out.begin(), out.end(), *g.object_var) == out.end()) out.push_back(*g.object_var);
  }
  return out;
}

/// Splits `ast` into a data query and a call manifest. With no user-defined
/// predicates the query is rendered unchanged and the manifest is empty.
inline Rewrite rewrite(const sparqlml::SparqlMlAst& ast, const std::vector<ModelBinding>& models, Shape shape) {
  if (ast.kind != sparqlml::SparqlMlAst::Kind::Select) throw UserError("only SELECT queries can be planned");
  if (models.size() != ast.gml_patterns.size()) throw UserError("rewrite: one model per user-defined predicate");
  sparqlml::SparqlMlAst data = ast;
  data.gml_patterns.clear();
  for (auto it = data.prefixes.begin(); it != data.prefixes.end();) {
    it = it->second.starts_with(rdf::vocab::kKgnet) ? data.prefixes.erase(it) : std::next(it);
  }
  Rewrite out;
  if (ast.gml_patterns.empty()) {
    out.query = sparqlml::render(data);
    out.data_variables = result_variables(data);
    return out;
  }
  std::vector<std::string> objects;
  for (const auto& g : ast.gml_patterns) objects.push_back(*g.object_var);
  auto add = [&](const std::string& v) {
    if (std::find(out.data_variables.begin(), out.data_variables.end(), v) == out.data_variables.end()) {
      out.data_variables.push_back(v);
    }
  };
  for (const auto& g : ast.gml_patterns) add(*g.subject_var);
  for (const auto& v : result_variables(ast)) {
    if (std::find(objects.begin(), objects.end(), v) == objects.end()) add(v);
  }
  data.projection = out.data_variables;
  data.limit.reset();  // applied after the inference join
  out.query = sparqlml::render(data);
  for (std::size_t j = 0; j < ast.gml_patterns.size(); ++j) {
    const auto& g = ast.gml_patterns[j];
    CallSpec c;
    c.group = j;
    c.predicate_var = g.predicate_var;
    c.subject_var = *g.subject_var;
    c.object_var = *g.object_var;
    c.task_type = g.task_type;
    c.model_uri = models[j].model_uri;
    c.artifact_ref = models[j].artifact_ref;
    if (auto k = g.top_k()) c.top_k = static_cast<std::size_t>(*k);
    c.shape = shape;
    out.manifest.push_back(std::move(c));
  }
  return out;
}

}  // namespace kgnet::planner
