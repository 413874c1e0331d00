#pragma once

#include <string>

#include <json.hpp>

#include "kgnet/error.hpp"
#include "kgnet/rdf/store.hpp"
#include "kgnet/rdf/term.hpp"

namespace kgnet::rdf {

/// A term as a SPARQL 1.1 JSON results object.
inline nlohmann::json term_to_json(const Term& t) {
  nlohmann::json j;
  switch (t.kind()) {
    case Term::Kind::Iri:
      j["type"] = "uri";
      j["value"] = t.value();
      break;
    case Term::Kind::Blank:
      j["type"] = "bnode";
      j["value"] = t.value();
      break;
    case Term::Kind::Literal:
      j["type"] = "literal";
      j["value"] = t.value();
      if (!t.lang().empty()) j["xml:lang"] = t.lang();
      if (!t.datatype().empty()) j["datatype"] = t.datatype();
      break;
    case Term::Kind::Variable:
      throw UserError("variables cannot be serialized as result terms");
  }
  return j;
}

inline Term term_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.contains("value") || !j["type"].is_string() ||
      !j["value"].is_string()) {
    throw UserError("malformed RDF term object");
  }
  const std::string type = j["type"].get<std::string>();
  std::string value = j["value"].get<std::string>();
  if (type == "uri") return Term::iri(std::move(value));
  if (type == "bnode") return Term::blank(std::move(value));
  if (type == "literal" || type == "typed-literal") {
    std::string lang = j.value("xml:lang", std::string());
    std::string dt = j.value("datatype", std::string());
    return Term::literal(std::move(value), std::move(dt), std::move(lang));
  }
  throw UserError("unknown RDF term type '" + type + "'");
}

inline nlohmann::json bindings_to_json(const BindingTable& table) {
  nlohmann::json j;
  j["head"]["vars"] = table.variables;
  auto& rows = j["results"]["bindings"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json b = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i]) b[table.variables[i]] = term_to_json(*row[i]);
    }
    rows.push_back(std::move(b));
  }
  return j;
}

/// Decodes `application/sparql-results+json`. Row order is preserved.
inline BindingTable bindings_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("head") || !j.contains("results")) {
    throw UserError("SPARQL JSON results lack 'head' or 'results'");
  }
  BindingTable table;
  for (const auto& v : j["head"].value("vars", nlohmann::json::array())) {
    table.variables.push_back(v.get<std::string>());
  }
  const auto& bindings = j["results"].at("bindings");
  if (!bindings.is_array()) throw UserError("'results.bindings' is not an array");
  for (const auto& b : bindings) {
    BindingTable::Row row(table.variables.size());
    for (const auto& [name, term] : b.items()) {
      auto col = table.column(name);
      if (!col) throw UserError("binding for undeclared variable ?" + name);
      row[*col] = term_from_json(term);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string bindings_to_csv(const BindingTable& table) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string out;
  for (std::size_t i = 0; i < table.variables.size(); ++i) {
    if (i) out += ',';
    out += quote(table.variables[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i]) out += quote(row[i]->value());
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace kgnet::rdf
