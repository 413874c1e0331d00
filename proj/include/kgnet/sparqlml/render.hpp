#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/sparqlml/parser.hpp"
#include "kgnet/sparqlml/train_spec.hpp"

namespace kgnet::sparqlml {

namespace detail {

inline bool safe_local(std::string_view local) {
  if (local.empty()) return false;
  return std::all_of(local.begin(), local.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

inline std::string render_term(const rdf::Term& t, const sparql::PrefixMap& prefixes) {
  if (t.is_iri()) {
    if (t == rdf::rdf_type()) return "a";
    // Longest matching namespace wins; ties go to the smaller prefix name.
    const std::string* best_prefix = nullptr;
    std::size_t best_len = 0;
    for (const auto& [prefix, ns] : prefixes) {
      if (ns.empty() || !t.value().starts_with(ns) || ns.size() <= best_len) continue;
      if (!safe_local(std::string_view(t.value()).substr(ns.size()))) continue;
      best_prefix = &prefix;
      best_len = ns.size();
    }
    if (best_prefix != nullptr) return *best_prefix + ":" + t.value().substr(best_len);
    return t.to_string();
  }
  if (t.is_literal() && t.datatype() == rdf::vocab::kXsdInteger) {
    const std::string& s = t.value();
    if (!s.empty() && std::all_of(s.begin(), s.end(), ::isdigit) && (s.size() == 1 || s[0] != '0')) {
      return s;
    }
  }
  if (t.is_literal() && !t.datatype().empty()) {
    return "\"" + rdf::escape_literal(t.value()) + "\"^^" +
           render_term(rdf::Term::iri(t.datatype()), prefixes);
  }
  return t.to_string();
}

inline std::string render_pattern(const rdf::TriplePattern& p, const sparql::PrefixMap& prefixes) {
  return render_term(p.subject, prefixes) + " " + render_term(p.predicate, prefixes) + " " +
         render_term(p.object, prefixes) + " .";
}

inline std::string render_prologue(const sparql::PrefixMap& prefixes) {
  std::string out;
  for (const auto& [prefix, ns] : prefixes) out += "PREFIX " + prefix + ": <" + ns + ">\n";
  return out;
}

}  // namespace detail

/// Canonical text of an AST; parse(render(ast)) == ast.
inline std::string render(const SparqlMlAst& ast) {
  std::string out = detail::render_prologue(ast.prefixes);
  switch (ast.kind) {
    case SparqlMlAst::Kind::Select: {
      out += "SELECT ";
      if (ast.distinct) out += "DISTINCT ";
      if (ast.projection.empty()) {
        out += "*";
      } else {
        for (std::size_t i = 0; i < ast.projection.size(); ++i) {
          out += (i ? " ?" : "?") + ast.projection[i];
        }
      }
      out += "\nWHERE {\n";
      for (const auto& p : ast.data_patterns) out += "  " + detail::render_pattern(p, ast.prefixes) + "\n";
      for (const auto& g : ast.gml_patterns) {
        for (const auto& p : flatten(g)) out += "  " + detail::render_pattern(p, ast.prefixes) + "\n";
      }
      out += "}";
      if (ast.limit) out += "\nLIMIT " + std::to_string(*ast.limit);
      out += "\n";
      return out;
    }
    case SparqlMlAst::Kind::InsertTrain: {
      out += "INSERT ";
      if (ast.target_graph) out += "INTO <" + *ast.target_graph + "> ";
      out += "{ ?s ?p ?o }\nWHERE { SELECT * FROM TrainGML(";
      out += ast.train_payload ? to_json(*ast.train_payload).dump() : std::string("{}");
      out += ") }\n";
      return out;
    }
    case SparqlMlAst::Kind::DeleteModel: {
      out += "DELETE {";
      for (std::size_t i = 0; i < ast.gml_patterns.size(); ++i) {
        const std::string& v = ast.gml_patterns[i].predicate_var;
        out += " ?" + v + " ?p" + std::to_string(i) + " ?o" + std::to_string(i) + " .";
      }
      out += " }\nWHERE {\n";
      for (const auto& g : ast.gml_patterns) {
        for (const auto& p : flatten(g)) out += "  " + detail::render_pattern(p, ast.prefixes) + "\n";
      }
      out += "}\n";
      return out;
    }
  }
  return out;
}

}  // namespace kgnet::sparqlml
