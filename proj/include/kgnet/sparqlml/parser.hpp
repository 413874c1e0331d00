#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparql/lexer.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/sparqlml/train_spec.hpp"

namespace kgnet::sparqlml {

/// The triples a group stands for, in canonical order: application triple,
/// type declaration, then constraints by key.
inline std::vector<rdf::TriplePattern> flatten(const UdpGroup& g) {
  std::vector<rdf::TriplePattern> out;
  const rdf::Term pv = rdf::Term::variable(g.predicate_var);
  if (g.subject_var && g.object_var) {
    out.push_back({rdf::Term::variable(*g.subject_var), pv, rdf::Term::variable(*g.object_var)});
  }
  out.push_back({pv, rdf::rdf_type(), task_class(g.task_type)});
  for (const auto& [key, value] : g.constraints) out.push_back({pv, constraint_predicate(key), value});
  return out;
}

namespace detail {

inline std::string describe(const rdf::TriplePattern& p) {
  return p.subject.to_string() + " " + p.predicate.to_string() + " " + p.object.to_string();
}

inline bool is_positive_integer_literal(const rdf::Term& t) {
  if (!t.is_literal() || t.datatype() != rdf::vocab::kXsdInteger) return false;
  const std::string& s = t.value();
  if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), ::isdigit)) return false;
  return std::stoll(s) > 0;
}

inline void check_group(const UdpGroup& g) {
  using K = ConstraintKey;
  std::set<K> required, allowed;
  switch (g.task_type) {
    case TaskType::NodeClassifier:
      required = {K::TargetNode, K::NodeLabel};
      allowed = required;
      break;
    case TaskType::LinkPredictor:
      required = {K::SourceNode, K::DestinationNode};
      allowed = {K::SourceNode, K::DestinationNode, K::TopK};
      break;
    case TaskType::NodeSimilarity:
      required = {K::TargetNode};
      allowed = {K::TargetNode, K::TopK};
      break;
  }
  const std::string who = "?" + g.predicate_var + " (kgnet:" + std::string(to_string(g.task_type)) + ")";
  for (K k : required) {
    if (!g.constraints.contains(k)) {
      throw SemanticError("incomplete user-defined predicate " + who + ": missing kgnet:" +
                          std::string(to_string(k)));
    }
  }
  for (const auto& [k, v] : g.constraints) {
    if (!allowed.contains(k)) {
      throw SemanticError("kgnet:" + std::string(to_string(k)) + " does not apply to " + who);
    }
    if (k == K::TopK) {
      if (!is_positive_integer_literal(v)) {
        throw SemanticError("kgnet:TopK of " + who + " must be a positive integer, got " +
                            v.to_string());
      }
    } else if (!v.is_iri()) {
      throw SemanticError("kgnet:" + std::string(to_string(k)) + " of " + who +
                          " must be an IRI, got " + v.to_string());
    }
  }
}

struct Classified {
  std::vector<rdf::TriplePattern> data;
  std::vector<UdpGroup> groups;
};

inline Classified classify(const std::vector<rdf::TriplePattern>& patterns) {
  // Pass 1: user-defined predicate variables and their first appearance.
  std::map<std::string, TaskType> udp;
  for (const auto& p : patterns) {
    if (!p.subject.is_variable() || p.predicate != rdf::rdf_type() ||
        !in_kgnet_namespace(p.object)) {
      continue;
    }
    const std::string local = p.object.value().substr(rdf::vocab::kKgnet.size());
    auto task = task_type_from_name(local);
    if (!task || local != to_string(*task)) {
      throw SemanticError("unknown kgnet task type 'kgnet:" + local + "'");
    }
    auto [it, fresh] = udp.emplace(p.subject.value(), *task);
    if (!fresh && it->second != *task) {
      throw SemanticError("?" + p.subject.value() + " is declared with two task types");
    }
  }
  std::vector<std::string> order;
  auto note = [&](const rdf::Term& t) {
    if (t.is_variable() && udp.contains(t.value()) &&
        std::find(order.begin(), order.end(), t.value()) == order.end()) {
      order.push_back(t.value());
    }
  };
  for (const auto& p : patterns) {
    note(p.subject);
    note(p.predicate);
  }

  Classified out;
  std::map<std::string, UdpGroup> groups;
  std::set<rdf::TriplePattern> seen_gml;
  for (const auto& v : order) {
    UdpGroup g;
    g.predicate_var = v;
    g.task_type = udp.at(v);
    groups.emplace(v, std::move(g));
  }
  auto is_udp = [&](const rdf::Term& t) { return t.is_variable() && udp.contains(t.value()); };

  for (const auto& p : patterns) {
    if (is_udp(p.subject)) {
      if (!seen_gml.insert(p).second) {
        throw SemanticError("duplicate triple pattern " + describe(p));
      }
      UdpGroup& g = groups.at(p.subject.value());
      if (p.predicate == rdf::rdf_type() && in_kgnet_namespace(p.object)) continue;
      if (!in_kgnet_namespace(p.predicate)) {
        throw SemanticError("unsupported property on user-defined predicate: " + describe(p));
      }
      const std::string local = p.predicate.value().substr(rdf::vocab::kKgnet.size());
      auto key = constraint_key_from_local(local);
      if (!key) throw SemanticError("unknown constraint kgnet:" + local + " in " + describe(p));
      if (!g.constraints.emplace(*key, p.object).second) {
        throw SemanticError("constraint kgnet:" + std::string(to_string(*key)) +
                            " given twice for ?" + g.predicate_var);
      }
    } else if (is_udp(p.predicate)) {
      UdpGroup& g = groups.at(p.predicate.value());
      if (g.subject_var) {
        throw SemanticError("user-defined predicate ?" + g.predicate_var +
                            " occurs in more than one triple pattern");
      }
      if (!p.subject.is_variable() || !p.object.is_variable() || is_udp(p.object)) {
        throw SemanticError("user-defined predicate ?" + g.predicate_var +
                            " must connect two plain variables: " + describe(p));
      }
      g.subject_var = p.subject.value();
      g.object_var = p.object.value();
    } else if (is_udp(p.object)) {
      throw SemanticError("user-defined predicate used as an object: " + describe(p));
    } else {
      for (const rdf::Term* t : {&p.subject, &p.predicate, &p.object}) {
        if (in_kgnet_namespace(*t) ||
            (t->is_literal() && t->datatype().starts_with(rdf::vocab::kKgnet))) {
          throw SemanticError("pattern uses the kgnet: vocabulary outside a user-defined predicate "
                              "(missing '?x a kgnet:<TaskType>'?): " + describe(p));
        }
      }
      out.data.push_back(p);
    }
  }
  for (const auto& v : order) {
    check_group(groups.at(v));
    out.groups.push_back(std::move(groups.at(v)));
  }
  return out;
}

inline std::vector<rdf::TriplePattern> parse_where_block(sparql::Lexer& lex,
                                                         const sparql::PrefixMap& prefixes) {
  if (lex.peek().is_word("WHERE")) lex.next();
  sparql::expect_punct(lex, '{');
  std::vector<rdf::TriplePattern> patterns;
  sparql::parse_triples_block(lex, prefixes, [&](rdf::TriplePattern p) {
    try {
      p.validate();
    } catch (const UserError& e) {
      lex.fail_here(e.what());
    }
    patterns.push_back(std::move(p));
  });
  sparql::expect_punct(lex, '}');
  return patterns;
}

// Skips a balanced `{ ... }` whose contents are not interpreted.
inline void skip_braced(sparql::Lexer& lex) {
  sparql::expect_punct(lex, '{');
  int depth = 1;
  while (depth > 0) {
    sparql::Token t = lex.next();
    if (t.kind == sparql::TokenKind::End) lex.fail("unbalanced '{'", t);
    if (t.is_punct('{')) ++depth;
    if (t.is_punct('}')) --depth;
  }
}

// Returns the raw text of a balanced JSON-like object starting at `open`.
inline std::string capture_object(sparql::Lexer& lex, const sparql::Token& open) {
  const std::string_view text = lex.text();
  std::size_t i = open.offset;
  int depth = 0;
  char quote = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) break;
  }
  if (i >= text.size()) lex.fail("unterminated TrainGML payload", open);
  lex.seek(i + 1);
  return std::string(text.substr(open.offset, i + 1 - open.offset));
}

inline bool is_train_call(const sparql::Token& t) {
  if (t.kind != sparql::TokenKind::Word && t.kind != sparql::TokenKind::PrefixedName &&
      t.kind != sparql::TokenKind::IriRef) {
    return false;
  }
  const std::string& s = t.text;
  return s == "TrainGML" || s.ends_with(":TrainGML") || s.ends_with(".TrainGML") ||
         s.ends_with("/TrainGML");
}

inline std::string graph_name(sparql::Lexer& lex, const sparql::PrefixMap& prefixes) {
  sparql::Token t = lex.next();
  if (t.kind == sparql::TokenKind::IriRef) return t.text;
  if (t.kind == sparql::TokenKind::PrefixedName) {
    return sparql::expand_prefixed(prefixes, t.text, &lex, &t);
  }
  lex.fail("expected graph IRI", t);
}

}  // namespace detail

/// Parses SELECT, INSERT (TrainGML) and DELETE queries of the dialect.
inline SparqlMlAst parse(std::string_view text) {
  sparql::Lexer lex(text);
  SparqlMlAst ast;
  ast.prefixes = sparql::parse_prologue(lex);
  sparql::Token head = lex.next();

  if (head.is_word("SELECT")) {
    ast.kind = SparqlMlAst::Kind::Select;
    if (lex.peek().is_word("DISTINCT")) {
      lex.next();
      ast.distinct = true;
    }
    if (lex.peek().is_punct('*')) {
      lex.next();
    } else {
      while (lex.peek().kind == sparql::TokenKind::Var) ast.projection.push_back(lex.next().text);
      if (ast.projection.empty()) lex.fail("expected projection variables or '*'", lex.peek());
    }
    auto patterns = detail::parse_where_block(lex, ast.prefixes);
    if (patterns.empty()) lex.fail_here("empty WHERE clause");
    if (lex.peek().is_word("LIMIT")) {
      lex.next();
      sparql::Token n = lex.next();
      if (n.kind != sparql::TokenKind::Integer || n.text.front() == '-' || n.text.front() == '+') {
        lex.fail("expected a non-negative integer after LIMIT", n);
      }
      ast.limit = static_cast<std::size_t>(std::stoull(n.text));
    }
    auto c = detail::classify(patterns);
    ast.data_patterns = std::move(c.data);
    ast.gml_patterns = std::move(c.groups);

    std::set<std::string> data_vars;
    for (const auto& p : ast.data_patterns) {
      for (const rdf::Term* t : {&p.subject, &p.predicate, &p.object}) {
        if (t->is_variable()) data_vars.insert(t->value());
      }
    }
    std::set<std::string> object_vars;
    for (const auto& g : ast.gml_patterns) {
      if (!g.subject_var) {
        throw SemanticError("user-defined predicate ?" + g.predicate_var +
                            " is never applied (expected '?s ?" + g.predicate_var + " ?o')");
      }
      if (data_vars.contains(*g.object_var)) {
        throw SemanticError("predicted variable ?" + *g.object_var +
                            " must not also occur in data patterns");
      }
      if (!data_vars.contains(*g.subject_var)) {
        throw SemanticError("subject ?" + *g.subject_var + " of ?" + g.predicate_var +
                            " is not bound by any data pattern");
      }
      if (!object_vars.insert(*g.object_var).second) {
        throw SemanticError("?" + *g.object_var + " is predicted by two user-defined predicates");
      }
    }
    for (const auto& v : ast.projection) {
      if (!data_vars.contains(v) && !object_vars.contains(v)) {
        throw SemanticError("projected variable ?" + v + " is not bound by the query");
      }
    }
  } else if (head.is_word("INSERT")) {
    ast.kind = SparqlMlAst::Kind::InsertTrain;
    if (lex.peek().is_word("INTO")) {
      lex.next();
      if (lex.peek().is_word("GRAPH")) lex.next();
      ast.target_graph = detail::graph_name(lex, ast.prefixes);
    }
    if (lex.peek().is_punct('{')) detail::skip_braced(lex);
    sparql::expect_word(lex, "WHERE");
    sparql::expect_punct(lex, '{');
    if (lex.peek().is_punct('{')) {
      lex.next();  // optional sub-select braces
    }
    sparql::expect_word(lex, "SELECT");
    sparql::expect_punct(lex, '*');
    sparql::expect_word(lex, "FROM");
    bool call_parens = false;
    if (detail::is_train_call(lex.peek())) {
      lex.next();
      sparql::expect_punct(lex, '(');
      call_parens = true;
    } else if (!lex.peek().is_punct('{')) {
      lex.fail("expected TrainGML(...) call", lex.peek());
    }
    sparql::Token open = lex.peek();
    if (!open.is_punct('{')) lex.fail("expected '{' opening the TrainGML payload", open);
    const std::string payload = detail::capture_object(lex, open);
    try {
      ast.train_payload = parse_train_json(payload, ast.prefixes);
    } catch (const ParseError&) {
      throw;
    } catch (const UserError& e) {
      lex.fail(e.what(), open);
    }
    if (call_parens) sparql::expect_punct(lex, ')');
    while (lex.peek().is_punct('}')) lex.next();
  } else if (head.is_word("DELETE")) {
    ast.kind = SparqlMlAst::Kind::DeleteModel;
    if (lex.peek().is_punct('{')) detail::skip_braced(lex);
    if (!lex.peek().is_word("WHERE")) lex.fail("expected WHERE", lex.peek());
    auto patterns = detail::parse_where_block(lex, ast.prefixes);
    auto c = detail::classify(patterns);
    if (!c.data.empty()) {
      throw SemanticError("DELETE accepts only model descriptions; found data pattern " +
                          detail::describe(c.data.front()));
    }
    if (c.groups.empty()) throw SemanticError("DELETE names no model (expected '?m a kgnet:<TaskType>')");
    for (const auto& g : c.groups) {
      if (g.subject_var) {
        throw SemanticError("DELETE must not apply user-defined predicate ?" + g.predicate_var);
      }
    }
    ast.gml_patterns = std::move(c.groups);
  } else {
    lex.fail(head.kind == sparql::TokenKind::End ? "empty query"
                                                 : "expected SELECT, INSERT or DELETE",
             head);
  }
  sparql::Token end = lex.next();
  if (end.kind != sparql::TokenKind::End) lex.fail("unexpected '" + end.text + "'", end);
  return ast;
}

}  // namespace kgnet::sparqlml
