#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/rdf/store.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparql/lexer.hpp"

namespace kgnet::sparql {

/// Plain SPARQL subset understood by the embedded store: SELECT and
/// CONSTRUCT over a basic graph pattern or a UNION of them, COUNT
/// aggregates, LIMIT/OFFSET, INSERT DATA, DELETE DATA and DELETE WHERE.
struct Query {
  enum class Form { Select, Construct, InsertData, DeleteData, DeleteWhere };

  struct Count {
    std::optional<std::string> var;  // nullopt means COUNT(*)
    bool distinct = false;
    std::string alias;
  };

  Form form = Form::Select;
  PrefixMap prefixes;
  bool distinct = false;
  std::vector<std::string> projection;  // empty means '*'
  std::optional<Count> count;
  std::optional<std::string> from;
  std::vector<std::vector<rdf::TriplePattern>> branches;  // UNION of BGPs
  std::vector<rdf::TriplePattern> construct_template;
  std::optional<std::size_t> limit;
  std::optional<std::size_t> offset;
  std::optional<std::string> graph;  // GRAPH <g> wrapper of update forms
  std::vector<rdf::Triple> data;     // INSERT DATA / DELETE DATA payload
};

namespace detail {

inline std::size_t parse_count_value(Lexer& lex) {
  Token t = lex.next();
  if (t.kind != TokenKind::Integer || t.text.front() == '-' || t.text.front() == '+') {
    lex.fail("expected a non-negative integer", t);
  }
  try {
    return static_cast<std::size_t>(std::stoull(t.text));
  } catch (const std::exception&) {
    lex.fail("integer out of range", t);
  }
}

inline std::vector<rdf::TriplePattern> parse_group(Lexer& lex, const PrefixMap& prefixes) {
  expect_punct(lex, '{');
  std::vector<rdf::TriplePattern> out;
  parse_triples_block(lex, prefixes, [&](rdf::TriplePattern p) {
    try {
      p.validate();
    } catch (const UserError& e) {
      lex.fail_here(e.what());
    }
    out.push_back(std::move(p));
  });
  expect_punct(lex, '}');
  return out;
}

// WHERE body: `{ bgp }` or `{ {bgp} UNION {bgp} ... }`.
inline std::vector<std::vector<rdf::TriplePattern>> parse_where(Lexer& lex,
                                                                const PrefixMap& prefixes) {
  if (lex.peek().is_word("WHERE")) lex.next();
  expect_punct(lex, '{');
  std::vector<std::vector<rdf::TriplePattern>> branches;
  if (lex.peek().is_punct('{')) {
    branches.push_back(parse_group(lex, prefixes));
    while (lex.peek().is_word("UNION")) {
      lex.next();
      branches.push_back(parse_group(lex, prefixes));
    }
    if (lex.peek().is_punct('.')) lex.next();
  } else {
    std::vector<rdf::TriplePattern> bgp;
    parse_triples_block(lex, prefixes, [&](rdf::TriplePattern p) {
      try {
        p.validate();
      } catch (const UserError& e) {
        lex.fail_here(e.what());
      }
      bgp.push_back(std::move(p));
    });
    branches.push_back(std::move(bgp));
  }
  expect_punct(lex, '}');
  for (const auto& b : branches) {
    if (b.empty()) lex.fail_here("empty graph pattern");
  }
  return branches;
}

inline void parse_modifiers(Lexer& lex, Query& q) {
  while (true) {
    const Token& t = lex.peek();
    if (t.is_word("LIMIT")) {
      lex.next();
      q.limit = parse_count_value(lex);
    } else if (t.is_word("OFFSET")) {
      lex.next();
      q.offset = parse_count_value(lex);
    } else {
      break;
    }
  }
}

inline std::string parse_graph_iri(Lexer& lex, const PrefixMap& prefixes) {
  Token t = lex.next();
  if (t.kind == TokenKind::IriRef) return t.text;
  if (t.kind == TokenKind::PrefixedName) return expand_prefixed(prefixes, t.text, &lex, &t);
  lex.fail("expected graph IRI", t);
}

// Ground triples, optionally wrapped in GRAPH <g> { ... }.
inline void parse_data_block(Lexer& lex, Query& q) {
  expect_punct(lex, '{');
  bool wrapped = false;
  if (lex.peek().is_word("GRAPH")) {
    lex.next();
    q.graph = parse_graph_iri(lex, q.prefixes);
    expect_punct(lex, '{');
    wrapped = true;
  }
  parse_triples_block(lex, q.prefixes, [&](const rdf::TriplePattern& p) {
    rdf::Triple t{p.subject, p.predicate, p.object};
    if (p.subject.is_variable() || p.predicate.is_variable() || p.object.is_variable()) {
      lex.fail_here("variables are not allowed in DATA blocks");
    }
    try {
      t.validate();
    } catch (const UserError& e) {
      lex.fail_here(e.what());
    }
    q.data.push_back(std::move(t));
  });
  expect_punct(lex, '}');
  if (wrapped) expect_punct(lex, '}');
}

}  // namespace detail

inline Query parse_query(std::string_view text) {
  Lexer lex(text);
  Query q;
  q.prefixes = parse_prologue(lex);
  Token head = lex.next();

  if (head.is_word("SELECT")) {
    q.form = Query::Form::Select;
    if (lex.peek().is_word("DISTINCT")) {
      lex.next();
      q.distinct = true;
    }
    if (lex.peek().is_punct('*')) {
      lex.next();
    } else if (lex.peek().is_punct('(')) {
      lex.next();
      expect_word(lex, "COUNT");
      expect_punct(lex, '(');
      Query::Count c;
      if (lex.peek().is_word("DISTINCT")) {
        lex.next();
        c.distinct = true;
      }
      Token v = lex.next();
      if (v.kind == TokenKind::Var) {
        c.var = v.text;
      } else if (!v.is_punct('*')) {
        lex.fail("expected variable or '*' in COUNT", v);
      }
      expect_punct(lex, ')');
      expect_word(lex, "AS");
      Token alias = lex.next();
      if (alias.kind != TokenKind::Var) lex.fail("expected alias variable", alias);
      c.alias = alias.text;
      expect_punct(lex, ')');
      q.count = std::move(c);
    } else {
      while (lex.peek().kind == TokenKind::Var) q.projection.push_back(lex.next().text);
      if (q.projection.empty()) lex.fail("expected projection", lex.peek());
    }
    if (lex.peek().is_word("FROM")) {
      lex.next();
      q.from = detail::parse_graph_iri(lex, q.prefixes);
    }
    q.branches = detail::parse_where(lex, q.prefixes);
    detail::parse_modifiers(lex, q);
  } else if (head.is_word("CONSTRUCT")) {
    q.form = Query::Form::Construct;
    expect_punct(lex, '{');
    parse_triples_block(lex, q.prefixes,
                        [&](rdf::TriplePattern p) { q.construct_template.push_back(std::move(p)); });
    expect_punct(lex, '}');
    if (lex.peek().is_word("FROM")) {
      lex.next();
      q.from = detail::parse_graph_iri(lex, q.prefixes);
    }
    q.branches = detail::parse_where(lex, q.prefixes);
    detail::parse_modifiers(lex, q);
  } else if (head.is_word("INSERT")) {
    expect_word(lex, "DATA");
    q.form = Query::Form::InsertData;
    detail::parse_data_block(lex, q);
  } else if (head.is_word("DELETE")) {
    if (lex.peek().is_word("DATA")) {
      lex.next();
      q.form = Query::Form::DeleteData;
      detail::parse_data_block(lex, q);
    } else {
      expect_word(lex, "WHERE");
      q.form = Query::Form::DeleteWhere;
      expect_punct(lex, '{');
      bool wrapped = false;
      if (lex.peek().is_word("GRAPH")) {
        lex.next();
        q.graph = detail::parse_graph_iri(lex, q.prefixes);
        expect_punct(lex, '{');
        wrapped = true;
      }
      std::vector<rdf::TriplePattern> bgp;
      parse_triples_block(lex, q.prefixes, [&](rdf::TriplePattern p) { bgp.push_back(std::move(p)); });
      expect_punct(lex, '}');
      if (wrapped) expect_punct(lex, '}');
      if (bgp.empty()) lex.fail_here("empty DELETE WHERE pattern");
      q.branches.push_back(std::move(bgp));
    }
  } else {
    lex.fail(head.kind == TokenKind::End ? "empty query" : "unsupported query form '" + head.text + "'",
             head);
  }
  if (lex.peek().is_punct(';')) lex.next();
  Token end = lex.next();
  if (end.kind != TokenKind::End) lex.fail("unexpected '" + end.text + "' after query", end);
  return q;
}

/// Outcome of evaluating a Query against a Store.
struct QueryResult {
  rdf::BindingTable table;          // Select
  std::vector<rdf::Triple> triples;  // Construct
  std::size_t affected = 0;          // update forms
};

namespace detail {

inline rdf::BindingTable eval_union(const rdf::Store& store, std::string_view graph,
                                    const std::vector<std::vector<rdf::TriplePattern>>& branches) {
  if (branches.size() == 1) return store.match_bgp(graph, branches.front());
  rdf::BindingTable out;
  std::vector<rdf::BindingTable> parts;
  for (const auto& b : branches) {
    parts.push_back(store.match_bgp(graph, b));
    for (const auto& v : parts.back().variables) {
      if (!out.column(v)) out.variables.push_back(v);
    }
  }
  for (const auto& part : parts) {
    std::vector<std::size_t> map;
    for (const auto& v : part.variables) map.push_back(*out.column(v));
    for (const auto& row : part.rows) {
      rdf::BindingTable::Row r(out.variables.size());
      for (std::size_t i = 0; i < row.size(); ++i) r[map[i]] = row[i];
      out.rows.push_back(std::move(r));
    }
  }
  out.sort_rows();
  return out;
}

template <typename T>
void slice(std::vector<T>& v, std::optional<std::size_t> offset, std::optional<std::size_t> limit) {
  const std::size_t off = std::min(offset.value_or(0), v.size());
  v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(off));
  if (limit && *limit < v.size()) v.resize(*limit);
}

}  // namespace detail

/// Evaluates `q` against `store`. Queries without FROM (and updates without
/// GRAPH) address `default_graph`. SELECT rows are sorted term-wise by the
/// projected columns in order; CONSTRUCT output keeps first occurrence order.
inline QueryResult evaluate(rdf::Store& store, std::string_view default_graph, const Query& q) {
  QueryResult result;
  const std::string graph = q.from ? *q.from : q.graph ? *q.graph : std::string(default_graph);
  switch (q.form) {
    case Query::Form::Select: {
      rdf::BindingTable all = detail::eval_union(store, graph, q.branches);
      if (q.count) {
        std::size_t n = 0;
        if (!q.count->var) {
          n = all.size();
        } else if (auto col = all.column(*q.count->var)) {
          if (q.count->distinct) {
            std::set<rdf::Term> seen;
            for (const auto& row : all.rows) {
              if (row[*col]) seen.insert(*row[*col]);
            }
            n = seen.size();
          } else {
            for (const auto& row : all.rows) n += row[*col] ? 1 : 0;
          }
        }
        result.table.variables = {q.count->alias};
        result.table.rows.push_back({rdf::Term::integer(static_cast<long long>(n))});
        return result;
      }
      rdf::BindingTable& out = result.table;
      out.variables = q.projection.empty() ? all.variables : q.projection;
      std::vector<std::optional<std::size_t>> cols;
      for (const auto& v : out.variables) cols.push_back(all.column(v));
      for (const auto& row : all.rows) {
        rdf::BindingTable::Row r;
        r.reserve(cols.size());
        for (const auto& c : cols) r.push_back(c ? row[*c] : std::nullopt);
        out.rows.push_back(std::move(r));
      }
      out.sort_rows();
      if (q.distinct) out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
      detail::slice(out.rows, q.offset, q.limit);
      return result;
    }
    case Query::Form::Construct: {
      rdf::BindingTable all = detail::eval_union(store, graph, q.branches);
      detail::slice(all.rows, q.offset, q.limit);
      std::set<rdf::Triple> seen;
      for (const auto& row : all.rows) {
        for (const auto& tp : q.construct_template) {
          auto bind = [&](const rdf::Term& t) -> std::optional<rdf::Term> {
            if (!t.is_variable()) return t;
            auto c = all.column(t.value());
            return c ? row[*c] : std::nullopt;
          };
          auto s = bind(tp.subject), p = bind(tp.predicate), o = bind(tp.object);
          if (!s || !p || !o) continue;
          rdf::Triple t{*s, *p, *o};
          if (!t.valid()) continue;
          if (seen.insert(t).second) result.triples.push_back(std::move(t));
        }
      }
      return result;
    }
    case Query::Form::InsertData:
      result.affected = store.insert(graph, q.data);
      return result;
    case Query::Form::DeleteData:
      result.affected = store.remove(graph, q.data);
      return result;
    case Query::Form::DeleteWhere: {
      rdf::BindingTable all = store.match_bgp(graph, q.branches.front());
      std::vector<rdf::Triple> doomed;
      for (const auto& row : all.rows) {
        for (const auto& tp : q.branches.front()) {
          auto bind = [&](const rdf::Term& t) {
            return t.is_variable() ? *row[*all.column(t.value())] : t;
          };
          doomed.push_back({bind(tp.subject), bind(tp.predicate), bind(tp.object)});
        }
      }
      result.affected = store.remove(graph, doomed);
      return result;
    }
  }
  return result;
}

}  // namespace kgnet::sparql
