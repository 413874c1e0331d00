#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/rdf/term.hpp"

namespace kgnet::rdf {

/// A SPARQL solution sequence. Cells are `std::nullopt` only where a row
/// leaves a variable unbound (union branches, lenient inference joins).
struct BindingTable {
  using Row = std::vector<std::optional<Term>>;

  std::vector<std::string> variables;
  std::vector<Row> rows;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }

  std::optional<std::size_t> column(std::string_view var) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i] == var) return i;
    }
    return std::nullopt;
  }
  std::size_t require_column(std::string_view var) const {
    if (auto c = column(var)) return *c;
    throw UserError("variable ?" + std::string(var) + " is not bound by the result");
  }

  /// Sorts rows lexicographically over the columns in variable order; unbound
  /// cells sort first.
  void sort_rows() { std::sort(rows.begin(), rows.end()); }

  bool operator==(const BindingTable&) const = default;
};

/// In-memory named-graph triple store with subject/predicate/object indexes.
///
/// Readers share a per-graph lock; writers to one graph exclude each other
/// and readers of that graph only.
class Store {
 public:
  Store() = default;
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Adds triples to `graph`, deduplicating; returns the number newly added.
  /// Validation happens before any mutation, so a malformed triple leaves the
  /// graph untouched.
  std::size_t insert(std::string_view graph, std::span<const Triple> triples) {
    check_graph_name(graph);
    for (std::size_t i = 0; i < triples.size(); ++i) {
      try {
        triples[i].validate();
      } catch (const UserError& e) {
        throw UserError("triple #" + std::to_string(i) + " rejected: " + e.what());
      }
    }
    Graph& g = graph_for_write(graph);
    std::unique_lock lock(g.mutex);
    std::size_t added = 0;
    for (const auto& t : triples) {
      auto [it, inserted] = g.triples.insert(t);
      if (!inserted) continue;
      ++added;
      const Triple* p = &*it;
      g.by_subject[t.subject].push_back(p);
      g.by_predicate[t.predicate].push_back(p);
      g.by_object[t.object].push_back(p);
    }
    return added;
  }

  /// Removes the given triples; returns how many were present.
  std::size_t remove(std::string_view graph, std::span<const Triple> triples) {
    Graph* g = find(graph);
    if (g == nullptr) return 0;
    std::unique_lock lock(g->mutex);
    std::size_t removed = 0;
    for (const auto& t : triples) {
      auto it = g->triples.find(t);
      if (it == g->triples.end()) continue;
      const Triple* p = &*it;
      erase_index(g->by_subject, t.subject, p);
      erase_index(g->by_predicate, t.predicate, p);
      erase_index(g->by_object, t.object, p);
      g->triples.erase(it);
      ++removed;
    }
    return removed;
  }

  std::size_t clear(std::string_view graph) {
    Graph* g = find(graph);
    if (g == nullptr) return 0;
    std::unique_lock lock(g->mutex);
    const std::size_t n = g->triples.size();
    g->by_subject.clear();
    g->by_predicate.clear();
    g->by_object.clear();
    g->triples.clear();
    return n;
  }

  std::size_t size(std::string_view graph) const {
    const Graph* g = find(graph);
    if (g == nullptr) return 0;
    std::shared_lock lock(g->mutex);
    return g->triples.size();
  }

  bool contains(std::string_view graph, const Triple& t) const {
    const Graph* g = find(graph);
    if (g == nullptr) return false;
    std::shared_lock lock(g->mutex);
    return g->triples.contains(t);
  }

  /// All triples of `graph` in (subject, predicate, object) order.
  std::vector<Triple> triples(std::string_view graph) const {
    const Graph* g = find(graph);
    if (g == nullptr) return {};
    std::shared_lock lock(g->mutex);
    return {g->triples.begin(), g->triples.end()};
  }

  std::vector<std::string> graph_names() const {
    std::shared_lock lock(graphs_mutex_);
    std::vector<std::string> out;
    for (const auto& [name, g] : graphs_) out.push_back(name);
    return out;
  }

  /// Evaluates a basic graph pattern by backtracking join.
  ///
  /// Result columns are the pattern variables in order of first appearance.
  /// Rows are sorted lexicographically column by column, so the first
  /// variable is the primary sort key. An unknown graph yields an empty table.
  BindingTable match_bgp(std::string_view graph, std::span<const TriplePattern> patterns) const {
    if (patterns.empty()) throw UserError("match_bgp requires at least one triple pattern");
    for (const auto& p : patterns) p.validate();
    BindingTable table;
    for (const auto& p : patterns) {
      for (const Term* t : {&p.subject, &p.predicate, &p.object}) {
        if (t->is_variable() &&
            std::find(table.variables.begin(), table.variables.end(), t->value()) ==
                table.variables.end()) {
          table.variables.push_back(t->value());
        }
      }
    }
    const Graph* g = find(graph);
    if (g == nullptr) return table;
    std::shared_lock lock(g->mutex);

    std::vector<std::optional<Term>> binding(table.variables.size());
    std::vector<bool> used(patterns.size(), false);
    auto var_index = [&](const std::string& name) {
      return static_cast<std::size_t>(
          std::find(table.variables.begin(), table.variables.end(), name) -
          table.variables.begin());
    };
    join(*g, patterns, used, 0, binding, var_index, table.rows);
    table.sort_rows();
    return table;
  }

 private:
  struct Graph {
    mutable std::shared_mutex mutex;
    std::set<Triple> triples;
    std::unordered_map<Term, std::vector<const Triple*>, TermHash> by_subject;
    std::unordered_map<Term, std::vector<const Triple*>, TermHash> by_predicate;
    std::unordered_map<Term, std::vector<const Triple*>, TermHash> by_object;
  };

  static void check_graph_name(std::string_view graph) {
    if (!is_valid_graph_name(graph)) {
      throw UserError("invalid graph name: <" + std::string(graph) + ">");
    }
  }

  static void erase_index(std::unordered_map<Term, std::vector<const Triple*>, TermHash>& index,
                          const Term& key, const Triple* p) {
    auto it = index.find(key);
    if (it == index.end()) return;
    auto& v = it->second;
    v.erase(std::remove(v.begin(), v.end(), p), v.end());
    if (v.empty()) index.erase(it);
  }

  const Graph* find(std::string_view graph) const {
    std::shared_lock lock(graphs_mutex_);
    auto it = graphs_.find(std::string(graph));
    return it == graphs_.end() ? nullptr : it->second.get();
  }
  Graph* find(std::string_view graph) {
    std::shared_lock lock(graphs_mutex_);
    auto it = graphs_.find(std::string(graph));
    return it == graphs_.end() ? nullptr : it->second.get();
  }
  Graph& graph_for_write(std::string_view graph) {
    std::unique_lock lock(graphs_mutex_);
    auto& slot = graphs_[std::string(graph)];
    if (!slot) slot = std::make_unique<Graph>();
    return *slot;
  }

  template <typename VarIndex>
  static const Term* resolve(const Term& t, const std::vector<std::optional<Term>>& binding,
                             VarIndex& var_index) {
    if (!t.is_variable()) return &t;
    const auto& b = binding[var_index(t.value())];
    return b ? &*b : nullptr;
  }

  // Number of positions fixed by constants or already-bound variables.
  template <typename VarIndex>
  static int boundness(const TriplePattern& p, const std::vector<std::optional<Term>>& binding,
                       VarIndex& var_index) {
    int n = 0;
    for (const Term* t : {&p.subject, &p.predicate, &p.object}) {
      if (resolve(*t, binding, var_index) != nullptr) ++n;
    }
    return n;
  }

  template <typename VarIndex>
  static void join(const Graph& g, std::span<const TriplePattern> patterns,
                   std::vector<bool>& used, std::size_t depth,
                   std::vector<std::optional<Term>>& binding, VarIndex& var_index,
                   std::vector<BindingTable::Row>& out) {
    if (depth == patterns.size()) {
      out.push_back(binding);
      return;
    }
    // Greedy: continue with the most constrained remaining pattern.
    std::size_t next = patterns.size();
    int best = -1;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (used[i]) continue;
      const int b = boundness(patterns[i], binding, var_index);
      if (b > best) {
        best = b;
        next = i;
      }
    }
    const TriplePattern& p = patterns[next];
    const Term* s = resolve(p.subject, binding, var_index);
    const Term* pr = resolve(p.predicate, binding, var_index);
    const Term* o = resolve(p.object, binding, var_index);

    auto visit = [&](const Triple& t) {
      if (s && !(*s == t.subject)) return;
      if (pr && !(*pr == t.predicate)) return;
      if (o && !(*o == t.object)) return;
      // Bind fresh variables; repeated variables inside one pattern must agree.
      std::vector<std::size_t> fresh;
      bool ok = true;
      const std::pair<const Term*, const Term*> slots[] = {
          {&p.subject, &t.subject}, {&p.predicate, &t.predicate}, {&p.object, &t.object}};
      for (const auto& [pat, val] : slots) {
        if (!pat->is_variable()) continue;
        auto& cell = binding[var_index(pat->value())];
        if (!cell) {
          cell = *val;
          fresh.push_back(var_index(pat->value()));
        } else if (!(*cell == *val)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        used[next] = true;
        join(g, patterns, used, depth + 1, binding, var_index, out);
        used[next] = false;
      }
      for (auto idx : fresh) binding[idx].reset();
    };

    const std::vector<const Triple*>* candidates = nullptr;
    auto pick = [&](const auto& index, const Term* key) {
      if (key == nullptr) return;
      auto it = index.find(*key);
      static const std::vector<const Triple*> kEmpty;
      const auto* v = it == index.end() ? &kEmpty : &it->second;
      if (candidates == nullptr || v->size() < candidates->size()) candidates = v;
    };
    pick(g.by_subject, s);
    pick(g.by_predicate, pr);
    pick(g.by_object, o);
    if (candidates != nullptr) {
      for (const Triple* t : *candidates) visit(*t);
    } else {
      for (const Triple& t : g.triples) visit(t);
    }
  }

  mutable std::shared_mutex graphs_mutex_;
  std::map<std::string, std::unique_ptr<Graph>> graphs_;
};

}  // namespace kgnet::rdf
