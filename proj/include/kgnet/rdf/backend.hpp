#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kgnet/rdf/store.hpp"
#include "kgnet/sparql/query.hpp"

namespace kgnet::rdf {

/// Anything that answers SPARQL: the embedded store or a remote endpoint.
class SparqlBackend {
 public:
  virtual ~SparqlBackend() = default;
  virtual BindingTable select(const std::string& query) = 0;
  virtual std::vector<Triple> construct(const std::string& query) = 0;
  /// Returns the number of affected triples when the backend reports it, else 0.
  virtual std::size_t update(const std::string& update) = 0;
  virtual std::string describe() const = 0;
};

/// Evaluates the supported SPARQL subset directly against a Store.
class EmbeddedBackend : public SparqlBackend {
 public:
  EmbeddedBackend(Store& store, std::string default_graph)
      : store_(store), default_graph_(std::move(default_graph)) {}

  BindingTable select(const std::string& query) override {
    auto q = sparql::parse_query(query);
    if (q.form != sparql::Query::Form::Select) throw UserError("expected a SELECT query");
    return sparql::evaluate(store_, default_graph_, q).table;
  }
  std::vector<Triple> construct(const std::string& query) override {
    auto q = sparql::parse_query(query);
    if (q.form != sparql::Query::Form::Construct) throw UserError("expected a CONSTRUCT query");
    return sparql::evaluate(store_, default_graph_, q).triples;
  }
  std::size_t update(const std::string& update) override {
    auto q = sparql::parse_query(update);
    if (q.form == sparql::Query::Form::Select || q.form == sparql::Query::Form::Construct) {
      throw UserError("expected an update request");
    }
    return sparql::evaluate(store_, default_graph_, q).affected;
  }
  std::string describe() const override { return "embedded:<" + default_graph_ + ">"; }

  Store& store() { return store_; }
  const std::string& default_graph() const { return default_graph_; }

 private:
  Store& store_;
  std::string default_graph_;
};

}  // namespace kgnet::rdf
