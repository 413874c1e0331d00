#pragma once

#include <chrono>
#include <string>
#include <variant>
#include <vector>

#include "kgnet/net/http.hpp"
#include "kgnet/rdf/backend.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/rdf/results_json.hpp"

namespace kgnet::net {

/// Failure talking to a SPARQL endpoint. Carries the endpoint URL and the
/// request text.
class RemoteError : public BackendError {
 public:
  enum class Kind { Connection, Http, Malformed, Timeout };

  RemoteError(Kind kind, std::string endpoint, std::string query, const std::string& detail,
              int status = 0)
      : BackendError(kind_name(kind) + " error from " + endpoint + ": " + detail),
        kind_(kind),
        endpoint_(std::move(endpoint)),
        query_(std::move(query)),
        status_(status) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& endpoint() const noexcept { return endpoint_; }
  const std::string& query() const noexcept { return query_; }
  int status() const noexcept { return status_; }

  static std::string kind_name(Kind k) {
    switch (k) {
      case Kind::Connection: return "connection";
      case Kind::Http: return "HTTP";
      case Kind::Malformed: return "malformed-response";
      case Kind::Timeout: return "timeout";
    }
    return "remote";
  }

 private:
  Kind kind_;
  std::string endpoint_;
  std::string query_;
  int status_;
};

/// SPARQL 1.1 Protocol client (POST, form-encoded). Stateless and reentrant:
/// each call opens its own connection.
class SparqlClient : public rdf::SparqlBackend {
 public:
  explicit SparqlClient(std::string endpoint,
                        std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : endpoint_(std::move(endpoint)), url_(split_url(endpoint_)), timeout_(timeout) {}

  rdf::BindingTable select(const std::string& query) override {
    const std::string body = post("query", query, "application/sparql-results+json");
    try {
      return rdf::bindings_from_json(nlohmann::json::parse(body));
    } catch (const std::exception& e) {
      throw RemoteError(RemoteError::Kind::Malformed, endpoint_, query, e.what());
    }
  }

  std::vector<rdf::Triple> construct(const std::string& query) override {
    const std::string body = post("query", query, "application/n-triples");
    try {
      return rdf::parse_ntriples(body);
    } catch (const std::exception& e) {
      throw RemoteError(RemoteError::Kind::Malformed, endpoint_, query, e.what());
    }
  }

  std::size_t update(const std::string& update) override {
    post("update", update, "*/*");
    return 0;
  }

  std::string describe() const override { return endpoint_; }
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string post(const char* field, const std::string& text, const char* accept) const {
    auto client = make_client(url_.origin, timeout_);
    httplib::Headers headers{{"Accept", accept}};
    httplib::Params params{{field, text}};
    auto res = client->Post(url_.path, headers, params);
    if (!res) {
      const auto err = res.error();
      const auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                            ? RemoteError::Kind::Timeout
                            : RemoteError::Kind::Connection;
      throw RemoteError(kind, endpoint_, text, httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
      std::string detail = "status " + std::to_string(res->status);
      if (!res->body.empty()) detail += ": " + res->body.substr(0, 300);
      throw RemoteError(RemoteError::Kind::Http, endpoint_, text, detail, res->status);
    }
    return res->body;
  }

  std::string endpoint_;
  Url url_;
  std::chrono::milliseconds timeout_;
};

enum class ResultKind { Select, Construct };

/// One-shot remote query. SELECT yields a BindingTable, CONSTRUCT a triple list.
inline std::variant<rdf::BindingTable, std::vector<rdf::Triple>> remote_query(
    const std::string& endpoint, const std::string& query, ResultKind kind) {
  SparqlClient client(endpoint);
  if (kind == ResultKind::Select) return client.select(query);
  return client.construct(query);
}

}  // namespace kgnet::net
