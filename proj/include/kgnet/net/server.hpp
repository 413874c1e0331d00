#pragma once

#include <memory>
#include <string>
#include <thread>

#include "kgnet/net/http.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/rdf/results_json.hpp"
#include "kgnet/sparql/query.hpp"

namespace kgnet::net {

/// Runs an httplib::Server on a background thread for the lifetime of the
/// object. Port 0 picks an ephemeral port.
class ServerThread {
 public:
  ServerThread() : server_(std::make_unique<httplib::Server>()) {
    // SO_REUSEADDR only, so binding a taken port fails.
    server_->set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
  }
  ServerThread(const ServerThread&) = delete;
  ServerThread& operator=(const ServerThread&) = delete;
  ~ServerThread() { stop(); }

  httplib::Server& server() { return *server_; }

  /// Binds and starts serving. Throws BackendError when the port is taken.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    if (port == 0) {
      port_ = server_->bind_to_any_port(host);
    } else {
      port_ = server_->bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) {
      throw BackendError("cannot bind " + host + ":" + std::to_string(port) +
                         " (address in use or not permitted)");
    }
    host_ = host;
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
  }

  /// Serves on the calling thread until stop() is called elsewhere.
  void run_blocking(const std::string& host, int port) {
    if (!server_->bind_to_port(host, port)) {
      throw BackendError("cannot bind " + host + ":" + std::to_string(port) +
                         " (address in use or not permitted)");
    }
    host_ = host;
    port_ = port;
    server_->listen_after_bind();
  }

  void stop() {
    if (server_->is_running()) server_->stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
};

/// Mounts a SPARQL 1.1 Protocol query endpoint for `store` at `path`.
/// Only SELECT and CONSTRUCT are served; update requests get 403.
inline void mount_sparql_endpoint(httplib::Server& server, rdf::Store& store,
                                  std::string default_graph, const std::string& path = "/sparql") {
  auto handler = [&store, default_graph](const httplib::Request& req, httplib::Response& res) {
    if (req.has_param("update")) {
      res.status = 403;
      res.set_content("endpoint is read-only", "text/plain");
      return;
    }
    if (!req.has_param("query")) {
      res.status = 400;
      res.set_content("missing 'query' parameter", "text/plain");
      return;
    }
    try {
      const auto q = sparql::parse_query(req.get_param_value("query"));
      if (q.form == sparql::Query::Form::Select) {
        auto r = sparql::evaluate(store, default_graph, q);
        res.set_content(rdf::bindings_to_json(r.table).dump(),
                        "application/sparql-results+json");
      } else if (q.form == sparql::Query::Form::Construct) {
        auto r = sparql::evaluate(store, default_graph, q);
        res.set_content(rdf::serialize_ntriples(r.triples), "application/n-triples");
      } else {
        res.status = 403;
        res.set_content("endpoint is read-only", "text/plain");
      }
    } catch (const UserError& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(e.what(), "text/plain");
    }
  };
  server.Post(path, handler);
  server.Get(path, handler);
}

/// Read-only loopback SPARQL endpoint over an embedded store, for tests.
class SparqlEndpointServer {
 public:
  SparqlEndpointServer(rdf::Store& store, std::string default_graph, int port = 0) {
    mount_sparql_endpoint(thread_.server(), store, std::move(default_graph));
    thread_.start("127.0.0.1", port);
  }
  std::string url() const { return thread_.base_url() + "/sparql"; }
  int port() const { return thread_.port(); }

 private:
  ServerThread thread_;
};

}  // namespace kgnet::net
