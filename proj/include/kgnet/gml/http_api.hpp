#pragma once

#include <atomic>
#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgnet/gml/client.hpp"
#include "kgnet/gml/service.hpp"
#include "kgnet/net/http.hpp"
#include "kgnet/net/sparql_client.hpp"
#include "kgnet/sparqlml/train_spec.hpp"

namespace kgnet::gml {

inline constexpr int kApiVersion = 1;

namespace detail {

inline nlohmann::json hits_json(const std::vector<KnnHit>& hits) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& h : hits) a.push_back({{"iri", h.iri}, {"score", h.score}});
  return a;
}

inline nlohmann::json links_json(const LinkResult& r) {
  nlohmann::json links = nlohmann::json::object();
  for (const auto& [s, ranked] : r.links) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& l : ranked) a.push_back({{"iri", l.iri}, {"score", l.score}});
    links[s] = a;
  }
  return {{"v", kApiVersion}, {"links", links}, {"unresolved", r.unresolved}};
}

inline void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void reply_error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
  reply(res, status, {{"v", kApiVersion}, {"error", {{"kind", kind}, {"message", message}}}});
}

/// Runs `f`, mapping errors to JSON error replies.
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const NotFoundError& e) {
    reply_error(res, 404, "not_found", e.what());
  } catch (const UserError& e) {
    reply_error(res, 400, "user", e.what());
  } catch (const nlohmann::json::exception& e) {
    reply_error(res, 400, "user", std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "backend", e.what());
  }
}

inline nlohmann::json request_body(const httplib::Request& req) {
  nlohmann::json j = nlohmann::json::parse(req.body);
  if (!j.is_object()) throw UserError("request body must be a JSON object");
  if (j.value("v", kApiVersion) != kApiVersion) {
    throw UserError("unsupported API version " + j.at("v").dump() + " (expected 1)");
  }
  return j;
}

}  // namespace detail

/// Counters of inference requests served, for call-count accounting.
struct GmlRouteStats {
  std::atomic<std::uint64_t> inference_calls{0};
};

/// Mounts the /gml/* JSON routes on `server`.
inline void mount_gml_routes(httplib::Server& server, GmlService& service, GmlRouteStats* stats = nullptr) {
  using detail::guarded;
  using detail::reply;
  auto count = [stats] {
    if (stats != nullptr) ++stats->inference_calls;
  };
  server.Post("/gml/train", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto j = detail::request_body(req);
      const auto spec = sparqlml::parse_train_json(j.at("task").dump(), {});
      const auto pkg = dataset::read_package(j.at("package").get<std::string>());
      reply(res, 200, {{"v", kApiVersion}, {"model", summary_json(service.train(spec, pkg))}});
    });
  });
  server.Post("/gml/infer/nodeclass", [&service, count](const httplib::Request& req, httplib::Response& res) {
    count();
    guarded(res, [&] {
      const auto j = detail::request_body(req);
      const auto ref = j.at("model").get<std::string>();
      const NodeClassResult r =
          j.value("all", false) ? service.infer_node_class_all(ref)
                                : service.infer_node_class(ref, j.at("targets").get<std::vector<std::string>>());
      reply(res, 200, {{"v", kApiVersion}, {"predictions", r.predictions}, {"unresolved", r.unresolved}});
    });
  });
  server.Post("/gml/infer/links", [&service, count](const httplib::Request& req, httplib::Response& res) {
    count();
    guarded(res, [&] {
      const auto j = detail::request_body(req);
      const auto k = j.value("k", static_cast<long long>(10));
      if (k < 1) throw UserError("k must be >= 1");
      reply(res, 200,
            detail::links_json(service.infer_links(j.at("model").get<std::string>(),
                                                   j.at("sources").get<std::vector<std::string>>(),
                                                   static_cast<std::size_t>(k))));
    });
  });
  server.Post("/gml/knn", [&service, count](const httplib::Request& req, httplib::Response& res) {
    count();
    guarded(res, [&] {
      const auto j = detail::request_body(req);
      const auto k = j.value("k", static_cast<long long>(10));
      if (k < 0) throw UserError("k must be >= 0");
      const auto& q = j.at("query");
      KnnQuery query = q.is_string() ? KnnQuery(q.get<std::string>()) : KnnQuery(q.get<std::vector<double>>());
      reply(res, 200,
            {{"v", kApiVersion},
             {"results", detail::hits_json(service.knn(j.at("model").get<std::string>(), query,
                                                       static_cast<std::size_t>(k)))}});
    });
  });
  server.Post("/gml/models/delete", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto refs = detail::request_body(req).at("models").get<std::vector<std::string>>();
      service.delete_artifacts(refs);
      reply(res, 200, {{"v", kApiVersion}, {"deleted", refs}});
    });
  });
  server.Delete(R"(/gml/models/([A-Za-z0-9-]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string ref = req.matches[1];
      service.delete_artifacts({ref});
      reply(res, 200, {{"v", kApiVersion}, {"deleted", {ref}}});
    });
  });
  server.Get(R"(/gml/models/([A-Za-z0-9-]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, {{"v", kApiVersion}, {"model", service.info(req.matches[1])}}); });
  });
}

/// GmlClient speaking the /gml/* JSON API. Each call opens its own connection.
class HttpGmlClient : public GmlClient {
 public:
  explicit HttpGmlClient(std::string base_url, std::chrono::milliseconds timeout = std::chrono::seconds(60))
      : base_(std::move(base_url)), url_(net::split_url(base_)), timeout_(timeout) {
    while (!url_.path.empty() && url_.path.back() == '/') url_.path.pop_back();
  }

  TrainedModel train(const sparqlml::TrainGmlSpec& task, const std::string& package_path) override {
    const auto j = call("POST", "/gml/train", {{"v", kApiVersion}, {"task", sparqlml::to_json(task)}, {"package", package_path}});
    return summary_from_json(j.at("model"));
  }

  NodeClassResult infer_node_class(const std::string& ref, const std::vector<std::string>& targets,
                                   bool all = false) override {
    nlohmann::json body = {{"v", kApiVersion}, {"model", ref}};
    if (all) {
      body["all"] = true;
    } else {
      body["targets"] = targets;
    }
    const auto j = call("POST", "/gml/infer/nodeclass", body);
    return {j.at("predictions").get<std::map<std::string, std::string>>(),
            j.at("unresolved").get<std::vector<std::string>>()};
  }

  LinkResult infer_links(const std::string& ref, const std::vector<std::string>& sources, std::size_t k) override {
    const auto j = call("POST", "/gml/infer/links", {{"v", kApiVersion}, {"model", ref}, {"sources", sources}, {"k", k}});
    LinkResult r;
    for (const auto& [s, ranked] : j.at("links").items()) {
      auto& out = r.links[s];
      for (const auto& l : ranked) out.push_back({l.at("iri").get<std::string>(), l.at("score").get<double>()});
    }
    r.unresolved = j.at("unresolved").get<std::vector<std::string>>();
    return r;
  }

  std::vector<KnnHit> knn(const std::string& ref, const KnnQuery& query, std::size_t k) override {
    nlohmann::json q = std::holds_alternative<std::string>(query) ? nlohmann::json(std::get<std::string>(query))
                                                                  : nlohmann::json(std::get<std::vector<double>>(query));
    const auto j = call("POST", "/gml/knn", {{"v", kApiVersion}, {"model", ref}, {"query", q}, {"k", k}});
    std::vector<KnnHit> out;
    for (const auto& h : j.at("results")) out.push_back({h.at("iri").get<std::string>(), h.at("score").get<double>()});
    return out;
  }

  TrainedModel info(const std::string& ref) override {
    return summary_from_json(call("GET", "/gml/models/" + ref, nullptr).at("model"));
  }

  void delete_artifacts(const std::vector<std::string>& refs) override {
    call("POST", "/gml/models/delete", {{"v", kApiVersion}, {"models", refs}});
  }

  const std::string& base_url() const { return base_; }

 private:
  nlohmann::json call(const std::string& method, const std::string& route, const nlohmann::json& body) {
    const std::string path = url_.path + route;
    auto client = net::make_client(url_.origin, timeout_);
    httplib::Result res = method == "GET" ? client->Get(path) : client->Post(path, body.dump(), "application/json");
    if (!res) {
      const auto err = res.error();
      const auto kind = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read
                            ? net::RemoteError::Kind::Timeout
                            : net::RemoteError::Kind::Connection;
      throw net::RemoteError(kind, base_ + route, body.is_null() ? "" : body.dump(), httplib::to_string(err));
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw net::RemoteError(net::RemoteError::Kind::Malformed, base_ + route, "", e.what(), res->status);
    }
    if (res->status == 200) return j;
    const std::string message = j.contains("error") ? j["error"].value("message", res->body) : res->body;
    if (res->status == 404) throw NotFoundError(message);
    if (res->status == 400) throw UserError(message);
    throw net::RemoteError(net::RemoteError::Kind::Http, base_ + route, "", message, res->status);
  }

  std::string base_;
  net::Url url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace kgnet::gml
