#pragma once

#include <string>

#include <json.hpp>

#include "kgnet/gml/http_api.hpp"
#include "kgnet/net/server.hpp"
#include "kgnet/platform/platform.hpp"
#include "kgnet/platform/report.hpp"

namespace kgnet::platform {

/// Which halves of the platform one process serves.
enum class ServeMode { All, SparqlMlOnly, GmlOnly };

/// Routes:
///   POST /sparqlml  {"query": text} or a raw text body -> outcome_json
///   GET  /models    -> {"models": [...]}
///   GET|POST /sparql  read-only endpoint over the embedded data graph
///   /gml/*          GMLaaS, when the service is embedded
///   GET  /health    -> {"status": "ok", ...}
inline void mount_platform_routes(httplib::Server& server, Platform& platform, ServeMode mode,
                                  gml::GmlRouteStats* stats = nullptr) {
  server.Get("/health", [&platform, mode](const httplib::Request&, httplib::Response& res) {
    gml::detail::reply(res, 200,
                       {{"status", "ok"},
                        {"sparqlml", mode != ServeMode::GmlOnly},
                        {"gmlaas", mode != ServeMode::SparqlMlOnly && platform.service() != nullptr}});
  });
  if (mode != ServeMode::SparqlMlOnly) {
    if (platform.service() == nullptr) throw UserError("cannot serve GMLaaS: it is configured as remote");
    gml::mount_gml_routes(server, *platform.service(), stats);
  }
  if (mode == ServeMode::GmlOnly) return;
  server.Post("/sparqlml", [&platform](const httplib::Request& req, httplib::Response& res) {
    gml::detail::guarded(res, [&] {
      std::string text = req.body;
      if (req.has_param("query")) {
        text = req.get_param_value("query");
      } else if (!text.empty() && text.front() == '{') {
        text = nlohmann::json::parse(text).at("query").get<std::string>();
      }
      gml::detail::reply(res, 200, outcome_json(platform.query(text)));
    });
  });
  server.Get("/models", [&platform](const httplib::Request&, httplib::Response& res) {
    gml::detail::guarded(res, [&] {
      nlohmann::json models = nlohmann::json::array();
      for (const auto& m : platform.governor().list_models()) models.push_back(model_json(m));
      gml::detail::reply(res, 200, {{"models", models}});
    });
  });
  if (platform.embedded_data()) {
    net::mount_sparql_endpoint(server, platform.store(), platform.config().data_graph);
  }
}

}  // namespace kgnet::platform
