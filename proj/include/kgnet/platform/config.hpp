#pragma once

#include <cstdlib>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "kgnet/dataset/splits.hpp"
#include "kgnet/error.hpp"
#include "kgnet/net/http.hpp"
#include "kgnet/planner/executor.hpp"
#include "kgnet/sparqlml/train_spec.hpp"
#include "kgnet/util/zip.hpp"

namespace kgnet::platform {

/// Settings merged from a JSON file, then KGNET_* environment variables, then
/// command-line flags (each overriding the previous). Empty endpoint URLs
/// mean the embedded store or service.
struct PlatformConfig {
  std::string data_endpoint;
  std::string data_graph = "urn:kgnet:data";
  std::string kgmeta_endpoint;
  std::string kgmeta_graph = "kgnet";
  std::string gmlaas_url;
  std::string workspace = ".kgnet";
  std::string methods_path;  // empty: built-in profiles
  planner::CostModelParams cost;
  std::optional<sparqlml::Budget> default_budget;
  std::size_t sampler_page_size = 100000;
  std::string split_strategy = "random";
  dataset::SplitRatios split_ratios;
  std::uint64_t split_seed = 0;
  std::optional<std::string> community_edge_type;
  planner::Objective objective = planner::Objective::MaxAccuracy;
  double t_max_ms = std::numeric_limits<double>::infinity();
  double a_min = 0;
  bool lenient = false;
  bool filtered_dictionary = true;
  std::size_t max_in_flight = 8;
  std::string host = "127.0.0.1";
  int port = 8890;

  void validate() const {
    for (const auto* url : {&data_endpoint, &kgmeta_endpoint, &gmlaas_url}) {
      if (!url->empty()) net::split_url(*url);
    }
    if (!rdf::is_valid_graph_name(data_graph)) throw UserError("invalid data graph name '" + data_graph + "'");
    if (!rdf::is_valid_graph_name(kgmeta_graph)) throw UserError("invalid KGMeta graph name '" + kgmeta_graph + "'");
    if (workspace.empty()) throw UserError("workspace path is empty");
    cost.validate();
    if (sampler_page_size == 0) throw UserError("sampler page size must be positive");
    if (max_in_flight == 0) throw UserError("max in-flight inference calls must be positive");
    if (!(t_max_ms > 0)) throw UserError("T_max must be positive");
    if (a_min < 0 || a_min > 1) throw UserError("A_min must lie in [0,1]");
    if (split_strategy != "random" && split_strategy != "community") {
      throw UserError("split strategy must be random or community");
    }
    split_ratios.validate();
    if (port < 0 || port > 65535) throw UserError("port out of range");
  }

  planner::ExecuteParams execute_params() const {
    planner::ExecuteParams p;
    p.cost = cost;
    p.objective = objective;
    p.t_max = t_max_ms;
    p.a_min = a_min;
    p.lenient = lenient;
    p.filtered_dictionary = filtered_dictionary;
    p.max_in_flight = max_in_flight;
    return p;
  }
};

inline planner::Objective objective_from(const std::string& s) {
  if (s == "MaxAccuracy" || s == "accuracy") return planner::Objective::MaxAccuracy;
  if (s == "MinTime" || s == "time") return planner::Objective::MinTime;
  throw UserError("unknown objective '" + s + "' (expected MaxAccuracy or MinTime)");
}

inline sparqlml::Budget budget_from_json(const nlohmann::json& j) {
  sparqlml::Budget b;
  b.max_memory_bytes = sparqlml::parse_memory(j.at("MaxMemory"));
  b.max_time_seconds = sparqlml::parse_duration(j.at("MaxTime"));
  if (j.contains("Priority")) b.priority = sparqlml::parse_priority(j.at("Priority").get<std::string>());
  return b;
}

/// Applies the keys present in `j`.
inline void apply_json(PlatformConfig& c, const nlohmann::json& j) {
  try {
    auto str = [&](const char* key, std::string& out) {
      if (j.contains(key)) out = j.at(key).get<std::string>();
    };
    str("data_endpoint", c.data_endpoint);
    str("data_graph", c.data_graph);
    str("kgmeta_endpoint", c.kgmeta_endpoint);
    str("kgmeta_graph", c.kgmeta_graph);
    str("gmlaas_url", c.gmlaas_url);
    str("workspace", c.workspace);
    str("methods", c.methods_path);
    if (j.contains("cost")) {
      c.cost.c_call = j["cost"].value("c_call", c.cost.c_call);
      c.cost.c_item = j["cost"].value("c_item", c.cost.c_item);
    }
    if (j.contains("default_budget")) c.default_budget = budget_from_json(j.at("default_budget"));
    if (j.contains("sampler_page_size")) c.sampler_page_size = j.at("sampler_page_size").get<std::size_t>();
    if (j.contains("split")) {
      const auto& s = j.at("split");
      c.split_strategy = s.value("strategy", c.split_strategy);
      if (s.contains("ratios")) {
        const auto r = s.at("ratios").get<std::vector<double>>();
        if (r.size() != 3) throw UserError("split.ratios needs three numbers (train, valid, test)");
        c.split_ratios = {r[0], r[1], r[2]};
      }
      c.split_seed = s.value("seed", c.split_seed);
      if (s.contains("community_edge_type")) c.community_edge_type = s.at("community_edge_type").get<std::string>();
    }
    if (j.contains("planner")) {
      const auto& p = j.at("planner");
      if (p.contains("objective")) c.objective = objective_from(p.at("objective").get<std::string>());
      if (p.contains("t_max_ms")) c.t_max_ms = p.at("t_max_ms").get<double>();
      c.a_min = p.value("a_min", c.a_min);
      c.lenient = p.value("lenient", c.lenient);
      c.filtered_dictionary = p.value("filtered_dictionary", c.filtered_dictionary);
      c.max_in_flight = p.value("max_in_flight", c.max_in_flight);
    }
    if (j.contains("server")) {
      c.host = j["server"].value("host", c.host);
      c.port = j["server"].value("port", c.port);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("config: ") + e.what());
  }
}

inline void apply_file(PlatformConfig& c, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(util::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UserError("config " + path + ": " + e.what());
  } catch (const IoError& e) {
    throw UserError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw UserError("config " + path + " must hold a JSON object");
  apply_json(c, j);
}

/// KGNET_DATA_ENDPOINT, KGNET_DATA_GRAPH, KGNET_KGMETA_ENDPOINT,
/// KGNET_KGMETA_GRAPH, KGNET_GMLAAS_URL, KGNET_WORKSPACE, KGNET_METHODS,
/// KGNET_SAMPLER_PAGE_SIZE, KGNET_C_CALL, KGNET_C_ITEM.
inline void apply_env(PlatformConfig& c) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  auto number = [](const std::string& name, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw UserError(name + " is not a number: '" + v + "'");
    }
  };
  if (auto v = env("KGNET_DATA_ENDPOINT")) c.data_endpoint = *v;
  if (auto v = env("KGNET_DATA_GRAPH")) c.data_graph = *v;
  if (auto v = env("KGNET_KGMETA_ENDPOINT")) c.kgmeta_endpoint = *v;
  if (auto v = env("KGNET_KGMETA_GRAPH")) c.kgmeta_graph = *v;
  if (auto v = env("KGNET_GMLAAS_URL")) c.gmlaas_url = *v;
  if (auto v = env("KGNET_WORKSPACE")) c.workspace = *v;
  if (auto v = env("KGNET_METHODS")) c.methods_path = *v;
  if (auto v = env("KGNET_SAMPLER_PAGE_SIZE")) {
    const double d = number("KGNET_SAMPLER_PAGE_SIZE", *v);
    if (d < 1) throw UserError("KGNET_SAMPLER_PAGE_SIZE must be positive");
    c.sampler_page_size = static_cast<std::size_t>(d);
  }
  if (auto v = env("KGNET_C_CALL")) c.cost.c_call = number("KGNET_C_CALL", *v);
  if (auto v = env("KGNET_C_ITEM")) c.cost.c_item = number("KGNET_C_ITEM", *v);
}

}  // namespace kgnet::platform
