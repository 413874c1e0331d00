#include <cstdio>
#include <cstdlib>

#include <gtest/gtest.h>

#include "kgnet/gml/http_api.hpp"
#include "kgnet/net/server.hpp"
#include "kgnet/net/sparql_client.hpp"
#include "kgnet/platform/platform.hpp"
#include "kgnet/platform/server.hpp"
#include "support/toy.hpp"

using namespace kgnet;
using platform::Platform;
using platform::PlatformConfig;

namespace {

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
  ~ScopedEnv() { unsetenv(name_); }

 private:
  const char* name_;
};

PlatformConfig config_in(const toy::TempDir& dir) {
  PlatformConfig cfg;
  cfg.workspace = dir / "ws";
  return cfg;
}

nlohmann::json get_json(const std::string& url, const std::string& path) {
  httplib::Client cli(url);
  auto res = cli.Get(path);
  if (!res) throw std::runtime_error("no response from " + url + path);
  return nlohmann::json::parse(res->body);
}

}  // namespace

TEST(Config, FileThenEnvThenFlags) {
  toy::TempDir dir;
  util::write_file(dir / "cfg.json",
                   R"({"workspace": "from-file", "cost": {"c_call": 10}, "planner": {"objective": "MinTime", "a_min": 0.5}})");
  PlatformConfig c;
  platform::apply_file(c, dir / "cfg.json");
  EXPECT_EQ(c.workspace, "from-file");
  EXPECT_EQ(c.cost.c_call, 10);
  EXPECT_EQ(c.objective, planner::Objective::MinTime);
  {
    ScopedEnv env("KGNET_WORKSPACE", "from-env");
    platform::apply_env(c);
  }
  EXPECT_EQ(c.workspace, "from-env");
  EXPECT_EQ(c.cost.c_call, 10);
  c.workspace = "from-flag";
  c.validate();
  EXPECT_EQ(c.execute_params().a_min, 0.5);
}

TEST(Config, InvalidValuesAreRejected) {
  toy::TempDir dir;
  PlatformConfig c;
  util::write_file(dir / "bad.json", "[1, 2]");
  EXPECT_THROW(platform::apply_file(c, dir / "bad.json"), UserError);
  util::write_file(dir / "bad.json", R"({"cost": {"c_call": "x"}})");
  EXPECT_THROW(platform::apply_file(c, dir / "bad.json"), UserError);
  EXPECT_THROW(platform::apply_file(c, dir / "missing.json"), UserError);
  c = {};
  c.a_min = 2;
  EXPECT_THROW(c.validate(), UserError);
  c = {};
  c.data_endpoint = "not a url";
  EXPECT_THROW(c.validate(), UserError);
}

TEST(Platform, WorkspacePersistsGraphsAndModels) {
  toy::TempDir dir;
  std::string uri;
  {
    Platform p(config_in(dir));
    EXPECT_GT(p.load(toy::sample("toy_dblp.nt")), 0u);
    uri = p.train(sparqlml::parse_train_json(util::read_file(toy::sample("train_nc.json")))).model.model_uri;
  }
  Platform reopened(config_in(dir));
  ASSERT_TRUE(reopened.governor().find(uri));
  const auto r = reopened.query(util::read_file(toy::sample("paper_venue.sparqlml")));
  EXPECT_FALSE(r.select->table.empty());
  EXPECT_EQ(reopened.delete_by_uri({uri}), std::vector<std::string>{uri});
  EXPECT_TRUE(reopened.governor().list_models().empty());
  EXPECT_TRUE(reopened.service()->list_refs().empty());
}

TEST(Platform, DuplicateTrainingKeepsOneModel) {
  toy::TempDir dir;
  Platform p(config_in(dir));
  p.load(toy::sample("toy_dblp.nt"));
  const auto spec = sparqlml::parse_train_json(util::read_file(toy::sample("train_nc.json")));
  p.train(spec);
  EXPECT_THROW(p.train(spec), kgmeta::DuplicateModel);
  EXPECT_EQ(p.governor().list_models().size(), 1u);
  EXPECT_EQ(p.service()->list_refs().size(), 1u);
}

TEST(PlatformServer, HealthModelsAndQuery) {
  toy::TempDir dir;
  Platform p(config_in(dir));
  p.load(toy::sample("toy_dblp.nt"));
  net::ServerThread server;
  platform::mount_platform_routes(server.server(), p, platform::ServeMode::All);
  server.start();
  const std::string base = server.base_url();

  EXPECT_EQ(get_json(base, "/health").at("status"), "ok");
  EXPECT_TRUE(get_json(base, "/models").at("models").empty());

  httplib::Client cli(base);
  cli.set_read_timeout(60, 0);
  const nlohmann::json train{{"query", util::read_file(toy::sample("train_nc.sparqlml"))}};
  auto res = cli.Post("/sparqlml", train.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(get_json(base, "/models").at("models").size(), 1u);

  res = cli.Post("/sparqlml", util::read_file(toy::sample("paper_venue.sparqlml")), "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;

  res = cli.Post("/sparqlml", "select ?x where { ?x ?NodeClassifier ?y . ?NodeClassifier a <https://www.kgnet.com/NodeClassifier> }",
                 "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400) << res->body;
}

TEST(PlatformServer, SplitDeploymentOverHttp) {
  toy::TempDir dir;
  PlatformConfig gml_cfg = config_in(dir);
  gml_cfg.workspace = dir / "gml";
  Platform gml_side(gml_cfg);
  net::ServerThread gml_server;
  gml::GmlRouteStats stats;
  platform::mount_platform_routes(gml_server.server(), gml_side, platform::ServeMode::GmlOnly, &stats);
  gml_server.start();

  PlatformConfig cfg = config_in(dir);
  cfg.gmlaas_url = gml_server.base_url();
  Platform p(cfg);
  EXPECT_EQ(p.service(), nullptr);
  p.load(toy::sample("toy_dblp.nt"));
  p.train(sparqlml::parse_train_json(util::read_file(toy::sample("train_nc.json"))));
  EXPECT_EQ(gml_side.service()->list_refs().size(), 1u);

  auto params = p.config().execute_params();
  params.force_shape = planner::Shape::Dictionary;
  const auto r = *p.query(util::read_file(toy::sample("paper_venue.sparqlml")), params).select;
  EXPECT_FALSE(r.table.empty());
  EXPECT_EQ(stats.inference_calls.load(), 1u);
  EXPECT_THROW(platform::mount_platform_routes(gml_server.server(), p, platform::ServeMode::GmlOnly), UserError);
}

TEST(PlatformServer, PortConflictIsBackendError) {
  net::ServerThread a;
  const int port = a.start();
  net::ServerThread b;
  EXPECT_THROW(b.start("127.0.0.1", port), BackendError);
}

TEST(PlatformServer, UnreachableGmlaasIsConnectionError) {
  gml::HttpGmlClient client("http://127.0.0.1:1", std::chrono::milliseconds(500));
  try {
    client.infer_node_class("abc", {"x"});
    FAIL() << "expected RemoteError";
  } catch (const net::RemoteError& e) {
    EXPECT_EQ(e.kind(), net::RemoteError::Kind::Connection);
  }
}
