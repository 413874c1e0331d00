#include <fstream>

#include <gtest/gtest.h>

#include "kgnet/dataset/package_io.hpp"
#include "kgnet/dataset/splits.hpp"
#include "kgnet/dataset/transform.hpp"
#include "kgnet/util/zip.hpp"
#include "support/generators.hpp"
#include "support/invariants.hpp"
#include "support/toy.hpp"

using namespace kgnet;
using namespace kgnet::dataset;
using rdf::Term;
using rdf::Triple;
using sparqlml::TaskType;
using sparqlml::TrainGmlSpec;
using toy::dblp;

namespace {

TrainGmlSpec nc_spec(const std::string& target, const std::string& label) {
  TrainGmlSpec s;
  s.name = "nc";
  s.task_type = TaskType::NodeClassifier;
  s.target_node_type = target;
  s.label_predicate = label;
  s.budget = {1ull << 30, 600, sparqlml::Priority::ModelScore};
  return s;
}

TrainGmlSpec lp_spec(const std::string& src, const std::string& dst) {
  TrainGmlSpec s;
  s.name = "lp";
  s.task_type = TaskType::LinkPredictor;
  s.target_node_type = src;
  s.source_node_type = src;
  s.destination_node_type = dst;
  s.budget = {1ull << 30, 600, sparqlml::Priority::ModelScore};
  return s;
}

std::vector<Triple> toy_kg() {
  return {{dblp("p1"), toy::type(), dblp("Publication")}, {dblp("p2"), toy::type(), dblp("Publication")},
          {dblp("a1"), toy::type(), dblp("person")},      {dblp("a2"), toy::type(), dblp("person")},
          {dblp("a1"), dblp("writes"), dblp("p1")},       {dblp("a2"), dblp("writes"), dblp("p2")},
          {dblp("p1"), dblp("venue"), dblp("v1")},        {dblp("p2"), dblp("venue"), dblp("v2")}};
}

std::vector<NodeId> iota(NodeId n) {
  std::vector<NodeId> v(n);
  for (NodeId i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(Transform, ToyPackageLayout) {
  const auto kg = toy_kg();
  const auto pkg = transform(kg, nc_spec(toy::kDblp + "Publication", toy::kDblp + "venue"));
  EXPECT_EQ(pkg.node_tables.size(), 3u);
  ASSERT_TRUE(pkg.find_table(pkg.target_table));
  EXPECT_EQ(pkg.table(pkg.target_table).type_iri, toy::kDblp + "Publication");
  EXPECT_TRUE(pkg.find_table("Class"));
  std::set<std::string> preds;
  for (const auto& r : pkg.relations) preds.insert(r.predicate);
  EXPECT_EQ(preds, (std::set<std::string>{toy::kDblp + "writes", std::string(rdf::vocab::kRdfType)}));
  EXPECT_EQ(pkg.labels.size(), 2u);
  EXPECT_EQ(pkg.stats.n_edge_types, 2u);
  EXPECT_EQ(pkg.stats.n_labels, 2u);
  EXPECT_EQ(pkg.label_kind, LabelKind::NodeClass);
  EXPECT_TRUE(invariants::package_violations(kg, nc_spec(toy::kDblp + "Publication", toy::kDblp + "venue"), pkg).empty());
}

TEST(Transform, MissingTargetOrLabelIsAnError) {
  const auto kg = toy_kg();
  EXPECT_THROW(transform(kg, nc_spec(toy::kDblp + "venue", toy::kDblp + "venue")), UserError);
  EXPECT_THROW(transform(kg, nc_spec(toy::kDblp + "Publication", toy::kDblp + "year")), UserError);
  EXPECT_THROW(transform({}, nc_spec(toy::kDblp + "Publication", toy::kDblp + "venue")), UserError);
}

TEST(Transform, DigestIsStableAndOrderFree) {
  auto kg = toy_kg();
  const auto spec = nc_spec(toy::kDblp + "Publication", toy::kDblp + "venue");
  const auto a = transform(kg, spec);
  std::reverse(kg.begin(), kg.end());
  kg.push_back(kg.front());
  const auto b = transform(kg, spec);
  EXPECT_EQ(a.kg_digest, b.kg_digest);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.kg_digest, kg_digest(toy_kg()));
}

TEST(Transform, InvariantsOnRandomGraphs) {
  gen::Rng rng(99);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const auto kg = gen::random_graph(rng, 120, 3);
    const TrainGmlSpec spec = gen::coin(rng) ? nc_spec(gen::type_iri(gen::pick(rng, 3)), gen::kEx + "p" + std::to_string(gen::pick(rng, 5)))
                                             : lp_spec(gen::type_iri(gen::pick(rng, 3)), gen::type_iri(gen::pick(rng, 3)));
    TransformOptions opt;
    opt.seed = i;
    DatasetPackage pkg;
    try {
      pkg = transform(kg, spec, opt);
    } catch (const UserError&) {
      continue;
    }
    ++checked;
    const auto bad = invariants::package_violations(kg, spec, pkg);
    EXPECT_TRUE(bad.empty()) << "graph " << i << ": " << bad.front();
    EXPECT_EQ(decode_files(encode_files(pkg)), pkg);
  }
  EXPECT_GT(checked, 60);
}

TEST(Splits, FloorAllocation) {
  const auto q = floor_allocation(10, {0.8, 0.1, 0.1});
  EXPECT_EQ(q.train, 8u);
  EXPECT_EQ(q.valid, 1u);
  EXPECT_EQ(q.test, 1u);
  const auto r = split_random(iota(10), {0.8, 0.1, 0.1}, 1);
  EXPECT_EQ(r.splits.train.size(), 8u);
  EXPECT_EQ(r.splits.valid.size(), 1u);
  EXPECT_EQ(r.splits.test.size(), 1u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Splits, SmallSetsWarn) {
  const auto r = split_random(iota(7), {0.8, 0.1, 0.1}, 1);
  EXPECT_EQ(r.splits.train.size(), 7u);
  EXPECT_TRUE(r.splits.valid.empty());
  EXPECT_TRUE(r.splits.test.empty());
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Splits, SeedDeterminesShuffle) {
  EXPECT_EQ(split_random(iota(50), {0.6, 0.2, 0.2}, 5).splits, split_random(iota(50), {0.6, 0.2, 0.2}, 5).splits);
  EXPECT_NE(split_random(iota(50), {0.6, 0.2, 0.2}, 5).splits, split_random(iota(50), {0.6, 0.2, 0.2}, 6).splits);
}

TEST(Splits, BadRatiosAreRejected) {
  EXPECT_THROW(split_random(iota(5), {0.5, 0.5, 0.5}, 0), UserError);
  EXPECT_THROW(split_random(iota(5), {1.2, -0.1, -0.1}, 0), UserError);
}

TEST(Splits, CommunityGroupsStayWhole) {
  const std::vector<std::string> keys{"a", "a", "a", "a", "a", "a", "b", "b", "c", "c"};
  const auto r = split_groups(iota(10), keys, {0.6, 0.2, 0.2});
  EXPECT_EQ(r.splits.train, (std::vector<NodeId>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(r.splits.valid, (std::vector<NodeId>{6, 7}));
  EXPECT_EQ(r.splits.test, (std::vector<NodeId>{8, 9}));
}

TEST(PackageIo, RoundTripIsByteStable) {
  toy::TempDir dir;
  const auto pkg = transform(toy_kg(), nc_spec(toy::kDblp + "Publication", toy::kDblp + "venue"));
  write_package(pkg, dir / "a.zip");
  EXPECT_EQ(read_package(dir / "a.zip"), pkg);
  write_package(read_package(dir / "a.zip"), dir / "b.zip");
  EXPECT_EQ(util::read_file(dir / "a.zip"), util::read_file(dir / "b.zip"));
}

TEST(PackageIo, TamperingIsDetected) {
  const auto pkg = transform(toy_kg(), nc_spec(toy::kDblp + "Publication", toy::kDblp + "venue"));
  auto files = encode_files(pkg);
  files.at("labels.csv") += "1,0\n";
  try {
    decode_files(files);
    FAIL() << "expected a checksum error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
  }
}

TEST(PackageIo, MissingFileIsIoError) {
  EXPECT_THROW(read_package("/nonexistent/dir/pkg.zip"), IoError);
}
