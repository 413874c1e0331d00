#include <algorithm>

#include <gtest/gtest.h>

#include "kgnet/rdf/backend.hpp"
#include "kgnet/sampler/meta_sampler.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/toy.hpp"

using namespace kgnet;
using rdf::Term;
using rdf::Triple;
using sampler::SamplingSpec;
using toy::dblp;

namespace {

std::set<Triple> extract(rdf::Store& store, const SamplingSpec& spec, std::size_t page = 100000) {
  rdf::EmbeddedBackend backend(store, "g");
  const auto sub = sampler::extract_subgraph(backend, spec, page);
  return {sub.triples.begin(), sub.triples.end()};
}

bool subset(const std::set<Triple>& a, const std::set<Triple>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST(Sampler, DefaultsPerTask) {
  EXPECT_EQ(sampler::default_spec(sparqlml::TaskType::NodeClassifier, "http://e.org/T"),
            (SamplingSpec{"http://e.org/T", 1, 1}));
  EXPECT_EQ(sampler::default_spec(sparqlml::TaskType::LinkPredictor, "http://e.org/T"),
            (SamplingSpec{"http://e.org/T", 2, 1}));
}

TEST(Sampler, SingleBlockQueryForD1H1) {
  const std::string q = sampler::build_bgp({toy::kDblp + "Publication", 1, 1});
  EXPECT_EQ(q.find("UNION"), std::string::npos);
  EXPECT_NE(q.find("<https://www.dblp.org/Publication>"), std::string::npos);
  EXPECT_NE(sampler::build_bgp({toy::kDblp + "Publication", 2, 2}).find("UNION"), std::string::npos);
}

TEST(Sampler, InvalidScopeIsRejected) {
  EXPECT_THROW(sampler::build_bgp({toy::kDblp + "Publication", 3, 1}), UserError);
  EXPECT_THROW(sampler::build_bgp({"not an iri", 1, 1}), UserError);
}

TEST(Sampler, ToyScopeExcludesStrayTriples) {
  const std::vector<Triple> g{{dblp("p1"), toy::type(), dblp("Publication")},
                              {dblp("p1"), dblp("title"), Term::literal("A")},
                              {dblp("p1"), dblp("authoredBy"), dblp("a1")},
                              {dblp("p2"), toy::type(), dblp("Publication")},
                              {dblp("p2"), dblp("title"), Term::literal("B")},
                              {dblp("p2"), dblp("authoredBy"), dblp("a2")},
                              {dblp("a1"), dblp("coauthorWith"), dblp("a2")},
                              {dblp("a2"), dblp("coauthorWith"), dblp("a1")},
                              {dblp("a1"), dblp("name"), Term::literal("Ann")}};
  rdf::Store store;
  store.insert("g", g);
  const auto got = extract(store, {toy::kDblp + "Publication", 1, 1});
  EXPECT_EQ(got.size(), 6u);
  EXPECT_FALSE(got.contains(g[6]));
}

TEST(Sampler, IncomingTripleNeedsD2) {
  const Triple back{dblp("p2"), dblp("cites"), dblp("p1")};
  const std::vector<Triple> g{{dblp("p1"), toy::type(), dblp("Publication")},
                              {dblp("p1"), dblp("cites"), dblp("p2")},
                              back};
  rdf::Store store;
  store.insert("g", g);
  EXPECT_FALSE(extract(store, {toy::kDblp + "Publication", 1, 1}).contains(back));
  EXPECT_TRUE(extract(store, {toy::kDblp + "Publication", 2, 1}).contains(back));
}

TEST(Sampler, AbsentTypeWarns) {
  rdf::Store store;
  store.insert("g", std::vector<Triple>{{dblp("p1"), dblp("title"), Term::literal("A")}});
  rdf::EmbeddedBackend backend(store, "g");
  const auto sub = sampler::extract_subgraph(backend, {toy::kDblp + "Publication", 1, 1});
  EXPECT_TRUE(sub.triples.empty());
  EXPECT_EQ(sub.warnings.size(), 1u);
}

TEST(Sampler, PagingDoesNotChangeResult) {
  gen::Rng rng(3);
  rdf::Store store;
  store.insert("g", gen::random_graph(rng, 150, 2));
  const SamplingSpec spec{gen::type_iri(0), 2, 2};
  EXPECT_EQ(extract(store, spec, 7), extract(store, spec));
}

TEST(Sampler, EqualsTraversalOracleAndIsMonotone) {
  gen::Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto graph = gen::random_graph(rng, 200, 5);
    rdf::Store store;
    store.insert("g", graph);
    const std::string target = gen::type_iri(gen::pick(rng, 5));
    std::map<std::pair<int, int>, std::set<Triple>> got;
    for (int d : {1, 2}) {
      for (int h : {1, 2}) {
        got[{d, h}] = extract(store, {target, d, h});
        EXPECT_EQ((got[{d, h}]), oracle::bfs_scope(graph, target, d, h)) << "graph " << i << " d" << d << "h" << h;
      }
    }
    for (int d : {1, 2}) EXPECT_TRUE(subset(got[{d, 1}], got[{d, 2}]));
    for (int h : {1, 2}) EXPECT_TRUE(subset(got[{1, h}], got[{2, h}]));
  }
}
