// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <new>
#include <sstream>

#include "kgnet/dataset/package_io.hpp"
#include "kgnet/dataset/transform.hpp"
#include "kgnet/gml/embedding_store.hpp"
#include "kgnet/gml/method.hpp"
#include "kgnet/kgmeta/governor.hpp"
#include "kgnet/net/server.hpp"
#include "kgnet/planner/optimizer.hpp"
#include "kgnet/platform/platform.hpp"
#include "kgnet/platform/server.hpp"
#include "kgnet/rdf/backend.hpp"
#include "kgnet/sampler/meta_sampler.hpp"
#include "kgnet/sparqlml/parser.hpp"
#include "kgnet/sparqlml/render.hpp"
#include "support/generators.hpp"
#include "support/invariants.hpp"
#include "support/oracles.hpp"
#include "support/toy.hpp"

// Live and peak heap bytes, counted by the replaced global allocator. Each
// block carries its size in a 16-byte header.
namespace heap {
std::atomic<std::size_t> live{0}, peak{0};

void reset_peak() { peak = live.load(); }
}  // namespace heap

void* operator new(std::size_t n) {
  auto* p = static_cast<std::size_t*>(std::malloc(n + 16));
  if (p == nullptr) throw std::bad_alloc();
  *p = n;
  const std::size_t now = heap::live += n;
  for (std::size_t prev = heap::peak; now > prev && !heap::peak.compare_exchange_weak(prev, now);) {
  }
  return reinterpret_cast<char*>(p) + 16;
}

void operator delete(void* q) noexcept {
  if (q == nullptr) return;
  auto* p = reinterpret_cast<std::size_t*>(reinterpret_cast<std::uintptr_t>(q) - 16);
  heap::live -= *p;
  std::free(p);
}

void operator delete(void* q, std::size_t) noexcept { operator delete(q); }

namespace {

using namespace kgnet;
using rdf::Term;
using rdf::Triple;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects the first few failure messages of a criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

// 1. SPARQL-ML parsing: goldens, render round trip, random ASTs, under 1 s.
void parser_roundtrip(Check& c) {
  using sparqlml::ConstraintKey;
  using sparqlml::SparqlMlAst;
  const auto t0 = Clock::now();
  const auto fig2 = sparqlml::parse(toy::kFig2);
  c.expect(fig2.kind == SparqlMlAst::Kind::Select && fig2.data_patterns.size() == 2 && fig2.gml_patterns.size() == 1,
           "paper-venue query shape");
  if (!fig2.gml_patterns.empty()) {
    const auto& g = fig2.gml_patterns[0];
    c.expect(g.subject_var == "paper" && g.object_var == "venue" &&
                 g.constraints.at(ConstraintKey::NodeLabel) == toy::dblp("venue"),
             "paper-venue group");
  }
  const auto fig7 = sparqlml::parse(toy::kFig7);
  c.expect(fig7.kind == SparqlMlAst::Kind::InsertTrain && fig7.train_payload &&
               fig7.train_payload->label_predicate == toy::kDblp + "venue",
           "train payload");
  const auto fig8 = sparqlml::parse(toy::kFig8);
  c.expect(fig8.kind == SparqlMlAst::Kind::DeleteModel && fig8.gml_patterns.size() == 1, "delete query");
  const auto fig9 = sparqlml::parse(toy::kFig9);
  c.expect(fig9.gml_patterns.size() == 1 && fig9.gml_patterns[0].top_k() == 10, "link query TopK");
  for (const auto* ast : {&fig2, &fig7, &fig8, &fig9}) {
    c.expect(sparqlml::parse(sparqlml::render(*ast)) == *ast, "golden render round trip");
  }
  gen::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto ast = gen::random_ast(rng);
    c.expect(sparqlml::parse(sparqlml::render(ast)) == ast, "random AST " + std::to_string(i) + " round trip");
  }
  const double s = seconds_since(t0);
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
}

// 2. Meta-sampling equals the traversal oracle and grows with d and h.
void sampler_scope(Check& c) {
  const auto t0 = Clock::now();
  gen::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto graph = gen::random_graph(rng, 200, 5);
    rdf::Store store;
    store.insert("g", graph);
    rdf::EmbeddedBackend backend(store, "g");
    const std::string target = gen::type_iri(gen::pick(rng, 5));
    std::map<std::pair<int, int>, std::set<Triple>> got;
    for (int d : {1, 2}) {
      for (int h : {1, 2}) {
        const auto sub = sampler::extract_subgraph(backend, {target, d, h});
        got[{d, h}] = {sub.triples.begin(), sub.triples.end()};
        c.expect(got[{d, h}] == oracle::bfs_scope(graph, target, d, h),
                 "graph " + std::to_string(i) + " d" + std::to_string(d) + "h" + std::to_string(h));
      }
    }
    auto subset = [](const std::set<Triple>& a, const std::set<Triple>& b) {
      return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    c.expect(subset(got[{1, 1}], got[{1, 2}]) && subset(got[{2, 1}], got[{2, 2}]) &&
                 subset(got[{1, 1}], got[{2, 1}]) && subset(got[{1, 2}], got[{2, 2}]),
             "monotonicity on graph " + std::to_string(i));
  }
  const double s = seconds_since(t0);
  c.expect(s < 30.0, "took " + std::to_string(s) + " s");
}

// 3. Transforming KG' costs less heap and time than transforming the whole KG.
void sampling_savings(Check& c) {
  const auto t0 = Clock::now();
  std::vector<Triple> kg;
  const Term type = rdf::rdf_type();
  auto ex = [](const std::string& s) { return gen::ex(s); };
  // 1000 targets x 6 reachable triples; 4000 triples among other nodes.
  for (int i = 0; i < 1000; ++i) {
    const Term p = ex("paper" + std::to_string(i));
    kg.push_back({p, type, ex("Paper")});
    kg.push_back({p, ex("venue"), ex("venue" + std::to_string(i % 7))});
    kg.push_back({p, ex("cites"), ex("paper" + std::to_string((i * 31 + 7) % 1000))});
    kg.push_back({p, ex("author"), ex("person" + std::to_string(i % 300))});
    kg.push_back({p, ex("year"), Term::integer(2000 + i % 20)});
    kg.push_back({p, ex("topic"), ex("topic" + std::to_string(i % 40))});
  }
  for (int i = 0; i < 1000; ++i) {
    const Term o = ex("org" + std::to_string(i));
    kg.push_back({o, type, ex("Org")});
    kg.push_back({o, ex("partOf"), ex("org" + std::to_string((i * 17 + 3) % 1000))});
    kg.push_back({o, ex("country"), ex("country" + std::to_string(i % 50))});
    kg.push_back({o, ex("founded"), Term::integer(1900 + i % 100)});
  }
  rdf::Store store;
  store.insert("g", kg);
  rdf::EmbeddedBackend backend(store, "g");
  const auto sub = sampler::extract_subgraph(backend, {gen::kEx + "Paper", 1, 1});
  c.expect(kg.size() == 10000, "KG has " + std::to_string(kg.size()) + " triples");
  c.expect(sub.triples.size() * 10 <= kg.size() * 6,
           "|KG'| = " + std::to_string(sub.triples.size()) + " exceeds 0.6|KG|");

  sparqlml::TrainGmlSpec spec;
  spec.name = "savings";
  spec.task_type = sparqlml::TaskType::NodeClassifier;
  spec.target_node_type = gen::kEx + "Paper";
  spec.label_predicate = gen::kEx + "venue";
  auto measure = [&](const std::vector<Triple>& input) {
    std::size_t peak = 0;
    double best = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
      const std::size_t base = heap::live;
      heap::reset_peak();
      const auto start = Clock::now();
      {
        const auto pkg = dataset::transform(input, spec);
        (void)pkg;
      }
      best = std::min(best, seconds_since(start));
      peak = std::max(peak, heap::peak.load() - base);
    }
    return std::make_pair(peak, best);
  };
  const auto [peak_sub, time_sub] = measure(sub.triples);
  const auto [peak_all, time_all] = measure(kg);
  c.expect(peak_sub < peak_all,
           "peak heap " + std::to_string(peak_sub) + " B on KG' vs " + std::to_string(peak_all) + " B on KG");
  c.expect(time_sub < time_all,
           "transform time " + std::to_string(time_sub) + " s on KG' vs " + std::to_string(time_all) + " s on KG");
  const double s = seconds_since(t0);
  c.expect(s < 60.0, "took " + std::to_string(s) + " s");
}

// 4. Package invariants, lossless encoding and checksummed, byte-stable files.
void package_integrity(Check& c) {
  const auto t0 = Clock::now();
  gen::Rng rng(4);
  toy::TempDir dir;
  int built = 0;
  for (int i = 0; i < 100; ++i) {
    const auto kg = gen::random_graph(rng, 150, 3);
    sparqlml::TrainGmlSpec spec;
    spec.name = "g" + std::to_string(i);
    spec.target_node_type = gen::type_iri(gen::pick(rng, 3));
    switch (gen::pick(rng, 3)) {
      case 0:
        spec.task_type = sparqlml::TaskType::NodeClassifier;
        spec.label_predicate = gen::kEx + "p" + std::to_string(gen::pick(rng, 5));
        break;
      case 1:
        spec.task_type = sparqlml::TaskType::LinkPredictor;
        spec.source_node_type = spec.target_node_type;
        spec.destination_node_type = gen::type_iri(gen::pick(rng, 3));
        break;
      default: spec.task_type = sparqlml::TaskType::NodeSimilarity; break;
    }
    dataset::TransformOptions opt;
    opt.seed = i;
    dataset::DatasetPackage pkg;
    try {
      pkg = dataset::transform(kg, spec, opt);
    } catch (const UserError&) {
      continue;
    }
    ++built;
    const auto bad = invariants::package_violations(kg, spec, pkg);
    c.expect(bad.empty(), "graph " + std::to_string(i) + ": " + (bad.empty() ? "" : bad.front()));
    c.expect(dataset::decode_files(dataset::encode_files(pkg)) == pkg, "graph " + std::to_string(i) + " encoding");
    if (i % 10 == 0) {
      const std::string a = dir / ("a" + std::to_string(i) + ".zip"), b = dir / ("b" + std::to_string(i) + ".zip");
      dataset::write_package(pkg, a);
      const auto back = dataset::read_package(a);
      c.expect(back == pkg, "zip round trip " + std::to_string(i));
      dataset::write_package(back, b);
      c.expect(util::read_file(a) == util::read_file(b), "zip bytes differ for graph " + std::to_string(i));
      auto files = dataset::encode_files(pkg);
      files.begin()->second += "x";
      bool caught = false;
      try {
        dataset::decode_files(files);
      } catch (const IoError&) {
        caught = true;
      }
      c.expect(caught, "tampered " + files.begin()->first + " accepted");
    }
  }
  c.expect(built >= 50, "only " + std::to_string(built) + " packages built");
  const double s = seconds_since(t0);
  c.expect(s < 30.0, "took " + std::to_string(s) + " s");
}

// 5. Model choice is optimal; plan shape follows the cost model.
void planner_optimality(Check& c) {
  const auto t0 = Clock::now();
  gen::Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto p = gen::random_problem(rng);
    const auto want = oracle::brute_force(p);
    try {
      const auto got = planner::select_models(p);
      c.expect(want && got.choice == want->choice, "problem " + std::to_string(i));
    } catch (const planner::Infeasible&) {
      c.expect(!want, "problem " + std::to_string(i) + " reported infeasible");
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t b = gen::pick(rng, 1000000), card = gen::pick(rng, 10000000);
    const auto pc = planner::choose_plan(b, card);
    const double per = 50.0 * static_cast<double>(b), dict = 50.0 + 0.01 * static_cast<double>(card);
    c.expect(pc.cost() == std::min(per, dict), "plan pair " + std::to_string(i));
  }
  const auto small = planner::choose_plan(100, 1200000);
  c.expect(small.shape == planner::Shape::PerBinding && small.cost_per_binding == 5000 &&
               small.cost_dictionary == 12050,
           "B=100, C=1.2M");
  const auto large = planner::choose_plan(100000, 1200000);
  c.expect(large.shape == planner::Shape::Dictionary && large.cost_per_binding == 5000000, "B=100000, C=1.2M");
  const double s = seconds_since(t0);
  c.expect(s < 10.0, "took " + std::to_string(s) + " s");
}

// 6. Dictionary plans make one inference call; per-binding plans make B.
void call_counts(Check& c) {
  toy::TempDir dir;
  platform::PlatformConfig gml_cfg;
  gml_cfg.workspace = dir / "gml";
  platform::Platform gml_side(gml_cfg);
  net::ServerThread server;
  gml::GmlRouteStats stats;
  platform::mount_platform_routes(server.server(), gml_side, platform::ServeMode::GmlOnly, &stats);
  server.start();

  platform::PlatformConfig cfg;
  cfg.workspace = dir / "ws";
  cfg.gmlaas_url = server.base_url();
  platform::Platform p(cfg);
  p.load(toy::sample("toy_dblp.nt"));
  p.train(sparqlml::parse_train_json(util::read_file(toy::sample("train_nc.json"))));
  const std::string text = util::read_file(toy::sample("paper_venue.sparqlml"));
  for (auto shape : {planner::Shape::Dictionary, planner::Shape::PerBinding}) {
    auto params = p.config().execute_params();
    params.force_shape = shape;
    const std::size_t before = stats.inference_calls;
    const auto r = *p.query(text, params).select;
    const std::size_t made = stats.inference_calls - before;
    const std::size_t b = r.plan.bindings.at(0).count;
    const std::size_t want = shape == planner::Shape::Dictionary ? 1 : b;
    c.expect(made == want && r.inference_calls == want,
             std::string(planner::to_string(shape)) + ": " + std::to_string(made) + " calls, expected " +
                 std::to_string(want));
    c.expect(b > 1 && r.table.size() == b, "B = " + std::to_string(b) + ", rows " + std::to_string(r.table.size()));
  }
}

// 7. Toy DBLP end to end: train, query against the oracles, delete.
void end_to_end(Check& c) {
  const auto t0 = Clock::now();
  toy::TempDir dir;
  platform::PlatformConfig cfg;
  cfg.workspace = dir / "ws";
  platform::Platform p(cfg);
  p.load(toy::sample("toy_dblp.nt"));

  const auto nc = p.query(util::read_file(toy::sample("train_nc.sparqlml")));
  c.expect(nc.train.has_value(), "train query did not train");
  if (!nc.train) return;
  {
    const auto pkg = dataset::read_package(nc.train->package_path);
    const auto adj = oracle::undirected(dataset::decode_triples(pkg));
    const auto& target = pkg.table(pkg.target_table).nodes;
    const std::set<Term> targets(target.begin(), target.end());
    std::map<dataset::NodeId, dataset::NodeId> label_of;
    for (const auto& l : pkg.labels) label_of[l.target_id] = l.label_id;
    std::map<Term, std::string> train_labels;
    for (auto id : pkg.splits.train) train_labels[target[id]] = pkg.label_dict[label_of[id]].value();
    const std::string majority = oracle::majority(train_labels);

    std::string text = util::read_file(toy::sample("paper_venue.sparqlml"));
    text.replace(text.find("select ?title ?venue"), 20, "select ?paper ?venue");
    const auto r = *p.query(text).select;
    const auto pc = r.table.require_column("paper"), vc = r.table.require_column("venue");
    c.expect(r.table.size() == target.size(), "NC rows " + std::to_string(r.table.size()));
    for (const auto& row : r.table.rows) {
      const std::string want = oracle::nlf_predict(*row[pc], adj, targets, train_labels, majority);
      c.expect(row[vc] && row[vc]->value() == want, "venue of " + row[pc]->to_string());
    }
  }

  const auto lp = p.train(sparqlml::parse_train_json(util::read_file(toy::sample("train_lp.json"))));
  {
    const auto pkg = dataset::read_package(lp.package_path);
    const auto adj = oracle::undirected(dataset::decode_triples(pkg));
    const auto& dst = pkg.table(pkg.destination_table).nodes;
    const std::set<Term> candidates(dst.begin(), dst.end());
    const auto r = *p.query(util::read_file(toy::sample("author_affiliation.sparqlml"))).select;
    const auto ac = r.table.require_column("author"), fc = r.table.require_column("affiliation");
    std::map<Term, std::set<std::string>> got;
    for (const auto& row : r.table.rows) got[*row[ac]].insert(row[fc]->value());
    c.expect(!got.empty(), "no link predictions");
    for (const auto& [author, affs] : got) {
      c.expect(affs.size() <= 10, author.to_string() + " has " + std::to_string(affs.size()) + " links");
      std::set<std::string> want;
      for (const auto& [iri, score] : oracle::cn_rank(author, adj, candidates, 10)) want.insert(iri);
      c.expect(affs == want, "links of " + author.to_string());
    }
  }

  const auto del = p.query(util::read_file(toy::sample("delete_venue_classifier.sparqlml")));
  c.expect(del.deleted.size() == 1, "deleted " + std::to_string(del.deleted.size()) + " models");
  try {
    p.query(util::read_file(toy::sample("paper_venue.sparqlml")));
    c.expect(false, "query after delete succeeded");
  } catch (const NotFoundError& e) {
    c.expect(std::string(e.what()).find("no model matches") != std::string::npos, e.what());
  }
  const double s = seconds_since(t0);
  c.expect(s < 60.0, "took " + std::to_string(s) + " s");
}

// 8. The chosen method always fits the budget.
void budget_feasibility(Check& c) {
  const auto fig7 = sparqlml::parse(toy::kFig7);
  const auto& b = fig7.train_payload->budget;
  c.expect(b.max_memory_bytes == (50ull << 30) && b.max_time_seconds == 3600 &&
               b.priority == sparqlml::Priority::ModelScore,
           "train budget parsed wrong");
  gen::Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto profiles = gen::random_profiles(rng);
    const auto stats = gen::random_stats(rng);
    sparqlml::Budget budget{1 + gen::pick(rng, 1ull << 29), 1 + gen::pick(rng, 600),
                            static_cast<sparqlml::Priority>(gen::pick(rng, 3))};
    bool any = false;
    for (const auto& p : profiles) any = any || gml::fits(gml::estimate_cost(p, stats), budget);
    try {
      const auto m = gml::select_method(profiles, stats, budget);
      c.expect(gml::fits(gml::estimate_cost(m, stats), budget), "case " + std::to_string(i) + " over budget");
      if (budget.priority == sparqlml::Priority::ModelScore) {
        c.expect(oracle::best_method(profiles, stats, budget)->name == m.name, "case " + std::to_string(i));
      }
    } catch (const gml::BudgetInfeasible&) {
      c.expect(!any, "case " + std::to_string(i) + " reported infeasible");
    }
  }
}

// 9. Exact kNN equals a full scan; self-similarity is 1.
void knn_exactness(Check& c) {
  gen::Rng rng(9);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + gen::pick(rng, 32), n = 1 + gen::pick(rng, 500);
    gml::EmbeddingStore store(dim);
    std::vector<std::vector<double>> vs;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> v(dim);
      for (auto& x : v) x = normal(rng);
      store.put("n" + std::to_string(j), v);
      vs.push_back(std::move(v));
    }
    std::vector<double> q(dim);
    for (auto& x : q) x = normal(rng);
    std::vector<std::pair<double, std::string>> truth;
    for (std::size_t j = 0; j < n; ++j) truth.emplace_back(-oracle::cosine(q, vs[j]), "n" + std::to_string(j));
    std::sort(truth.begin(), truth.end());
    const std::size_t k = 1 + gen::pick(rng, 20);
    const auto hits = store.knn(q, k);
    bool same = hits.size() == std::min(k, n);
    for (std::size_t j = 0; same && j < hits.size(); ++j) {
      same = hits[j].iri == truth[j].second && std::abs(hits[j].score + truth[j].first) < 1e-12;
    }
    c.expect(same, "store " + std::to_string(i));
    const std::size_t self = gen::pick(rng, n);
    c.expect(std::abs(store.knn(vs[self], 1).front().score - 1.0) < 1e-9, "self-similarity in store " + std::to_string(i));
  }
}

// 10. KGMeta export and import preserve every model.
void kgmeta_roundtrip(Check& c) {
  rdf::Store store;
  rdf::EmbeddedBackend backend(store, "urn:kgnet:data");
  kgmeta::Governor governor(backend);
  kgmeta::ModelMetadata nc;
  nc.task_type = sparqlml::TaskType::NodeClassifier;
  nc.target_node_type = toy::kDblp + "Publication";
  nc.label_predicate = toy::kDblp + "venue";
  nc.method_name = "neighbor-label-frequency";
  nc.accuracy = 0.75;
  nc.inference_time_ms = 0.125;
  nc.model_cardinality = 40;
  nc.trained_on = "urn:kgnet:data";
  nc.artifact_ref = "nc-1";
  nc.created_at = "2024-01-01T00:00:00Z";
  nc.dataset_digest = "0f";
  kgmeta::ModelMetadata lp = nc;
  lp.task_type = sparqlml::TaskType::LinkPredictor;
  lp.target_node_type = toy::kDblp + "person";
  lp.label_predicate.reset();
  lp.source_node_type = toy::kDblp + "person";
  lp.destination_node_type = toy::kDblp + "affiliation";
  lp.method_name = "common-neighbors";
  lp.artifact_ref = "lp-1";
  const std::string nc_uri = governor.register_model(nc), lp_uri = governor.register_model(lp);

  rdf::Store fresh_store;
  rdf::EmbeddedBackend fresh_backend(fresh_store, "urn:kgnet:data");
  kgmeta::Governor fresh(fresh_backend);
  fresh.import_ntriples(governor.export_ntriples());
  c.expect(fresh.find(nc_uri) == governor.find(nc_uri) && governor.find(nc_uri), "node classifier metadata");
  c.expect(fresh.find(lp_uri) == governor.find(lp_uri) && governor.find(lp_uri), "link predictor metadata");
  c.expect(fresh.list_models() == governor.list_models(), "model lists differ");
  const auto found = fresh.lookup_models(sparqlml::TaskType::LinkPredictor,
                                         {{sparqlml::ConstraintKey::SourceNode, toy::dblp("person")},
                                          {sparqlml::ConstraintKey::DestinationNode, toy::dblp("affiliation")}});
  c.expect(found.size() == 1 && found[0] == *governor.find(lp_uri), "link predictor lookup after import");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"SPARQL-ML parse and render round trip", parser_roundtrip},
      {"meta-sampling scope equals traversal oracle", sampler_scope},
      {"sampled transform uses less memory and time", sampling_savings},
      {"dataset package invariants and integrity", package_integrity},
      {"model choice and plan shape are cost-optimal", planner_optimality},
      {"inference call counts per plan shape", call_counts},
      {"toy DBLP end to end", end_to_end},
      {"selected method fits the budget", budget_feasibility},
      {"kNN equals full scan", knn_exactness},
      {"KGMeta export/import round trip", kgmeta_roundtrip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (c.failures.empty() ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first;
    for (const auto& f : c.failures) line << "\n    " << f;
    std::cout << line.str() << std::endl;
    if (!c.failures.empty()) ++failed;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
