#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kgnet/dataset/package_io.hpp"
#include "kgnet/dataset/transform.hpp"
#include "kgnet/error.hpp"
#include "kgnet/gml/client.hpp"
#include "kgnet/gml/http_api.hpp"
#include "kgnet/gml/service.hpp"
#include "kgnet/kgmeta/governor.hpp"
#include "kgnet/net/sparql_client.hpp"
#include "kgnet/planner/executor.hpp"
#include "kgnet/platform/config.hpp"
#include "kgnet/platform/workspace.hpp"
#include "kgnet/rdf/backend.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/rdf/store.hpp"
#include "kgnet/sampler/meta_sampler.hpp"
#include "kgnet/sparqlml/parser.hpp"

namespace kgnet::platform {

struct TrainOutcome {
  kgmeta::ModelMetadata model;
  sampler::SamplingSpec scope;
  std::size_t kg_prime_triples = 0;
  std::string package_path;
  dataset::DatasetStats stats;
  std::vector<std::string> warnings;
};

struct QueryOutcome {
  sparqlml::SparqlMlAst::Kind kind = sparqlml::SparqlMlAst::Kind::Select;
  std::optional<planner::ExecutionResult> select;
  std::optional<TrainOutcome> train;
  std::vector<std::string> deleted;
};

/// The assembled platform: data and KGMeta backends, the governor and a
/// GMLaaS client, each embedded or remote per the config. Embedded graphs
/// live in the workspace and are saved after every mutation.
class Platform {
 public:
  explicit Platform(PlatformConfig cfg) : cfg_(std::move(cfg)), ws_(cfg_.workspace) {
    cfg_.validate();
    ws_.create();
    if (cfg_.data_endpoint.empty() || cfg_.kgmeta_endpoint.empty()) ws_.load_store(store_);
    if (cfg_.data_endpoint.empty()) {
      data_ = std::make_unique<rdf::EmbeddedBackend>(store_, cfg_.data_graph);
    } else {
      data_ = std::make_unique<net::SparqlClient>(cfg_.data_endpoint);
    }
    if (cfg_.kgmeta_endpoint.empty()) {
      meta_ = std::make_unique<rdf::EmbeddedBackend>(store_, cfg_.kgmeta_graph);
    } else {
      meta_ = std::make_unique<net::SparqlClient>(cfg_.kgmeta_endpoint);
    }
    governor_ = std::make_unique<kgmeta::Governor>(*meta_, cfg_.kgmeta_graph);
    if (cfg_.gmlaas_url.empty()) {
      auto profiles = cfg_.methods_path.empty() ? gml::default_profiles() : gml::load_profiles(cfg_.methods_path);
      service_ = std::make_unique<gml::GmlService>(ws_.artifacts_dir(), std::move(profiles));
      gml_ = std::make_unique<gml::LocalGmlClient>(*service_);
    } else {
      gml_ = std::make_unique<gml::HttpGmlClient>(cfg_.gmlaas_url);
    }
  }

  const PlatformConfig& config() const { return cfg_; }
  const Workspace& workspace() const { return ws_; }
  rdf::Store& store() { return store_; }
  rdf::SparqlBackend& data() { return *data_; }
  kgmeta::Governor& governor() { return *governor_; }
  gml::GmlClient& gml() { return *gml_; }
  /// Null when GMLaaS is remote.
  gml::GmlService* service() { return service_.get(); }
  bool embedded_data() const { return cfg_.data_endpoint.empty(); }

  /// Adds the triples of an N-Triples file to `graph` (default: the data
  /// graph). Returns the number of new triples.
  std::size_t load(const std::string& path, std::optional<std::string> graph = std::nullopt) {
    if (!embedded_data()) throw UserError("load needs the embedded store; the data graph is remote");
    const auto triples = rdf::read_ntriples_file(path);
    std::lock_guard lock(write_mutex_);
    const std::size_t added = store_.insert(graph.value_or(cfg_.data_graph), triples);
    persist();
    return added;
  }

  sampler::Subgraph sample(const sampler::SamplingSpec& spec) {
    return sampler::extract_subgraph(*data_, spec, cfg_.sampler_page_size);
  }

  dataset::TransformOptions transform_options() const {
    dataset::TransformOptions o;
    o.split_strategy = cfg_.split_strategy;
    o.ratios = cfg_.split_ratios;
    o.seed = cfg_.split_seed;
    o.community_edge_type = cfg_.community_edge_type;
    return o;
  }

  /// Meta-sampling scope for `spec`: the payload override, else the task default.
  static sampler::SamplingSpec scope_of(const sparqlml::TrainGmlSpec& spec) {
    sampler::SamplingSpec s = sampler::default_spec(spec.task_type, spec.target_node_type);
    if (spec.sampling) {
      s.d = spec.sampling->d;
      s.h = spec.sampling->h;
    }
    return s;
  }

  /// KG' for a task. Link prediction also gets the rdf:type triples of the
  /// destination nodes adjacent to a source node, which lie one hop outside
  /// a d2h1 scope.
  sampler::Subgraph task_subgraph(const sparqlml::TrainGmlSpec& spec) {
    auto scope = scope_of(spec);
    auto sub = sample(scope);
    if (spec.task_type == sparqlml::TaskType::LinkPredictor && spec.destination_node_type && !sub.triples.empty()) {
      const std::string type = "<" + std::string(rdf::vocab::kRdfType) + ">";
      const std::string src = "?s " + type + " <" + spec.target_node_type + "> . ";
      const std::string dst = "?o " + type + " <" + *spec.destination_node_type + "> .";
      const auto typing = data_->construct("CONSTRUCT { " + dst + " }\nWHERE {\n  { " + src + "?s ?p ?o . " + dst +
                                           " }\n  UNION { " + src + "?o ?p ?s . " + dst + " }\n}");
      std::set<rdf::Triple> all(sub.triples.begin(), sub.triples.end());
      all.insert(typing.begin(), typing.end());
      sub.triples.assign(all.begin(), all.end());
    }
    return sub;
  }

  /// Sample, transform, train, register. A model rejected as a duplicate has
  /// its fresh artifact removed before the error propagates.
  TrainOutcome train(sparqlml::TrainGmlSpec spec) {
    if (spec.budget.max_memory_bytes == 0 && spec.budget.max_time_seconds == 0 && cfg_.default_budget) {
      spec.budget = *cfg_.default_budget;
    }
    TrainOutcome out;
    out.scope = scope_of(spec);
    auto sub = task_subgraph(spec);
    out.warnings = sub.warnings;
    if (sub.triples.empty()) {
      throw UserError("nothing to train on: no node of type <" + spec.target_node_type + "> in the data graph");
    }
    out.kg_prime_triples = sub.triples.size();
    auto pkg = dataset::transform(sub.triples, spec, transform_options());
    out.stats = pkg.stats;
    out.warnings.insert(out.warnings.end(), pkg.warnings.begin(), pkg.warnings.end());
    const std::string stem = (spec.name.empty() ? std::string("task") : dataset::detail::sanitize(spec.name)) + "-" +
                             pkg.kg_digest.substr(0, 12);
    out.package_path = (std::filesystem::absolute(ws_.datasets_dir()) / (stem + ".zip")).string();
    dataset::write_package(pkg, out.package_path);

    std::lock_guard lock(write_mutex_);
    const gml::TrainedModel trained = gml_->train(spec, out.package_path);
    out.warnings.insert(out.warnings.end(), trained.warnings.begin(), trained.warnings.end());
    auto& m = out.model;
    m.task_type = spec.task_type;
    m.target_node_type = spec.target_node_type;
    m.label_predicate = spec.label_predicate;
    m.source_node_type = spec.source_node_type;
    m.destination_node_type = spec.destination_node_type;
    m.method_name = trained.method_name;
    m.accuracy = trained.metrics.accuracy;
    m.inference_time_ms = trained.metrics.inference_ms;
    m.model_cardinality = trained.metrics.cardinality;
    m.trained_on = trained_on();
    m.sampling_d = out.scope.d;
    m.sampling_h = out.scope.h;
    m.artifact_ref = trained.artifact_ref;
    m.created_at = trained.created_at;
    m.dataset_digest = trained.dataset_digest;
    m.name = spec.name;
    try {
      m.model_uri = governor_->register_model(m);
    } catch (const kgmeta::DuplicateModel&) {
      gml_->delete_artifacts({trained.artifact_ref});
      throw;
    }
    if (auto found = governor_->find(m.model_uri)) m = *found;
    persist();
    return out;
  }

  planner::ExecutionResult select(const sparqlml::SparqlMlAst& ast, const planner::ExecuteParams& params) {
    return planner::execute(ast, *data_, *governor_, *gml_, params);
  }

  std::vector<std::string> delete_models(const sparqlml::SparqlMlAst& ast) {
    std::lock_guard lock(write_mutex_);
    std::vector<std::string> out;
    for (const auto& g : ast.gml_patterns) {
      for (auto& uri : governor_->delete_models(g.task_type, g.constraints, *gml_)) out.push_back(std::move(uri));
    }
    persist();
    return out;
  }

  /// Parses and dispatches one SPARQL^ML statement.
  QueryOutcome query(std::string_view text) { return query(text, cfg_.execute_params()); }

  QueryOutcome query(std::string_view text, const planner::ExecuteParams& params) {
    const auto ast = sparqlml::parse(text);
    QueryOutcome out;
    out.kind = ast.kind;
    switch (ast.kind) {
      case sparqlml::SparqlMlAst::Kind::Select: out.select = select(ast, params); break;
      case sparqlml::SparqlMlAst::Kind::InsertTrain: out.train = train(*ast.train_payload); break;
      case sparqlml::SparqlMlAst::Kind::DeleteModel: out.deleted = delete_models(ast); break;
    }
    return out;
  }

  /// Removes the models with the given URIs (artifacts first).
  std::vector<std::string> delete_by_uri(const std::vector<std::string>& uris) {
    std::lock_guard lock(write_mutex_);
    auto out = governor_->delete_by_uri(uris, *gml_);
    persist();
    return out;
  }

 private:
  std::string trained_on() const {
    if (!embedded_data()) return cfg_.data_endpoint;
    if (rdf::is_absolute_iri(cfg_.data_graph)) return cfg_.data_graph;
    return "urn:kgnet:graph:" + cfg_.data_graph;
  }

  void persist() {
    if (cfg_.data_endpoint.empty() || cfg_.kgmeta_endpoint.empty()) ws_.save_store(store_);
  }

  PlatformConfig cfg_;
  Workspace ws_;
  rdf::Store store_;
  std::unique_ptr<rdf::SparqlBackend> data_;
  std::unique_ptr<rdf::SparqlBackend> meta_;
  std::unique_ptr<kgmeta::Governor> governor_;
  std::unique_ptr<gml::GmlService> service_;
  std::unique_ptr<gml::GmlClient> gml_;
  std::mutex write_mutex_;
};

}  // namespace kgnet::platform
