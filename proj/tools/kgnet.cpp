#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgnet/dataset/package_io.hpp"
#include "kgnet/error.hpp"
#include "kgnet/platform/platform.hpp"
#include "kgnet/platform/report.hpp"
#include "kgnet/platform/server.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/util/zip.hpp"

namespace {

using namespace kgnet;

std::atomic<bool> g_stop{false};

struct Options {
  std::string config_path;
  std::string workspace;
  std::string data_endpoint;
  std::string kgmeta_endpoint;
  std::string gmlaas_url;
  std::string objective;
  std::optional<double> t_max;
  std::optional<double> a_min;
  bool lenient = false;
  bool json = false;
};

platform::PlatformConfig make_config(const Options& o) {
  platform::PlatformConfig c;
  if (!o.config_path.empty()) platform::apply_file(c, o.config_path);
  platform::apply_env(c);
  if (!o.workspace.empty()) c.workspace = o.workspace;
  if (!o.data_endpoint.empty()) c.data_endpoint = o.data_endpoint;
  if (!o.kgmeta_endpoint.empty()) c.kgmeta_endpoint = o.kgmeta_endpoint;
  if (!o.gmlaas_url.empty()) c.gmlaas_url = o.gmlaas_url;
  if (!o.objective.empty()) c.objective = platform::objective_from(o.objective);
  if (o.t_max) c.t_max_ms = *o.t_max;
  if (o.a_min) c.a_min = *o.a_min;
  if (o.lenient) c.lenient = true;
  c.validate();
  return c;
}

std::string cell(const std::optional<rdf::Term>& t) {
  if (!t) return "";
  return t->is_literal() ? t->value() : t->to_string();
}

void print_table(const rdf::BindingTable& t) {
  std::vector<std::size_t> width;
  for (const auto& v : t.variables) width.push_back(v.size() + 1);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell(row[i]).size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      s += cells[i];
      if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    std::cout << s << "\n";
  };
  std::vector<std::string> head;
  for (const auto& v : t.variables) head.push_back("?" + v);
  line(head);
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(cell(c));
    line(cells);
  }
  std::cout << "(" << t.rows.size() << " row" << (t.rows.size() == 1 ? "" : "s") << ")\n";
}

void print_model_row(const kgmeta::ModelMetadata& m) {
  std::cout << m.model_uri << "  " << sparqlml::to_string(m.task_type) << "  " << m.method_name
            << "  accuracy=" << util::format_double(m.accuracy)
            << "  time_ms=" << util::format_double(m.inference_time_ms) << "  cardinality=" << m.model_cardinality
            << "\n";
}

void print_train(const platform::TrainOutcome& t) {
  for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "trained " << t.model.model_uri << "\n"
            << "  method       " << t.model.method_name << "\n"
            << "  scope        d" << t.scope.d << "h" << t.scope.h << ", " << t.kg_prime_triples << " triples\n"
            << "  accuracy     " << util::format_double(t.model.accuracy) << "\n"
            << "  inference    " << util::format_double(t.model.inference_time_ms) << " ms\n"
            << "  cardinality  " << t.model.model_cardinality << "\n"
            << "  package      " << t.package_path << "\n";
}

void emit(bool json, const nlohmann::json& j, auto&& text) {
  if (json) {
    std::cout << j.dump(2) << "\n";
  } else {
    text();
  }
}

int run(int argc, char** argv) {
  CLI::App app{"kgnet: SPARQL^ML query and graph machine learning platform"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // frees -h for `sample --h`
  Options o;
  app.add_option("--config", o.config_path, "JSON config file");
  app.add_option("--workspace", o.workspace, "Workspace directory (default .kgnet)");
  app.add_option("--data-endpoint", o.data_endpoint, "Remote SPARQL endpoint for the data KG");
  app.add_option("--kgmeta-endpoint", o.kgmeta_endpoint, "Remote SPARQL endpoint holding KGMeta");
  app.add_option("--gmlaas", o.gmlaas_url, "Base URL of a remote GMLaaS");
  app.add_flag("--json", o.json, "Machine-readable output");

  auto* serve = app.add_subcommand("serve", "Serve SPARQL^ML and GMLaaS over HTTP");
  std::string mode = "all";
  std::string host;
  std::optional<int> port;
  serve->add_option("--mode", mode, "all | sparqlml | gml")->check(CLI::IsMember({"all", "sparqlml", "gml"}));
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  auto* load = app.add_subcommand("load", "Load an N-Triples file into the embedded store");
  std::string load_file;
  std::string load_graph;
  load->add_option("file", load_file)->required()->check(CLI::ExistingFile);
  load->add_option("--graph", load_graph, "Target graph (default: the data graph)");

  auto* sample = app.add_subcommand("sample", "Extract the task-specific subgraph of a target type");
  sampler::SamplingSpec scope;
  std::string sample_out;
  sample->add_option("--target", scope.target_node_type, "Target node type IRI")->required();
  sample->add_option("--d", scope.d, "1: outgoing, 2: both directions")->check(CLI::IsMember({1, 2}));
  sample->add_option("--h", scope.h, "Hops")->check(CLI::IsMember({1, 2}));
  sample->add_option("--out", sample_out, "Write the subgraph as N-Triples");

  auto* transform = app.add_subcommand("transform", "Sample and transform a task's subgraph into a dataset package");
  std::string transform_task;
  std::string transform_out;
  transform->add_option("task", transform_task, "TrainGML JSON file")->required()->check(CLI::ExistingFile);
  transform->add_option("--out", transform_out, "Package path (.zip or directory)")->required();

  auto* train = app.add_subcommand("train", "Train a model from a TrainGML JSON file and register it");
  std::string train_file;
  train->add_option("task", train_file)->required()->check(CLI::ExistingFile);

  auto* query = app.add_subcommand("query", "Run a SPARQL^ML query (SELECT, INSERT or DELETE)");
  std::string query_file;
  std::string format = "table";
  query->add_option("file", query_file, "Query file, or - for stdin")->required();
  query->add_option("--format", format, "table | csv")->check(CLI::IsMember({"table", "csv"}));
  query->add_option("--objective", o.objective, "MaxAccuracy | MinTime");
  query->add_option("--t-max", o.t_max, "Inference time limit in ms (MaxAccuracy)");
  query->add_option("--a-min", o.a_min, "Accuracy floor (MinTime)");
  query->add_flag("--lenient", o.lenient, "Leave unresolved predictions unbound");
  bool explain = false;
  query->add_flag("--explain", explain, "Print the chosen plan to stderr");

  auto* models = app.add_subcommand("models", "Inspect or delete trained models");
  models->require_subcommand(1);
  auto* models_list = models->add_subcommand("list", "List the models in KGMeta");
  auto* models_delete = models->add_subcommand("delete", "Delete models and their artifacts");
  std::vector<std::string> delete_uris;
  models_delete->add_option("uri", delete_uris, "Model URIs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto cfg = make_config(o);
  if (!host.empty()) cfg.host = host;
  if (port) cfg.port = *port;
  platform::Platform p(cfg);

  if (*serve) {
    const auto m = mode == "gml" ? platform::ServeMode::GmlOnly
                   : mode == "sparqlml" ? platform::ServeMode::SparqlMlOnly
                                        : platform::ServeMode::All;
    net::ServerThread server;
    platform::mount_platform_routes(server.server(), p, m);
    const int bound = server.start(cfg.host, cfg.port);
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    std::cerr << "kgnet serving on http://" << cfg.host << ":" << bound << " (" << mode << ")\n";
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return 0;
  }
  if (*load) {
    const std::string graph = load_graph.empty() ? cfg.data_graph : load_graph;
    const std::size_t added = p.load(load_file, graph);
    emit(o.json, {{"graph", graph}, {"added", added}, {"size", p.store().size(graph)}},
         [&] { std::cout << "loaded " << added << " triples into <" << graph << ">\n"; });
    return 0;
  }
  if (*sample) {
    const auto sub = p.sample(scope);
    for (const auto& w : sub.warnings) std::cerr << "warning: " << w << "\n";
    if (!sample_out.empty()) rdf::write_ntriples_file(sample_out, sub.triples);
    emit(o.json, {{"triples", sub.triples.size()}, {"pages", sub.pages}, {"warnings", sub.warnings}}, [&] {
      if (sample_out.empty()) {
        std::cout << rdf::serialize_ntriples(sub.triples);
      } else {
        std::cout << sub.triples.size() << " triples written to " << sample_out << "\n";
      }
    });
    return 0;
  }
  if (*transform) {
    const auto spec = sparqlml::parse_train_json(util::read_file(transform_task));
    const auto sub = p.task_subgraph(spec);
    if (sub.triples.empty()) {
      throw UserError("nothing to transform: no node of type <" + spec.target_node_type + "> in the data graph");
    }
    const auto pkg = dataset::transform(sub.triples, spec, p.transform_options());
    dataset::write_package(pkg, transform_out);
    for (const auto& w : pkg.warnings) std::cerr << "warning: " << w << "\n";
    emit(o.json, {{"package", transform_out}, {"kg_digest", pkg.kg_digest}, {"stats", dataset::to_json(pkg.stats)}},
         [&] {
           std::cout << "wrote " << transform_out << " (" << pkg.node_tables.size() << " node tables, "
                     << pkg.relations.size() << " relations, " << pkg.labels.size() << " labels)\n";
         });
    return 0;
  }
  if (*train) {
    const auto t = p.train(sparqlml::parse_train_json(util::read_file(train_file)));
    emit(o.json, platform::train_json(t), [&] { print_train(t); });
    return 0;
  }
  if (*query) {
    std::string text;
    if (query_file == "-") {
      text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
      text = util::read_file(query_file);
    }
    const auto out = p.query(text, p.config().execute_params());
    if (o.json) {
      std::cout << platform::outcome_json(out).dump(2) << "\n";
      return 0;
    }
    switch (out.kind) {
      case sparqlml::SparqlMlAst::Kind::Select:
        if (explain) std::cerr << platform::plan_json(out.select->plan).dump(2) << "\n";
        if (format == "csv") {
          std::cout << rdf::bindings_to_csv(out.select->table);
        } else {
          print_table(out.select->table);
        }
        break;
      case sparqlml::SparqlMlAst::Kind::InsertTrain: print_train(*out.train); break;
      case sparqlml::SparqlMlAst::Kind::DeleteModel:
        for (const auto& uri : out.deleted) std::cout << "deleted " << uri << "\n";
        std::cout << out.deleted.size() << " model" << (out.deleted.size() == 1 ? "" : "s") << " deleted\n";
        break;
    }
    return 0;
  }
  if (*models_list) {
    const auto all = p.governor().list_models();
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : all) j.push_back(platform::model_json(m));
    emit(o.json, {{"models", j}}, [&] {
      for (const auto& m : all) print_model_row(m);
      std::cout << all.size() << " model" << (all.size() == 1 ? "" : "s") << "\n";
    });
    return 0;
  }
  if (*models_delete) {
    const auto deleted = p.delete_by_uri(delete_uris);
    emit(o.json, {{"deleted", deleted}}, [&] {
      for (const auto& uri : deleted) std::cout << "deleted " << uri << "\n";
    });
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const kgnet::UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const kgnet::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  }
}
