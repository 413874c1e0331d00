#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "kgnet/error.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/rdf/store.hpp"
#include "kgnet/util/hash.hpp"
#include "kgnet/util/zip.hpp"

namespace kgnet::platform {

/// On-disk state of the embedded platform:
///   graphs/index.json    graph name -> N-Triples file
///   graphs/<hash>.nt     one file per named graph
///   artifacts/           trained models
///   datasets/            transformed packages
class Workspace {
 public:
  explicit Workspace(std::string root) : root_(std::move(root)) {}

  const std::string& root() const { return root_; }
  std::string path(const std::string& rel) const { return (std::filesystem::path(root_) / rel).string(); }
  std::string artifacts_dir() const { return path("artifacts"); }
  std::string datasets_dir() const { return path("datasets"); }

  void create() const {
    namespace fs = std::filesystem;
    fs::create_directories(path("graphs"));
    fs::create_directories(artifacts_dir());
    fs::create_directories(datasets_dir());
  }

  /// Loads every saved graph into `store`.
  void load_store(rdf::Store& store) const {
    const std::string index = path("graphs/index.json");
    if (!std::filesystem::exists(index)) return;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(util::read_file(index));
      for (const auto& [graph, file] : j.items()) {
        const auto triples = rdf::read_ntriples_file(path("graphs/" + file.get<std::string>()));
        store.insert(graph, triples);
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError("workspace graph index is corrupt: " + std::string(e.what()));
    } catch (const UserError& e) {
      throw IoError("workspace graph file is corrupt: " + std::string(e.what()));
    }
  }

  /// Rewrites the saved graphs from `store`. Each file is written to a
  /// temporary name and renamed into place.
  void save_store(const rdf::Store& store) const {
    namespace fs = std::filesystem;
    create();
    nlohmann::json index = nlohmann::json::object();
    for (const auto& graph : store.graph_names()) {
      const std::string file = util::sha256_hex(graph).substr(0, 16) + ".nt";
      auto triples = store.triples(graph);
      std::sort(triples.begin(), triples.end());
      const std::string tmp = path("graphs/" + file + ".tmp");
      rdf::write_ntriples_file(tmp, triples);
      fs::rename(tmp, path("graphs/" + file));
      index[graph] = file;
    }
    const std::string tmp = path("graphs/index.json.tmp");
    util::write_file(tmp, index.dump(2) + "\n");
    fs::rename(tmp, path("graphs/index.json"));
    for (const auto& e : fs::directory_iterator(path("graphs"))) {
      const std::string name = e.path().filename().string();
      if (name == "index.json") continue;
      bool used = false;
      for (const auto& [g, f] : index.items()) used = used || f.get<std::string>() == name;
      if (!used) fs::remove(e.path());
    }
  }

 private:
  std::string root_;
};

}  // namespace kgnet::platform
