#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "kgnet/dataset/package.hpp"
#include "kgnet/error.hpp"
#include "kgnet/gml/method.hpp"
#include "kgnet/gml/model.hpp"
#include "kgnet/gml/trainers.hpp"
#include "kgnet/util/hash.hpp"
#include "kgnet/util/zip.hpp"

namespace kgnet::gml {

struct NodeClassResult {
  std::map<std::string, std::string> predictions;
  std::vector<std::string> unresolved;
  bool operator==(const NodeClassResult&) const = default;
};

struct LinkResult {
  std::map<std::string, std::vector<RankedLink>> links;
  std::vector<std::string> unresolved;
  bool operator==(const LinkResult&) const = default;
};

/// Query of a knn call: a stored node IRI or a raw vector.
using KnnQuery = std::variant<std::string, std::vector<double>>;

/// Training, artifact storage and inference. Artifacts are JSON files
/// `<dir>/<ref>.json`; loaded models are cached read-only.
class GmlService {
 public:
  explicit GmlService(std::string artifact_dir, std::vector<MethodProfile> profiles = default_profiles())
      : dir_(std::move(artifact_dir)), profiles_(std::move(profiles)) {
    if (profiles_.empty()) throw UserError("no method profiles configured");
    for (const auto& p : profiles_) p.validate();
    std::filesystem::create_directories(dir_);
  }

  const std::vector<MethodProfile>& profiles() const { return profiles_; }
  const std::string& artifact_dir() const { return dir_; }

  /// The profile `task` names, or the best one within its budget.
  MethodProfile choose_method(const sparqlml::TrainGmlSpec& task, const dataset::DatasetStats& stats) const {
    if (task.method_override) {
      for (const auto& p : profiles_) {
        if (p.name == *task.method_override) {
          if (!p.supports(task.task_type)) {
            throw UserError("method '" + p.name + "' does not support " +
                            std::string(sparqlml::to_string(task.task_type)));
          }
          return p;
        }
      }
      throw UserError("unknown method '" + *task.method_override + "'");
    }
    return select_method(profiles_, stats, task.budget, task.task_type);
  }

  /// Trains, persists and caches a model. Requests for one task name run one at a time.
  TrainedModel train(const sparqlml::TrainGmlSpec& task, const dataset::DatasetPackage& pkg) {
    std::mutex& task_lock = [&]() -> std::mutex& {
      std::lock_guard g(train_locks_mutex_);
      auto& slot = train_locks_[task.name];
      if (!slot) slot = std::make_unique<std::mutex>();
      return *slot;
    }();
    std::lock_guard serial(task_lock);
    const MethodProfile method = choose_method(task, pkg.stats);
    TrainedModel m = train_model(task, pkg, method);
    m.artifact_ref = mint_ref(m);
    auto shared = std::make_shared<const TrainedModel>(m);
    {
      std::unique_lock lock(mutex_);
      util::write_file(path_of(m.artifact_ref), to_json(m).dump());
      cache_[m.artifact_ref] = shared;
    }
    return m;
  }

  /// Unknown targets go to `unresolved`.
  NodeClassResult infer_node_class(const std::string& ref, const std::vector<std::string>& targets) const {
    auto m = load(ref);
    const auto* nc = std::get_if<NodeClassModel>(&m->state);
    if (nc == nullptr) throw UserError("model " + ref + " is not a node classifier");
    NodeClassResult r;
    for (const auto& t : targets) {
      if (const auto* label = nc->predict(t)) {
        r.predictions[t] = *label;
      } else {
        r.unresolved.push_back(t);
      }
    }
    dedupe(r.unresolved);
    return r;
  }

  /// Every prediction of the model.
  NodeClassResult infer_node_class_all(const std::string& ref) const {
    auto m = load(ref);
    const auto* nc = std::get_if<NodeClassModel>(&m->state);
    if (nc == nullptr) throw UserError("model " + ref + " is not a node classifier");
    return {nc->predictions, {}};
  }

  LinkResult infer_links(const std::string& ref, const std::vector<std::string>& sources, std::size_t k) const {
    if (k < 1) throw UserError("link inference needs k >= 1");
    auto m = load(ref);
    const auto* lm = std::get_if<LinkModel>(&m->state);
    if (lm == nullptr) throw UserError("model " + ref + " is not a link predictor");
    LinkResult r;
    for (const auto& s : sources) {
      auto idx = lm->index_of(s);
      if (!idx || !lm->is_source(*idx)) {
        r.unresolved.push_back(s);
        continue;
      }
      r.links[s] = lm->rank(*idx, k);
    }
    dedupe(r.unresolved);
    return r;
  }

  std::vector<KnnHit> knn(const std::string& ref, const KnnQuery& query, std::size_t k) const {
    auto m = load(ref);
    const auto* sm = std::get_if<SimilarityModel>(&m->state);
    if (sm == nullptr) throw UserError("model " + ref + " has no embedding store");
    if (const auto* iri = std::get_if<std::string>(&query)) {
      if (!sm->store.contains(*iri)) throw NotFoundError("no embedding for <" + *iri + "> in model " + ref);
      return sm->store.knn(*iri, k);
    }
    return sm->store.knn(std::get<std::vector<double>>(query), k);
  }

  /// Artifact summary without the model state.
  nlohmann::json info(const std::string& ref) const { return summary_json(*load(ref)); }

  bool exists(const std::string& ref) const {
    if (!valid_ref(ref)) return false;
    std::shared_lock lock(mutex_);
    return cache_.contains(ref) || std::filesystem::exists(path_of(ref));
  }

  std::vector<std::string> list_refs() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Embedding entries held by all stored models.
  std::size_t embedding_count() const {
    std::size_t n = 0;
    for (const auto& ref : list_refs()) {
      auto m = load(ref);
      if (const auto* sm = std::get_if<SimilarityModel>(&m->state)) n += sm->store.size();
    }
    return n;
  }

  /// Removes every listed artifact and its embeddings, or none: unknown refs
  /// raise NotFoundError before anything is touched.
  void delete_artifacts(const std::vector<std::string>& refs) {
    namespace fs = std::filesystem;
    std::unique_lock lock(mutex_);
    for (const auto& ref : refs) {
      if (!valid_ref(ref) || !fs::exists(path_of(ref))) throw NotFoundError("unknown model artifact '" + ref + "'");
    }
    std::vector<std::pair<std::string, std::string>> moved;
    for (const auto& ref : refs) {
      const std::string from = path_of(ref), to = from + ".deleting";
      std::error_code ec;
      fs::rename(from, to, ec);
      if (ec) {
        for (const auto& [f, t] : moved) fs::rename(t, f, ec);
        throw IoError("cannot delete artifact " + ref + ": " + ec.message());
      }
      moved.emplace_back(from, to);
    }
    for (const auto& [f, t] : moved) fs::remove(t);
    for (const auto& ref : refs) cache_.erase(ref);
  }

 private:
  static bool valid_ref(const std::string& ref) {
    if (ref.empty() || ref.size() > 64) return false;
    return std::all_of(ref.begin(), ref.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-'; });
  }
  static void dedupe(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::string path_of(const std::string& ref) const { return (std::filesystem::path(dir_) / (ref + ".json")).string(); }

  std::string mint_ref(const TrainedModel& m) {
    std::lock_guard g(train_locks_mutex_);
    std::string seed = m.method_name + "\x1f" + m.dataset_digest + "\x1f" + m.task.dump() + "\x1f" + m.created_at +
                       "\x1f" + std::to_string(++minted_) + "\x1f" + std::to_string(std::random_device{}());
    for (;;) {
      std::string ref = "m" + util::sha256_hex(seed).substr(0, 20);
      if (!std::filesystem::exists(path_of(ref))) return ref;
      seed += "+";
    }
  }

  std::shared_ptr<const TrainedModel> load(const std::string& ref) const {
    if (!valid_ref(ref)) throw NotFoundError("unknown model artifact '" + ref + "'");
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(ref); it != cache_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = cache_.find(ref); it != cache_.end()) return it->second;
    const std::string path = path_of(ref);
    if (!std::filesystem::exists(path)) throw NotFoundError("unknown model artifact '" + ref + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("artifact " + ref + " is corrupt: " + e.what());
    }
    auto m = std::make_shared<const TrainedModel>(model_from_json(j));
    cache_[ref] = m;
    return m;
  }

  std::string dir_;
  std::vector<MethodProfile> profiles_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const TrainedModel>> cache_;
  std::mutex train_locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> train_locks_;
  std::uint64_t minted_ = 0;
};

}  // namespace kgnet::gml
