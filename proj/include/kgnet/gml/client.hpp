#pragma once

#include <string>
#include <vector>

#include "kgnet/dataset/package_io.hpp"
#include "kgnet/gml/service.hpp"
#include "kgnet/kgmeta/governor.hpp"
#include "kgnet/sparqlml/ast.hpp"

namespace kgnet::gml {

/// Model summary (state left empty) from `summary_json`.
inline TrainedModel summary_from_json(const nlohmann::json& j) {
  nlohmann::json full = j;
  full["state"] = {{"kind", "node_class"}, {"predictions", nlohmann::json::object()}};
  return model_from_json(full);
}

/// GMLaaS operations as seen by the platform, in-process or over HTTP. As an
/// ArtifactRemover it lets the KGMeta governor delete artifacts.
class GmlClient : public kgmeta::ArtifactRemover {
 public:
  /// Trains on the package stored at `package_path`; returns the summary.
  virtual TrainedModel train(const sparqlml::TrainGmlSpec& task, const std::string& package_path) = 0;
  /// With `all`, returns every prediction and ignores `targets`.
  virtual NodeClassResult infer_node_class(const std::string& ref, const std::vector<std::string>& targets,
                                           bool all = false) = 0;
  virtual LinkResult infer_links(const std::string& ref, const std::vector<std::string>& sources, std::size_t k) = 0;
  virtual std::vector<KnnHit> knn(const std::string& ref, const KnnQuery& query, std::size_t k) = 0;
  virtual TrainedModel info(const std::string& ref) = 0;
};

class LocalGmlClient : public GmlClient {
 public:
  explicit LocalGmlClient(GmlService& service) : service_(service) {}

  TrainedModel train(const sparqlml::TrainGmlSpec& task, const std::string& package_path) override {
    TrainedModel m = service_.train(task, dataset::read_package(package_path));
    m.state = NodeClassModel{};
    return m;
  }
  NodeClassResult infer_node_class(const std::string& ref, const std::vector<std::string>& targets,
                                   bool all = false) override {
    return all ? service_.infer_node_class_all(ref) : service_.infer_node_class(ref, targets);
  }
  LinkResult infer_links(const std::string& ref, const std::vector<std::string>& sources, std::size_t k) override {
    return service_.infer_links(ref, sources, k);
  }
  std::vector<KnnHit> knn(const std::string& ref, const KnnQuery& query, std::size_t k) override {
    return service_.knn(ref, query, k);
  }
  TrainedModel info(const std::string& ref) override { return summary_from_json(service_.info(ref)); }
  void delete_artifacts(const std::vector<std::string>& refs) override { service_.delete_artifacts(refs); }

  GmlService& service() { return service_; }

 private:
  GmlService& service_;
};

}  // namespace kgnet::gml
