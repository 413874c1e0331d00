#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kgnet/error.hpp"

namespace kgnet::gml {

struct KnnHit {
  std::string iri;
  double score = 0;
  bool operator==(const KnnHit&) const = default;
};

/// Exact cosine-similarity search by full scan. All vectors share one
/// dimension and have finite components.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension = 0) : dim_(dimension) {}

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  bool contains(const std::string& iri) const { return index_.contains(iri); }

  void put(const std::string& iri, std::vector<double> v) {
    if (dim_ == 0 && index_.empty()) dim_ = v.size();
    if (v.size() != dim_ || dim_ == 0) {
      throw UserError("embedding for <" + iri + "> has dimension " + std::to_string(v.size()) + ", store has " +
                      std::to_string(dim_));
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw UserError("embedding for <" + iri + "> has a non-finite component");
    }
    if (auto it = index_.find(iri); it != index_.end()) {
      vectors_[it->second] = std::move(v);
      return;
    }
    index_.emplace(iri, iris_.size());
    iris_.push_back(iri);
    vectors_.push_back(std::move(v));
  }

  const std::vector<double>& get(const std::string& iri) const {
    auto it = index_.find(iri);
    if (it == index_.end()) throw NotFoundError("no embedding for <" + iri + ">");
    return vectors_[it->second];
  }

  const std::vector<std::string>& iris() const { return iris_; }

  /// Top-k by cosine, descending; ties by IRI. Stored zero vectors score 0.
  std::vector<KnnHit> knn(const std::vector<double>& query, std::size_t k, const std::string* exclude = nullptr) const {
    if (query.size() != dim_) {
      throw UserError("query vector has dimension " + std::to_string(query.size()) + ", store has " +
                      std::to_string(dim_));
    }
    const double qn = norm(query);
    if (qn == 0 || !std::isfinite(qn)) throw UserError("knn query vector is zero or non-finite");
    if (k == 0) return {};
    std::vector<KnnHit> all;
    all.reserve(iris_.size());
    for (std::size_t i = 0; i < iris_.size(); ++i) {
      if (exclude != nullptr && iris_[i] == *exclude) continue;
      const double vn = norm(vectors_[i]);
      double dot = 0;
      for (std::size_t d = 0; d < dim_; ++d) dot += query[d] * vectors_[i][d];
      all.push_back({iris_[i], vn == 0 ? 0.0 : dot / (qn * vn)});
    }
    auto order = [](const KnnHit& a, const KnnHit& b) {
      return a.score != b.score ? a.score > b.score : a.iri < b.iri;
    };
    if (k < all.size()) {
      std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), order);
      all.resize(k);
    } else {
      std::sort(all.begin(), all.end(), order);
    }
    return all;
  }

  /// Neighbours of a stored node, excluding the node itself.
  std::vector<KnnHit> knn(const std::string& iri, std::size_t k) const { return knn(get(iri), k, &iri); }

 private:
  static double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }

  std::size_t dim_;
  std::vector<std::string> iris_;
  std::vector<std::vector<double>> vectors_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace kgnet::gml
