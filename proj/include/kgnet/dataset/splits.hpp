#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kgnet/dataset/package.hpp"
#include "kgnet/error.hpp"

namespace kgnet::dataset {

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  void validate() const {
    if (train < 0 || valid < 0 || test < 0) throw UserError("split ratios must be non-negative");
    if (std::abs(train + valid + test - 1.0) > 1e-9) {
      throw UserError("split ratios must sum to 1, got " + std::to_string(train + valid + test));
    }
  }
};

struct SplitResult {
  Splits splits;
  std::vector<std::string> warnings;
};

/// Target sizes: floor(n*valid) and floor(n*test); train takes the rest.
struct SplitQuota {
  std::size_t train = 0, valid = 0, test = 0;
};

inline SplitQuota floor_allocation(std::size_t n, const SplitRatios& r) {
  r.validate();
  SplitQuota q;
  // The epsilon keeps products such as 10*0.1 from flooring below an exact integer.
  q.valid = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r.valid + 1e-9));
  q.test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r.test + 1e-9));
  q.valid = std::min(q.valid, n);
  q.test = std::min(q.test, n - q.valid);
  q.train = n - q.valid - q.test;
  return q;
}

namespace detail {

inline void finish(SplitResult& r, std::size_t n) {
  std::sort(r.splits.train.begin(), r.splits.train.end());
  std::sort(r.splits.valid.begin(), r.splits.valid.end());
  std::sort(r.splits.test.begin(), r.splits.test.end());
  if (n > 0 && n < 3) {
    r.warnings.push_back("only " + std::to_string(n) + " ids to split; all assigned to train");
  } else if (n >= 3 && (r.splits.valid.empty() || r.splits.test.empty())) {
    r.warnings.push_back("split of " + std::to_string(n) + " ids leaves " +
                         (r.splits.valid.empty() && r.splits.test.empty() ? std::string("valid and test")
                          : r.splits.valid.empty()                        ? std::string("valid")
                                                                          : std::string("test")) +
                         " empty");
  }
}

}  // namespace detail

/// Seeded uniform shuffle (Fisher-Yates over mt19937_64, fixed across
/// platforms), then the floor allocation in train, valid, test order.
inline SplitResult split_random(std::vector<NodeId> ids, const SplitRatios& ratios, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  SplitResult r;
  const std::size_t n = ids.size();
  SplitQuota q = n < 3 ? SplitQuota{n, 0, 0} : floor_allocation(n, ratios);
  ratios.validate();
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(ids[i - 1], ids[j]);
  }
  r.splits.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(q.train));
  r.splits.valid.assign(ids.begin() + static_cast<std::ptrdiff_t>(q.train),
                        ids.begin() + static_cast<std::ptrdiff_t>(q.train + q.valid));
  r.splits.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(q.train + q.valid), ids.end());
  detail::finish(r, n);
  return r;
}

/// Whole groups go, largest first (ties by key), to the split with the
/// largest remaining quota (floor allocation); ties prefer train, valid, test.
/// `group_of[i]` is the community key of `ids[i]`.
inline SplitResult split_groups(const std::vector<NodeId>& ids, const std::vector<std::string>& group_of,
                                const SplitRatios& ratios) {
  if (ids.size() != group_of.size()) throw UserError("split_groups: ids and groups differ in length");
  std::map<std::string, std::vector<NodeId>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[group_of[i]].push_back(ids[i]);
  std::vector<std::pair<std::string, std::vector<NodeId>>> ordered(groups.begin(), groups.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.second.size() > b.second.size();
  });
  const std::size_t n = ids.size();
  const SplitQuota q = floor_allocation(n, ratios);
  SplitResult r;
  std::vector<NodeId>* dest[3] = {&r.splits.train, &r.splits.valid, &r.splits.test};
  const long long quota[3] = {static_cast<long long>(q.train), static_cast<long long>(q.valid),
                              static_cast<long long>(q.test)};
  for (auto& [key, members] : ordered) {
    int best = 0;
    long long best_deficit = quota[0] - static_cast<long long>(dest[0]->size());
    for (int s = 1; s < 3; ++s) {
      const long long deficit = quota[s] - static_cast<long long>(dest[s]->size());
      if (deficit > best_deficit) {
        best = s;
        best_deficit = deficit;
      }
    }
    dest[best]->insert(dest[best]->end(), members.begin(), members.end());
  }
  if (groups.size() == 1) r.warnings.push_back("a single community holds every id; all assigned to train");
  detail::finish(r, n);
  return r;
}

}  // namespace kgnet::dataset
