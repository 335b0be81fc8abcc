#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gga/lattice.hpp"

namespace gga {

using ClusterId = std::vector<std::int64_t>;

class ClusterPartition {
 public:
  enum class Kind { Atomic, Unique, Blocks, FiniteList, DisjointUnion };

  static ClusterPartition atomic() { return ClusterPartition(Kind::Atomic); }
  static ClusterPartition unique() { return ClusterPartition(Kind::Unique); }

  // Clusters floor(x/k) per part; on Z^2 these are vertical bands.
  static ClusterPartition blocks(std::int64_t k) {
    if (k < 1) throw ValidationError("clusters.k: block size must be positive");
    ClusterPartition p(Kind::Blocks);
    p.k_ = k;
    return p;
  }

  static ClusterPartition finite_list(const std::vector<std::vector<Site>>& clusters) {
    ClusterPartition p(Kind::FiniteList);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (clusters[i].empty()) throw ValidationError("clusters.list: empty cluster");
      for (const auto& s : clusters[i])
        if (!p.index_.emplace(s, static_cast<std::int64_t>(i)).second)
          throw ValidationError("clusters.list: site " + to_string(s) + " in two clusters");
    }
    p.list_ = clusters;
    return p;
  }

  // One partition per factor lattice; part_counts[i] parts belong to factor i.
  static ClusterPartition disjoint_union(std::vector<ClusterPartition> factors,
                                         const std::vector<int>& part_counts) {
    if (factors.size() != part_counts.size())
      throw ValidationError("disjoint union: factor/part count mismatch");
    ClusterPartition p(Kind::DisjointUnion);
    int off = 0;
    for (int c : part_counts) {
      p.offsets_.push_back(off);
      off += c;
    }
    p.factors_ = std::move(factors);
    return p;
  }

  Kind kind() const { return kind_; }
  std::int64_t block_size() const { return k_; }
  const std::vector<std::vector<Site>>& list() const { return list_; }
  const std::vector<ClusterPartition>& factors() const { return factors_; }

  ClusterId cluster_of(const Site& s) const {
    switch (kind_) {
      case Kind::Atomic: return {0, s.part, s.x, s.y};
      case Kind::Unique: return {0};
      case Kind::Blocks: return {0, s.part, floor_div(s.x, k_)};
      case Kind::FiniteList: {
        auto it = index_.find(s);
        if (it == index_.end()) return {1, s.part, s.x, s.y};
        return {0, it->second};
      }
      case Kind::DisjointUnion: {
        std::size_t i = 0;
        while (i + 1 < offsets_.size() && s.part >= offsets_[i + 1]) ++i;
        ClusterId id{static_cast<std::int64_t>(i)};
        auto inner = factors_[i].cluster_of(Site{s.part - offsets_[i], s.x, s.y});
        id.insert(id.end(), inner.begin(), inner.end());
        return id;
      }
    }
    return {};
  }

  bool same_cluster(const Site& a, const Site& b) const { return cluster_of(a) == cluster_of(b); }

  // A finite list must cover every site of a finite lattice exactly once.
  void validate(const Lattice& lattice) const {
    if (kind_ == Kind::FiniteList) {
      if (!lattice.is_finite()) throw ValidationError("clusters.list requires a finite lattice");
      const auto sites = lattice.finite_sites();
      if (sites.size() != index_.size()) throw ValidationError("clusters.list does not cover the lattice");
      for (const auto& s : sites)
        if (!index_.count(s)) throw ValidationError("clusters.list misses site " + to_string(s));
    }
  }

 private:
  explicit ClusterPartition(Kind k) : kind_(k) {}

  Kind kind_;
  std::int64_t k_ = 1;
  std::vector<std::vector<Site>> list_;
  std::map<Site, std::int64_t> index_;
  std::vector<ClusterPartition> factors_;
  std::vector<int> offsets_;
};

inline std::vector<ClusterId> clusters_meeting(const ClusterPartition& part, const Region& region) {
  std::vector<ClusterId> ids;
  for (const auto& s : region) ids.push_back(part.cluster_of(s));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline constexpr std::size_t kMaxOffspringClusters = 20;

// Omega_{sigma eta}: sigma with eta's values on a subset of the clusters meeting
// the discrepancy set, ordered lexicographically by the chosen cluster ids.
inline std::vector<Configuration> offspring(const ClusterPartition& part, const Configuration& sigma,
                                            const Configuration& eta) {
  const auto d = discrepancy(sigma, eta);
  if (d.is_macroscopic()) return {};
  std::map<ClusterId, std::map<Site, int>> by_cluster;
  for (const auto& s : d.region()) by_cluster[part.cluster_of(s)].emplace(s, eta.at(s));
  std::vector<const std::map<Site, int>*> groups;
  for (const auto& [id, g] : by_cluster) groups.push_back(&g);
  if (groups.size() > kMaxOffspringClusters)
    throw TooLarge("offspring: " + std::to_string(groups.size()) + " clusters meet the discrepancy");

  std::vector<Configuration> out;
  out.reserve(std::size_t{1} << groups.size());
  out.push_back(sigma);
  std::map<Site, int> chosen;
  auto extend = [&](auto&& self, std::size_t from) -> void {
    for (std::size_t j = from; j < groups.size(); ++j) {
      for (const auto& kv : *groups[j]) chosen.insert(kv);
      out.push_back(sigma.with(chosen));
      self(self, j + 1);
      for (const auto& kv : *groups[j]) chosen.erase(kv.first);
    }
  };
  extend(extend, 0);
  return out;
}

}  // namespace gga
