#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gga/evolution.hpp"
#include "gga/model.hpp"
#include "gga/numeric.hpp"

namespace gga {

struct SampleSpec {
  std::int64_t window = 4;            // override supports drawn from [-W, W] (or [0, 2W] on N0)
  std::size_t max_overrides = 3;      // extra overrides on the first configuration
  std::size_t min_discrepancy = 1;
  std::size_t max_discrepancy = 3;
};

inline std::vector<Site> window_sites(const Lattice& lattice, std::int64_t w) {
  std::vector<Site> out;
  for (int i = 0; i < lattice.part_count(); ++i) {
    const auto& p = lattice.part(i);
    switch (p.kind) {
      case PartKind::Integers:
        for (std::int64_t x = -w; x <= w; ++x) out.push_back({i, x, 0});
        break;
      case PartKind::Naturals:
        for (std::int64_t x = 0; x <= 2 * w; ++x) out.push_back({i, x, 0});
        break;
      case PartKind::Square:
        for (std::int64_t x = -w; x <= w; ++x)
          for (std::int64_t y = -w; y <= w; ++y) out.push_back({i, x, y});
        break;
      case PartKind::Box:
        for (std::int64_t x = 0; x < p.width; ++x)
          for (std::int64_t y = 0; y < p.height; ++y) out.push_back({i, x, y});
        break;
    }
  }
  return out;
}

inline std::vector<Site> choose_sites(const std::vector<Site>& pool, std::size_t k, Rng& rng) {
  std::vector<Site> v = pool;
  k = std::min(k, v.size());
  for (std::size_t i = 0; i < k; ++i) std::swap(v[i], v[i + rng.below(v.size() - i)]);
  v.resize(k);
  return v;
}

inline Configuration random_configuration(const Model& model, const std::string& tail_id, Rng& rng,
                                          const SampleSpec& spec = {}) {
  const auto pool = window_sites(model.lattice, spec.window);
  const auto k = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(spec.max_overrides)));
  std::map<Site, int> ov;
  for (const auto& s : choose_sites(pool, k, rng))
    ov[s] = static_cast<int>(rng.below(static_cast<std::uint64_t>(model.spins.q)));
  return model.config(tail_id, ov);
}

// zeta from the given tail; eta differs from it on exactly m window sites,
// m uniform in [min_discrepancy, max_discrepancy].
inline ConfigPair random_fertile_pair_in(const Model& model, const std::string& tail, Rng& rng,
                                         const SampleSpec& spec = {}) {
  auto zeta = random_configuration(model, tail, rng, spec);
  const auto pool = window_sites(model.lattice, spec.window);
  const auto m = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.min_discrepancy),
                                                      static_cast<std::int64_t>(spec.max_discrepancy)));
  const auto q = static_cast<std::uint64_t>(model.spins.q);
  std::map<Site, int> changes;
  for (const auto& s : choose_sites(pool, m, rng)) {
    const auto shift = 1 + rng.below(q - 1);
    changes[s] = static_cast<int>((static_cast<std::uint64_t>(zeta.at(s)) + shift) % q);
  }
  auto eta = zeta.with(changes);
  return {std::move(zeta), std::move(eta)};
}

// As above with the tail drawn uniformly from the declared tails.
inline ConfigPair random_fertile_pair(const Model& model, Rng& rng, const SampleSpec& spec = {}) {
  const auto& tail = model.tails[rng.below(model.tails.size())]->id();
  return random_fertile_pair_in(model, tail, rng, spec);
}

inline std::vector<ConfigPair> sample_fertile_pairs(const Model& model, std::size_t n, std::uint64_t seed,
                                                    const SampleSpec& spec = {}) {
  Rng rng(seed);
  std::vector<ConfigPair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_fertile_pair(model, rng, spec));
  return out;
}

}  // namespace gga
