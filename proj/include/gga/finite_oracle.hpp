#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gga/evolution.hpp"
#include "gga/genetic.hpp"
#include "gga/model.hpp"
#include "gga/numeric.hpp"

namespace gga {

using Assignment = std::vector<int>;

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

inline std::uint64_t enumeration_cap() {
  if (const char* env = std::getenv("GGA_ENUM_CAP")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("GGA_ENUM_CAP is not a number: ") + env);
    }
  }
  return kDefaultEnumerationCap;
}

struct FiniteTerm {
  std::vector<std::size_t> sites;
  std::function<double(std::span<const int>)> energy;
};

// S^{sites} with an explicit term list and a per-site cluster index.
struct FiniteModel {
  std::vector<Site> sites;
  int q = 2;
  std::vector<FiniteTerm> terms;
  std::vector<std::size_t> cluster;  // dense cluster index per site

  std::uint64_t state_count() const {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (n > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(q))
        throw TooLarge("finite model: state count overflows");
      n *= static_cast<std::uint64_t>(q);
    }
    return n;
  }

  std::size_t index_of(const Site& s) const {
    auto it = std::lower_bound(sites.begin(), sites.end(), s);
    if (it == sites.end() || *it != s) throw ValidationError("site " + to_string(s) + " not in finite model");
    return static_cast<std::size_t>(it - sites.begin());
  }

  double energy(const Assignment& a) const {
    double h = 0.0;
    std::vector<int> labels;
    for (const auto& t : terms) {
      labels.clear();
      for (std::size_t i : t.sites) labels.push_back(a[i]);
      h += t.energy(labels);
    }
    return h;
  }

  // Mixed-radix code, first site least significant.
  std::uint64_t encode(const Assignment& a) const {
    std::uint64_t code = 0;
    for (std::size_t i = sites.size(); i-- > 0;) code = code * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(a[i]);
    return code;
  }
  Assignment decode(std::uint64_t code) const {
    Assignment a(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      a[i] = static_cast<int>(code % static_cast<std::uint64_t>(q));
      code /= static_cast<std::uint64_t>(q);
    }
    return a;
  }

  Assignment read(const Configuration& sigma) const {
    Assignment a;
    a.reserve(sites.size());
    for (const auto& s : sites) a.push_back(sigma.at(s));
    return a;
  }

  // The model's law on `window` with everything outside fixed to `boundary`:
  // terms touching the window, outside sites frozen to boundary labels.
  static FiniteModel window(const Model& model, const Region& window, const Configuration& boundary) {
    FiniteModel fm;
    fm.sites.assign(window.begin(), window.end());
    fm.q = model.spins.q;
    if (!window.empty()) {
      for (auto& t : model.potential->terms_touching(window)) {
        std::vector<int> fixed(t.support.size(), -1);
        std::vector<std::size_t> vars;
        std::vector<std::size_t> slot;
        for (std::size_t j = 0; j < t.support.size(); ++j) {
          if (window.count(t.support[j])) {
            vars.push_back(fm.index_of(t.support[j]));
            slot.push_back(j);
          } else {
            fixed[j] = boundary.at(t.support[j]);
          }
        }
        fm.terms.push_back({std::move(vars), [fixed, slot, fn = std::move(t.energy)](std::span<const int> l) {
                              std::vector<int> full = fixed;
                              for (std::size_t k = 0; k < slot.size(); ++k) full[slot[k]] = l[k];
                              return fn(full);
                            }});
      }
    }
    std::map<ClusterId, std::size_t> dense;
    for (const auto& s : fm.sites) {
      auto [it, inserted] = dense.try_emplace(model.clusters.cluster_of(s), dense.size());
      fm.cluster.push_back(it->second);
    }
    return fm;
  }

  static FiniteModel from_model(const Model& model) {
    if (!model.lattice.is_finite()) throw ValidationError("finite oracle needs a finite lattice");
    const auto sites = model.lattice.finite_sites();
    return window(model, Region(sites.begin(), sites.end()), model.config(model.tails.front()->id()));
  }
};

struct MeasureTable {
  std::vector<double> log_weights;    // -H per code
  std::vector<double> probabilities;  // per code
  double log_partition = 0.0;

  double probability(const FiniteModel& fm, const Assignment& a) const {
    return probabilities[static_cast<std::size_t>(fm.encode(a))];
  }
};

inline MeasureTable enumerate_measure(const FiniteModel& fm, std::uint64_t cap = enumeration_cap()) {
  const std::uint64_t n = fm.state_count();
  if (n > cap)
    throw TooLarge("enumeration of " + std::to_string(n) + " states exceeds the cap " + std::to_string(cap));
  MeasureTable t;
  t.log_weights.resize(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < n; ++code)
    t.log_weights[static_cast<std::size_t>(code)] = -fm.energy(fm.decode(code));
  // Own reduction, kept apart from the library log_sum_exp.
  double m = t.log_weights.front();
  for (double w : t.log_weights) m = std::max(m, w);
  long double acc = 0.0L;
  for (double w : t.log_weights) acc += std::exp(static_cast<long double>(w - m));
  t.log_partition = m + static_cast<double>(std::log(acc));
  t.probabilities.reserve(t.log_weights.size());
  for (double w : t.log_weights) t.probabilities.push_back(std::exp(w - t.log_partition));
  return t;
}

// Omega-bar_{zeta eta}: zeta with eta substituted on any subset of the clusters
// where they differ. Returns the member codes.
inline std::vector<std::uint64_t> finite_offspring(const FiniteModel& fm, const Assignment& zeta,
                                                   const Assignment& eta) {
  std::map<std::size_t, std::vector<std::size_t>> differing;
  for (std::size_t i = 0; i < fm.sites.size(); ++i)
    if (zeta[i] != eta[i]) differing[fm.cluster[i]];
  for (std::size_t i = 0; i < fm.sites.size(); ++i)
    if (differing.count(fm.cluster[i])) differing[fm.cluster[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [k, g] : differing) groups.push_back(&g);
  if (groups.size() > 30) throw TooLarge("finite offspring: too many differing clusters");
  std::vector<std::uint64_t> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << groups.size()); ++mask) {
    Assignment a = zeta;
    for (std::size_t j = 0; j < groups.size(); ++j)
      if (mask >> j & 1U)
        for (std::size_t i : *groups[j]) a[i] = eta[i];
    out.push_back(fm.encode(a));
  }
  return out;
}

inline double finite_mass(const MeasureTable& t, const std::vector<std::uint64_t>& codes) {
  double s = 0.0;
  for (auto c : codes) s += t.probabilities[static_cast<std::size_t>(c)];
  return s;
}

// a_{zeta eta, sigma} = mu(sigma) / mu(Omega-bar_{zeta eta}).
inline double finite_genetic_coefficient(const FiniteModel& fm, const MeasureTable& t, const Assignment& zeta,
                                         const Assignment& eta, const Assignment& sigma) {
  const auto codes = finite_offspring(fm, zeta, eta);
  const auto target = fm.encode(sigma);
  if (std::find(codes.begin(), codes.end(), target) == codes.end())
    throw NotOffspring("sigma is not an offspring of (zeta, eta)");
  return t.probabilities[static_cast<std::size_t>(target)] / finite_mass(t, codes);
}

// b_{zeta xi, eta sigma} = mu(eta) mu(sigma) / mu(Omega-bar_{zeta xi})^2.
inline double finite_evolution_coefficient(const FiniteModel& fm, const MeasureTable& t, const Assignment& zeta,
                                           const Assignment& xi, const Assignment& eta, const Assignment& sigma) {
  const auto codes = finite_offspring(fm, zeta, xi);
  const auto e = fm.encode(eta), s = fm.encode(sigma);
  if (std::find(codes.begin(), codes.end(), e) == codes.end() ||
      std::find(codes.begin(), codes.end(), s) == codes.end())
    throw NotOffspring("(eta, sigma) is not an offspring pair of (zeta, xi)");
  const double mass = finite_mass(t, codes);
  return t.probabilities[static_cast<std::size_t>(e)] * t.probabilities[static_cast<std::size_t>(s)] / (mass * mass);
}

// mu(a restricted to `region` | a elsewhere): the finite-volume DLR conditional.
inline double conditional_probability(const FiniteModel& fm, const MeasureTable& t, const Assignment& a,
                                      const std::vector<std::size_t>& region) {
  double total = 0.0;
  std::uint64_t combos = 1;
  for (std::size_t i = 0; i < region.size(); ++i) combos *= static_cast<std::uint64_t>(fm.q);
  Assignment b = a;
  for (std::uint64_t c = 0; c < combos; ++c) {
    std::uint64_t r = c;
    for (std::size_t i : region) {
      b[i] = static_cast<int>(r % static_cast<std::uint64_t>(fm.q));
      r /= static_cast<std::uint64_t>(fm.q);
    }
    total += t.probability(fm, b);
  }
  return t.probability(fm, a) / total;
}

struct FiniteComparison {
  std::size_t samples = 0;
  std::size_t coefficients = 0;
  double max_genetic_diff = 0.0;
  double max_evolution_diff = 0.0;
  bool offspring_match = true;
};

// Samples uniform pairs of full assignments and compares the infinite-volume
// coefficient pipeline (c, evo c) against the measure ratios (a, b).
inline FiniteComparison compare_finite_equivalence(const Model& model, std::size_t n_samples, std::uint64_t seed) {
  const auto fm = FiniteModel::from_model(model);
  const auto table = enumerate_measure(fm);
  Rng rng(seed);
  const std::string tail = model.tails.front()->id();
  auto to_config = [&](const Assignment& a) {
    std::map<Site, int> ov;
    for (std::size_t i = 0; i < fm.sites.size(); ++i) ov.emplace(fm.sites[i], a[i]);
    return model.config(tail, ov);
  };
  FiniteComparison r;
  for (std::size_t n = 0; n < n_samples; ++n) {
    Assignment za(fm.sites.size()), ea(fm.sites.size());
    for (auto& v : za) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(fm.q)));
    for (auto& v : ea) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(fm.q)));
    ++r.samples;
    const auto codes = finite_offspring(fm, za, ea);
    const double mass = finite_mass(table, codes);
    const auto cv = coefficient_vector(model, to_config(za), to_config(ea));
    if (cv.entries.size() != codes.size()) r.offspring_match = false;
    for (const auto& [sigma, c] : cv.entries) {
      const auto code = fm.encode(fm.read(sigma));
      if (std::find(codes.begin(), codes.end(), code) == codes.end()) {
        r.offspring_match = false;
        continue;
      }
      const double a = table.probabilities[static_cast<std::size_t>(code)] / mass;
      r.max_genetic_diff = std::max(r.max_genetic_diff, std::fabs(a - c));
      ++r.coefficients;
    }
    for (const auto& [pair, cc] : evo_coefficient_matrix(model, cv.left, cv.right).entries) {
      const double p1 = table.probabilities[static_cast<std::size_t>(fm.encode(fm.read(pair.first)))];
      const double p2 = table.probabilities[static_cast<std::size_t>(fm.encode(fm.read(pair.second)))];
      r.max_evolution_diff = std::max(r.max_evolution_diff, std::fabs(p1 * p2 / (mass * mass) - cc));
    }
  }
  return r;
}

}  // namespace gga
