#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gga/evolution.hpp"
#include "gga/genetic.hpp"
#include "gga/model.hpp"
#include "gga/tau.hpp"

namespace gga {

struct EquivalenceReport {
  std::size_t samples = 0;
  std::size_t coefficients = 0;
  double max_diff = 0.0;
  bool offspring_match = true;

  bool equal(double tol = 1e-12) const { return offspring_match && max_diff <= tol; }
};

// Same lattice, spins and clusters; compares c and c' pair by pair.
inline EquivalenceReport check_potential_equivalence(const Model& a, const Model& b,
                                                     const std::vector<ConfigPair>& samples) {
  if (!(a.lattice == b.lattice) || !(a.spins == b.spins))
    throw ValidationError("check_potential_equivalence: models differ in lattice or spins");
  EquivalenceReport r;
  for (const auto& [zeta, eta] : samples) {
    ++r.samples;
    const auto ca = coefficient_vector(a, zeta, eta);
    const auto cb = coefficient_vector(b, zeta, eta);
    if (ca.entries.size() != cb.entries.size()) {
      r.offspring_match = false;
      continue;
    }
    for (std::size_t i = 0; i < ca.entries.size(); ++i) {
      if (!(ca.entries[i].first == cb.entries[i].first)) r.offspring_match = false;
      r.max_diff = std::max(r.max_diff, std::fabs(ca.entries[i].second - cb.entries[i].second));
      ++r.coefficients;
    }
  }
  return r;
}

struct TauIsoReport {
  std::size_t samples = 0;
  double max_genetic_diff = 0.0;
  double max_evolution_diff = 0.0;
  bool offspring_match = true;
  bool discrepancy_covariant = true;
  bool clusters_consistent = true;

  bool passed(double tol = 1e-12) const {
    return offspring_match && discrepancy_covariant && clusters_consistent && max_genetic_diff <= tol &&
           max_evolution_diff <= tol;
  }
};

// c_{zeta eta, sigma} against c'_{tau zeta tau eta, tau sigma} in model b, and
// the same for the evolution coefficients.
inline TauIsoReport check_tau_isomorphism(const Model& a, const Model& b, const TauTransform& tau,
                                          const std::vector<ConfigPair>& samples) {
  tau.check_compatible(a.lattice, a.spins.q);
  TauIsoReport r;
  for (const auto& [zeta, eta] : samples) {
    ++r.samples;
    const auto tz = apply_tau(a.lattice, tau, zeta);
    const auto te = apply_tau(a.lattice, tau, eta);
    const auto d = discrepancy(zeta, eta);
    const auto td = discrepancy(tz, te);
    if (d.is_finite() != td.is_finite() || (d.is_finite() && push_region(tau, d.region()) != td.region()))
      r.discrepancy_covariant = false;
    if (d.is_finite()) {
      for (const auto& x : d.region())
        for (const auto& y : d.region())
          if (a.clusters.same_cluster(x, y) != b.clusters.same_cluster(tau.forward(x), tau.forward(y)))
            r.clusters_consistent = false;
    }
    const auto ca = coefficient_vector(a, zeta, eta);
    const auto cb = coefficient_vector(b, tz, te);
    if (ca.entries.size() != cb.entries.size()) r.offspring_match = false;
    std::map<Configuration, double> target;
    for (const auto& [s, c] : cb.entries) target.emplace(s, c);
    std::vector<Configuration> images;
    for (const auto& [s, c] : ca.entries) {
      images.push_back(apply_tau(a.lattice, tau, s));
      auto it = target.find(images.back());
      if (it == target.end()) {
        r.offspring_match = false;
        continue;
      }
      r.max_genetic_diff = std::max(r.max_genetic_diff, std::fabs(c - it->second));
    }
    const auto ma = evo_coefficient_matrix(a, zeta, eta);
    const auto mb = evo_coefficient_matrix(b, tz, te);
    std::map<ConfigPair, double> evo_target;
    for (const auto& [k, c] : mb.entries) evo_target.emplace(k, c);
    const std::size_t n = ca.entries.size();
    for (std::size_t i = 0; i < ma.entries.size() && n > 0; ++i) {
      const ConfigPair mapped{images[i / n], images[i % n]};
      auto it = evo_target.find(mapped);
      if (it == evo_target.end()) {
        r.offspring_match = false;
        continue;
      }
      r.max_evolution_diff = std::max(r.max_evolution_diff, std::fabs(ma.entries[i].second - it->second));
    }
  }
  return r;
}

struct ProbeWitness {
  Region window;
  Configuration base;
  Configuration first;
  Configuration second;
  double first_value;   // H^Phi - H^Psi at first
  double second_value;  // H^Phi - H^Psi at second
};

struct ProbeReport {
  std::size_t windows = 0;
  std::size_t evaluations = 0;
  bool consistent = true;  // k constant on every probed window; never a proof
  std::optional<ProbeWitness> witness;

  std::string verdict() const { return consistent ? "consistent with equivalence" : "not equivalent"; }
};

inline constexpr std::size_t kProbeWindowLimit = 4;
inline constexpr double kProbeTolerance = 1e-10;

// For each window L and base zeta, H_L^Phi - H_L^Psi over all of S^L must be
// constant (log k_L^zeta); a non-constant window is a certificate that Phi and
// Psi are not equivalent.
inline ProbeReport probe_equivalence(const Potential& phi, const Potential& psi, const std::vector<Region>& windows,
                                     const std::vector<Configuration>& bases) {
  ProbeReport r;
  const int q = phi.spins().q;
  for (const auto& w : windows) {
    if (w.size() > kProbeWindowLimit) throw TooLarge("probe window larger than 4 sites");
    ++r.windows;
    const std::vector<Site> sites(w.begin(), w.end());
    std::size_t combos = 1;
    for (std::size_t i = 0; i < sites.size(); ++i) combos *= static_cast<std::size_t>(q);
    for (const auto& base : bases) {
      std::optional<std::pair<Configuration, double>> ref;
      for (std::size_t c = 0; c < combos; ++c) {
        std::map<Site, int> labels;
        std::size_t rest = c;
        for (const auto& s : sites) {
          labels[s] = static_cast<int>(rest % static_cast<std::size_t>(q));
          rest /= static_cast<std::size_t>(q);
        }
        const auto cfg = base.with(labels);
        const double k = phi.hamiltonian(w, cfg) - psi.hamiltonian(w, cfg);
        ++r.evaluations;
        if (!ref) {
          ref.emplace(cfg, k);
        } else if (std::fabs(k - ref->second) > kProbeTolerance) {
          r.consistent = false;
          if (!r.witness) r.witness = ProbeWitness{w, base, ref->first, cfg, ref->second, k};
        }
      }
    }
  }
  return r;
}

// Disjoint-union lattice, direct-sum potential, disjoint-union clusters; tails
// are all combinations of factor tails, named "a|b|...".
inline Model build_product_model(const std::vector<Model>& factors) {
  if (factors.empty()) throw ValidationError("build_product_model: no factors");
  for (const auto& f : factors)
    if (!(f.spins == factors.front().spins)) throw SpinMismatch("build_product_model: factors use different spin sets");
  std::vector<PotentialPtr> phis;
  std::vector<ClusterPartition> parts;
  std::vector<int> counts;
  for (const auto& f : factors) {
    phis.push_back(f.potential);
    parts.push_back(f.clusters);
    counts.push_back(f.lattice.part_count());
  }
  std::vector<TailPtr> tails;
  std::vector<std::size_t> idx(factors.size(), 0);
  while (true) {
    std::string id;
    std::vector<PeriodicTable> tparts;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& t = factors[i].tails[idx[i]];
      id += (i ? "|" : "") + t->id();
      tparts.insert(tparts.end(), t->parts().begin(), t->parts().end());
    }
    tails.push_back(std::make_shared<const TailPattern>(id, std::move(tparts)));
    std::size_t i = factors.size();
    while (i-- > 0) {
      if (++idx[i] < factors[i].tails.size()) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return Model(direct_sum_potentials(std::move(phis)), ClusterPartition::disjoint_union(std::move(parts), counts),
               std::move(tails));
}

struct TensorReport {
  std::size_t samples = 0;
  double max_genetic_diff = 0.0;
  double max_evolution_diff = 0.0;
  bool offspring_factorize = true;

  bool passed(double tol = 1e-12) const {
    return offspring_factorize && max_genetic_diff <= tol && max_evolution_diff <= tol;
  }
};

inline TensorReport check_tensor_factorization(const Model& product_model, const std::vector<Model>& factors,
                                               const std::vector<ConfigPair>& samples) {
  TensorReport r;
  std::vector<int> offsets;
  int off = 0;
  for (const auto& f : factors) {
    offsets.push_back(off);
    off += f.lattice.part_count();
  }
  auto project = [&](const Configuration& c, std::size_t i) {
    return project_parts(c, offsets[i], factors[i].lattice.part_count());
  };
  for (const auto& [sigma, eta] : samples) {
    ++r.samples;
    const auto cv = coefficient_vector(product_model, sigma, eta);
    const auto mv = evo_coefficient_matrix(product_model, sigma, eta);
    std::vector<std::map<Configuration, double>> fc(factors.size());
    std::vector<std::map<ConfigPair, double>> fm(factors.size());
    std::size_t expected = 1;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto s = project(sigma, i), e = project(eta, i);
      const auto ci = coefficient_vector(factors[i], s, e);
      for (const auto& [z, c] : ci.entries) fc[i].emplace(z, c);
      for (const auto& [k, c] : evo_coefficient_matrix(factors[i], s, e).entries) fm[i].emplace(k, c);
      expected *= ci.entries.size();
    }
    if (cv.entries.size() != expected) r.offspring_factorize = false;
    for (const auto& [zeta, c] : cv.entries) {
      double prod = 1.0;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        auto it = fc[i].find(project(zeta, i));
        if (it == fc[i].end()) {
          r.offspring_factorize = false;
          prod = 0.0;
          break;
        }
        prod *= it->second;
      }
      r.max_genetic_diff = std::max(r.max_genetic_diff, std::fabs(c - prod));
    }
    for (const auto& [k, c] : mv.entries) {
      double prod = 1.0;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        auto it = fm[i].find({project(k.first, i), project(k.second, i)});
        if (it == fm[i].end()) {
          r.offspring_factorize = false;
          prod = 0.0;
          break;
        }
        prod *= it->second;
      }
      r.max_evolution_diff = std::max(r.max_evolution_diff, std::fabs(c - prod));
    }
  }
  return r;
}

}  // namespace gga
