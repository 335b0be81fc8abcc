#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gga/genetic.hpp"

namespace gga {

using ConfigPair = std::pair<Configuration, Configuration>;

// Finite formal sum of ordered-pair basis elements e_{sigma eta}.
class PairElement {
 public:
  PairElement() = default;

  static PairElement basis(const Configuration& a, const Configuration& b, double coeff = 1.0) {
    PairElement e;
    e.add({a, b}, coeff);
    return e;
  }

  void add(const ConfigPair& key, double coeff) {
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double coefficient(const ConfigPair& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? 0.0 : it->second;
  }

  const std::map<ConfigPair, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  PairElement& operator+=(const PairElement& o) {
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
  }
  PairElement& operator-=(const PairElement& o) {
    for (const auto& [k, v] : o.terms_) add(k, -v);
    return *this;
  }
  PairElement& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }
  friend PairElement operator+(PairElement a, const PairElement& b) { return a += b; }
  friend PairElement operator-(PairElement a, const PairElement& b) { return a -= b; }
  friend PairElement operator*(double s, PairElement a) { return a *= s; }
  friend bool operator==(const PairElement&, const PairElement&) = default;

 private:
  std::map<ConfigPair, double> terms_;
};

struct EvoCoefficientMatrix {
  Configuration left;
  Configuration right;
  std::vector<std::pair<ConfigPair, double>> entries;  // row-major over offspring order

  bool empty() const { return entries.empty(); }
  double at(const Configuration& a, const Configuration& b) const {
    for (const auto& [k, v] : entries)
      if (k.first == a && k.second == b) return v;
    return 0.0;
  }
  double sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.second;
    return s;
  }
};

// Outer product of the genetic coefficient vector with itself.
inline EvoCoefficientMatrix evo_coefficient_matrix(const Model& model, const Configuration& sigma,
                                                   const Configuration& eta) {
  const auto cv = coefficient_vector(model, sigma, eta);
  EvoCoefficientMatrix m{sigma, eta, {}};
  m.entries.reserve(cv.entries.size() * cv.entries.size());
  for (const auto& [a, ca] : cv.entries)
    for (const auto& [b, cb] : cv.entries) m.entries.push_back({{a, b}, ca * cb});
  return m;
}

// Only diagonal products survive: e_{ab} e_{ab} = sum c_{ab, zx} e_{zx}.
// Same matrix normalized over Omega x Omega directly: the pair weight is
// h(a) h(b) and the partition sum runs over all n^2 pairs. Used to check the
// factorization against the outer product above.
inline EvoCoefficientMatrix evo_coefficient_direct(const Model& model, const Configuration& sigma,
                                                   const Configuration& eta) {
  EvoCoefficientMatrix m{sigma, eta, {}};
  const bool swap = eta < sigma;
  const Configuration& a = swap ? eta : sigma;
  const Configuration& b = swap ? sigma : eta;
  const auto d = discrepancy(a, b);
  if (d.is_macroscopic()) return m;
  const auto offs = offspring(model.clusters, a, b);
  const auto logh = offspring_log_weights(model, d.region(), offs);
  std::vector<double> pair_logh;
  pair_logh.reserve(logh.size() * logh.size());
  for (double x : logh)
    for (double y : logh) pair_logh.push_back(x + y);
  const double lse = log_sum_exp(pair_logh);
  const std::size_t n = offs.size();
  m.entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.entries.push_back({{offs[i], offs[j]}, std::exp(pair_logh[i * n + j] - lse)});
  return m;
}

inline PairElement evo_product(const Model& model, const PairElement& u, const PairElement& v) {
  PairElement out;
  for (const auto& [k, x] : u.terms()) {
    const double y = v.coefficient(k);
    if (y == 0.0) continue;
    const double w = x * y;
    for (const auto& [kk, c] : evo_coefficient_matrix(model, k.first, k.second).entries) out.add(kk, w * c);
  }
  return out;
}

inline constexpr std::size_t kIdempotentSupportBound = 6;
inline constexpr double kIdempotentTolerance = 1e-12;

inline bool is_idempotent(const Model& model, const PairElement& u,
                          std::size_t max_support = kIdempotentSupportBound) {
  if (u.size() > max_support)
    throw SupportTooLarge("is_idempotent: support " + std::to_string(u.size()) + " exceeds " +
                          std::to_string(max_support));
  const auto sq = evo_product(model, u, u);
  std::set<ConfigPair> keys;
  for (const auto& [k, v] : u.terms()) keys.insert(k);
  for (const auto& [k, v] : sq.terms()) keys.insert(k);
  for (const auto& k : keys)
    if (std::fabs(sq.coefficient(k) - u.coefficient(k)) > kIdempotentTolerance) return false;
  return true;
}

// The map f_{sigma eta} on one pair (zeta, xi) of the sigma-class, with
//   C = cl(D_{zeta xi}), Lambda = D_{sigma zeta} \ C,
// carrying (zeta, xi) on C, g(zeta, xi) on Lambda and eta elsewhere, where
// g(w)(x) = w(x) if w(x) != eta(x) and sigma(x) otherwise.
struct FertileIdealIso {
  Region closure;
  Region lambda;
  Configuration zeta_image;
  Configuration xi_image;

  // Offspring of (zeta, xi) agree with zeta off C, so they map to omega on C
  // and zeta_image elsewhere.
  Configuration map_offspring(const Configuration& omega) const {
    std::map<Site, int> on_c;
    for (const auto& s : closure) on_c.emplace(s, omega.at(s));
    return zeta_image.with(on_c);
  }
};

inline FertileIdealIso fertile_ideal_iso(const Model& model, const Configuration& sigma_ref,
                                         const Configuration& eta_ref, const Configuration& zeta,
                                         const Configuration& xi) {
  if (!model.potential->finite_range())
    throw InfiniteRange("fertile_ideal_iso_map requires a finite-range potential");
  const auto d_sz = discrepancy(sigma_ref, zeta);
  const auto d_zx = discrepancy(zeta, xi);
  if (d_sz.is_macroscopic() || d_zx.is_macroscopic())
    throw NotFertile("fertile_ideal_iso_map: zeta and xi must lie in the class of sigma_ref");
  Region c = closure(*model.potential, d_zx.region());
  Region lam = region_difference(d_sz.region(), c);
  auto g = [&](const Configuration& w, const Site& x) {
    const int v = w.at(x);
    return v != eta_ref.at(x) ? v : sigma_ref.at(x);
  };
  std::map<Site, int> zc, xc;
  for (const auto& s : c) {
    zc.emplace(s, zeta.at(s));
    xc.emplace(s, xi.at(s));
  }
  for (const auto& s : lam) {
    zc.emplace(s, g(zeta, s));
    xc.emplace(s, g(xi, s));
  }
  return FertileIdealIso{std::move(c), std::move(lam), eta_ref.with(zc), eta_ref.with(xc)};
}

inline ConfigPair fertile_ideal_iso_map(const Model& model, const Configuration& sigma_ref,
                                        const Configuration& eta_ref, const Configuration& zeta,
                                        const Configuration& xi) {
  auto iso = fertile_ideal_iso(model, sigma_ref, eta_ref, zeta, xi);
  return {std::move(iso.zeta_image), std::move(iso.xi_image)};
}

struct IsoReport {
  std::size_t samples = 0;
  double max_coefficient_diff = 0.0;
  bool discrepancy_preserved = true;
  bool offspring_mapped_onto = true;
  bool round_trip_exact = true;
  bool injective = true;
  // Offspring pairs (omega, varpi) whose pairwise image f(omega, varpi) falls
  // outside Omega'^2; reported, not part of the verdict.
  std::size_t pairwise_image_outside = 0;
  std::optional<std::string> pairwise_witness;

  bool passed(double tol = 1e-12) const {
    return max_coefficient_diff <= tol && discrepancy_preserved && offspring_mapped_onto &&
           round_trip_exact && injective;
  }
};

inline IsoReport check_iso_coefficients(const Model& model, const Configuration& sigma_ref,
                                        const Configuration& eta_ref, const std::vector<ConfigPair>& samples) {
  IsoReport r;
  std::map<ConfigPair, ConfigPair> images;
  for (const auto& [zeta, xi] : samples) {
    ++r.samples;
    const auto iso = fertile_ideal_iso(model, sigma_ref, eta_ref, zeta, xi);
    const ConfigPair image{iso.zeta_image, iso.xi_image};
    if (discrepancy(zeta, xi) != discrepancy(image.first, image.second)) r.discrepancy_preserved = false;
    if (fertile_ideal_iso_map(model, eta_ref, sigma_ref, image.first, image.second) != ConfigPair{zeta, xi})
      r.round_trip_exact = false;
    images.emplace(ConfigPair{zeta, xi}, image);

    const auto m = evo_coefficient_matrix(model, zeta, xi);
    const auto mp = evo_coefficient_matrix(model, image.first, image.second);
    std::map<ConfigPair, double> target;
    for (const auto& [k, v] : mp.entries) target.emplace(k, v);
    std::set<ConfigPair> hit;
    for (const auto& [k, c] : m.entries) {
      const ConfigPair mapped{iso.map_offspring(k.first), iso.map_offspring(k.second)};
      auto it = target.find(mapped);
      if (it == target.end()) {
        r.offspring_mapped_onto = false;
        continue;
      }
      hit.insert(mapped);
      r.max_coefficient_diff = std::max(r.max_coefficient_diff, std::fabs(c - it->second));
      const auto pairwise = fertile_ideal_iso_map(model, sigma_ref, eta_ref, k.first, k.second);
      if (!target.count(pairwise)) {
        ++r.pairwise_image_outside;
        if (!r.pairwise_witness)
          r.pairwise_witness = "f(" + to_string(k.first) + ", " + to_string(k.second) + ") = (" +
                               to_string(pairwise.first) + ", " + to_string(pairwise.second) +
                               ") is not an offspring pair of (" + to_string(image.first) + ", " +
                               to_string(image.second) + ")";
      }
    }
    if (hit.size() != target.size()) r.offspring_mapped_onto = false;
  }
  std::set<ConfigPair> distinct;
  for (const auto& [k, v] : images) distinct.insert(v);
  r.injective = distinct.size() == images.size();
  return r;
}

}  // namespace gga
