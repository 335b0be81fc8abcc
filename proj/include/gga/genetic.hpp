#pragma once

#include <cmath>
#include <compare>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gga/clusters.hpp"
#include "gga/model.hpp"
#include "gga/numeric.hpp"
#include "gga/potential.hpp"

namespace gga {

struct FertileClassId {
  std::string tail_id;
  friend auto operator<=>(const FertileClassId&, const FertileClassId&) = default;
};

inline std::string describe_tail(const TailPattern& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.parts().size(); ++i) {
    const auto& p = t.parts()[i];
    if (i) os << '|';
    os << p.px << 'x' << p.py << ':';
    for (std::size_t j = 0; j < p.table.size(); ++j) os << (j ? "," : "") << p.table[j];
  }
  return os.str();
}

// Id of the first declared tail agreeing cofinitely with sigma's tail.
inline FertileClassId fertile_class_id(const Model& model, const Configuration& sigma) {
  for (const auto& t : model.tails) {
    if (tails_agree_cofinitely(*t->adapted(model.lattice), sigma.tail()).is_finite()) return {t->id()};
  }
  return {"anon:" + describe_tail(sigma.tail())};
}

struct CoefficientVector {
  Configuration left;
  Configuration right;
  std::vector<std::pair<Configuration, double>> entries;

  bool empty() const { return entries.empty(); }
  double at(const Configuration& sigma) const {
    for (const auto& [c, v] : entries)
      if (c == sigma) return v;
    return 0.0;
  }
  double sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.second;
    return s;
  }
};

// log h over the offspring of (a, b), in offspring order.
inline std::vector<double> offspring_log_weights(const Model& model, const Region& d,
                                                 const std::vector<Configuration>& offs) {
  std::vector<double> logh;
  logh.reserve(offs.size());
  for (const auto& o : offs) logh.push_back(log_boltzmann(*model.potential, d, o));
  return logh;
}

// c_{zeta eta, sigma} = h_D(sigma) / sum_{xi in Omega} h_D(xi), D the discrepancy set.
// Computed on the ordered pair (min, max) so that both argument orders agree bitwise.
inline CoefficientVector coefficient_vector(const Model& model, const Configuration& zeta,
                                            const Configuration& eta) {
  CoefficientVector cv{zeta, eta, {}};
  const bool swap = eta < zeta;
  const Configuration& a = swap ? eta : zeta;
  const Configuration& b = swap ? zeta : eta;
  const auto d = discrepancy(a, b);
  if (d.is_macroscopic()) return cv;
  auto offs = offspring(model.clusters, a, b);
  const auto logh = offspring_log_weights(model, d.region(), offs);
  const double lse = log_sum_exp(logh);
  cv.entries.reserve(offs.size());
  for (std::size_t i = 0; i < offs.size(); ++i) cv.entries.emplace_back(std::move(offs[i]), std::exp(logh[i] - lse));
  return cv;
}

// Finite formal sum of basis elements e_sigma. Exact zeros are never stored.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  static AlgebraElement basis(const Configuration& sigma, double coeff = 1.0) {
    AlgebraElement e;
    e.add(sigma, coeff);
    return e;
  }

  void add(const Configuration& sigma, double coeff) {
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(sigma, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double coefficient(const Configuration& sigma) const {
    auto it = terms_.find(sigma);
    return it == terms_.end() ? 0.0 : it->second;
  }

  const std::map<Configuration, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  double l1_norm() const {
    double s = 0.0;
    for (const auto& [c, v] : terms_) s += std::fabs(v);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [c, v] : terms_) m = std::max(m, std::fabs(v));
    return m;
  }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    for (const auto& [c, v] : o.terms_) add(c, v);
    return *this;
  }
  AlgebraElement& operator-=(const AlgebraElement& o) {
    for (const auto& [c, v] : o.terms_) add(c, -v);
    return *this;
  }
  AlgebraElement& operator*=(double s) {
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

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(AlgebraElement a, double s) { return a *= s; }
  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;

 private:
  std::map<Configuration, double> terms_;
};

// Bilinear extension of e_zeta * e_eta = sum_sigma c_{zeta eta, sigma} e_sigma.
// Weights are first collected per unordered pair, then reduced in canonical
// order, which makes the product exactly commutative.
inline AlgebraElement product(const Model& model, const AlgebraElement& u, const AlgebraElement& v) {
  std::map<std::pair<Configuration, Configuration>, double> weights;
  for (const auto& [a, x] : u.terms())
    for (const auto& [b, y] : v.terms()) {
      auto key = b < a ? std::make_pair(b, a) : std::make_pair(a, b);
      weights[std::move(key)] += x * y;
    }
  AlgebraElement out;
  for (const auto& [pair, w] : weights) {
    if (w == 0.0) continue;
    const auto cv = coefficient_vector(model, pair.first, pair.second);
    for (const auto& [sigma, c] : cv.entries) out.add(sigma, w * c);
  }
  return out;
}

inline AlgebraElement associator(const Model& model, const AlgebraElement& u, const AlgebraElement& v,
                                 const AlgebraElement& w) {
  return product(model, product(model, u, v), w) - product(model, u, product(model, v, w));
}

// pi_F(u): sum of the coefficients of u on the class F.
inline double pi_functional(const Model& model, const FertileClassId& cls, const AlgebraElement& u) {
  double s = 0.0;
  for (const auto& [sigma, c] : u.terms())
    if (fertile_class_id(model, sigma) == cls) s += c;
  return s;
}

struct PrincipalIdealReport {
  AlgebraElement multiplier;     // w with e_eta * w = e_zeta, rounded to double
  double residual = 0.0;         // |e_eta * w - e_zeta|_1 in quad precision
  double residual_double = 0.0;  // same through the double-precision product()
  double multiplier_l1 = 0.0;    // |w|_1, the cancellation the product has to absorb
  std::size_t depth = 0;         // clusters meeting D_{eta zeta}
  std::size_t nodes = 0;         // distinct configurations visited by the recursion
};

// Writes e_zeta as an element of the principal ideal e_eta * A via
//   e_xi = (1/c_{eta xi, xi}) (e_eta e_xi - sum_{o != xi} c_{eta xi, o} e_o),
// recursing on the offspring o, whose discrepancy with eta is strictly smaller.
// |w| grows like prod 1/c, so w and the check e_eta * w are carried in quad
// precision.
inline PrincipalIdealReport express_in_principal_ideal(const Model& model, const Configuration& eta,
                                                       const Configuration& zeta) {
  using Quad = boost::multiprecision::cpp_bin_float_quad;
  using Sparse = std::map<Configuration, Quad>;
  const auto d = discrepancy(eta, zeta);
  if (d.is_macroscopic()) throw NotFertile("express_in_principal_ideal: zeta is not in the fertile class of eta");
  std::map<Configuration, Sparse> memo;
  auto w_of = [&](auto&& self, const Configuration& xi) -> const Sparse& {
    if (auto it = memo.find(xi); it != memo.end()) return it->second;
    Sparse w;
    if (xi == eta) {
      w.emplace(eta, Quad(1));
    } else {
      const auto cv = coefficient_vector(model, eta, xi);
      Quad c_xi = 0;
      w.emplace(xi, Quad(1));
      for (const auto& [o, c] : cv.entries) {
        if (o == xi) {
          c_xi = c;
          continue;
        }
        for (const auto& [k, v] : self(self, o)) w[k] -= Quad(c) * v;
      }
      for (auto& [k, v] : w) v /= c_xi;
    }
    return memo.emplace(xi, std::move(w)).first->second;
  };
  const Sparse w = w_of(w_of, zeta);

  Sparse rebuilt;
  for (const auto& [xi, v] : w)
    for (const auto& [sigma, c] : coefficient_vector(model, eta, xi).entries) rebuilt[sigma] += v * Quad(c);
  rebuilt[zeta] -= 1;
  Quad res = 0;
  for (const auto& [k, v] : rebuilt) res += abs(v);

  PrincipalIdealReport r;
  for (const auto& [k, v] : w) r.multiplier.add(k, static_cast<double>(v));
  r.residual = static_cast<double>(res);
  r.residual_double =
      (product(model, AlgebraElement::basis(eta), r.multiplier) - AlgebraElement::basis(zeta)).l1_norm();
  r.multiplier_l1 = r.multiplier.l1_norm();
  r.depth = clusters_meeting(model.clusters, d.region()).size();
  r.nodes = memo.size();
  return r;
}

}  // namespace gga
