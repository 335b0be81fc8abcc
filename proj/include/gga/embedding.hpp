#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "gga/finite_oracle.hpp"
#include "gga/genetic.hpp"

namespace gga {

struct EmbeddingReport {
  Region lambda;        // cl(union of pairwise discrepancies)
  Region lambda_prime;  // window of the finite model
  std::size_t pairs = 0;
  std::size_t coefficients = 0;
  double max_diff = 0.0;
  bool injective = true;
  bool offspring_match = true;
};

// Maps sigma to sigma on Lambda and xi on Lambda' \ Lambda, and compares the
// structure constants of the span of `basis` against the finite algebra of
// mu_{Lambda'}(. | xi).
inline EmbeddingReport embed_finite_subalgebra(const Model& model, const std::vector<Configuration>& basis,
                                               const std::optional<Region>& lam_prime, const Configuration& xi) {
  if (!model.potential->finite_range())
    throw InfiniteRange("embed_finite_subalgebra requires a finite-range potential");
  if (basis.empty()) throw ValidationError("embed_finite_subalgebra: empty basis");
  EmbeddingReport r;
  Region d;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const auto dij = discrepancy(basis[i], basis[j]);
      if (dij.is_macroscopic()) throw ClassMismatch("basis configurations lie in different fertile classes");
      d.insert(dij.region().begin(), dij.region().end());
    }
  r.lambda = closure(*model.potential, d);
  r.lambda_prime = lam_prime.value_or(r.lambda);
  if (!std::includes(r.lambda_prime.begin(), r.lambda_prime.end(), r.lambda.begin(), r.lambda.end()))
    throw ValidationError("lam_prime must contain the closure of the discrepancies");

  const auto fm = FiniteModel::window(model, r.lambda_prime, xi);
  const auto table = enumerate_measure(fm);
  auto f = [&](const Configuration& sigma) {
    Assignment a;
    for (const auto& s : fm.sites) a.push_back(r.lambda.count(s) ? sigma.at(s) : xi.at(s));
    return a;
  };

  std::set<Assignment> images;
  for (const auto& b : basis) images.insert(f(b));
  std::set<Configuration> distinct(basis.begin(), basis.end());
  r.injective = images.size() == distinct.size();

  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      ++r.pairs;
      const auto cv = coefficient_vector(model, basis[i], basis[j]);
      const auto fi = f(basis[i]), fj = f(basis[j]);
      if (finite_offspring(fm, fi, fj).size() != cv.entries.size()) r.offspring_match = false;
      for (const auto& [zeta, c] : cv.entries) {
        const double a = finite_genetic_coefficient(fm, table, fi, fj, f(zeta));
        r.max_diff = std::max(r.max_diff, std::fabs(a - c));
        ++r.coefficients;
      }
    }
  return r;
}

}  // namespace gga
