#include <gtest/gtest.h>

#include <cmath>

#include "gga/gga.hpp"

using namespace gga;

namespace {

Site at(std::int64_t x) { return Site{0, x, 0}; }

Model ising_z(double beta) {
  return Model(ising_pair(Lattice::integers(), SpinSet::ising(), beta), ClusterPartition::atomic(),
               {TailPattern::constant("plus", 1), TailPattern::constant("minus", 0)});
}

PairElement e(const Configuration& a, const Configuration& b, double k = 1.0) { return PairElement::basis(a, b, k); }

}  // namespace

TEST(EvoCoefficients, ZeroPotentialSingleSite) {
  const Model m(zero_potential(Lattice::integers(), SpinSet::ising()), ClusterPartition::atomic(),
                {TailPattern::constant("plus", 1)});
  const auto sigma = m.config("plus"), eta = m.config("plus", {{at(0), 0}});
  const auto mat = evo_coefficient_matrix(m, sigma, eta);
  ASSERT_EQ(mat.entries.size(), 4u);
  for (const auto& [k, v] : mat.entries) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(EvoCoefficients, SquareOfTheGeneticCoefficient) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus"), eta = sigma.with(at(0), 0);
  const auto mat = evo_coefficient_matrix(m, sigma, eta);
  EXPECT_NEAR(mat.at(sigma, sigma), 0.964351083824617326, 1e-15);
  const double c = 1.0 / (1.0 + std::exp(-4.0));
  EXPECT_NEAR(mat.at(sigma, eta), c * (1.0 - c), 1e-16);
  EXPECT_NEAR(mat.at(eta, sigma), mat.at(sigma, eta), 0.0);
  EXPECT_NEAR(mat.sum(), 1.0, 1e-15);
}

TEST(EvoCoefficients, DirectNormalizationAgrees) {
  const auto m = ising_z(0.7);
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    std::map<Site, int> ra, rb;
    for (int k = 0; k < 3; ++k) ra[at(rng.between(-3, 3))] = static_cast<int>(rng.below(2));
    for (int k = 0; k < 3; ++k) rb[at(rng.between(-3, 3))] = static_cast<int>(rng.below(2));
    const auto a = m.config("plus", ra), b = m.config("plus", rb);
    const auto outer = evo_coefficient_matrix(m, a, b), direct = evo_coefficient_direct(m, a, b);
    ASSERT_EQ(outer.entries.size(), direct.entries.size());
    for (const auto& [k, v] : direct.entries) EXPECT_NEAR(v, outer.at(k.first, k.second), 1e-14);
  }
  EXPECT_TRUE(evo_coefficient_direct(m, m.config("plus"), m.config("minus")).empty());
}

TEST(EvoProduct, OffDiagonalProductsVanish) {
  const auto m = ising_z(1.0);
  const auto a = m.config("plus"), b = a.with(at(0), 0);
  EXPECT_TRUE(evo_product(m, e(a, b), e(b, a)).is_zero());
  EXPECT_TRUE(evo_product(m, e(a, a), e(a, b)).is_zero());
  const auto sq = evo_product(m, e(a, b, 2.0), e(a, b, 3.0));
  EXPECT_NEAR(sq.coefficient({a, a}), 6.0 * 0.964351083824617326, 1e-14);
}

TEST(Idempotents, Examples) {
  const auto m = ising_z(1.0);
  const auto a = m.config("plus"), b = a.with(at(0), 0);
  EXPECT_TRUE(is_idempotent(m, PairElement{}));
  EXPECT_TRUE(is_idempotent(m, e(a, a)));
  EXPECT_TRUE(is_idempotent(m, e(a, a) + e(b, b)));
  EXPECT_FALSE(is_idempotent(m, e(a, b)));
  EXPECT_FALSE(is_idempotent(m, e(a, a, 2.0)));
  EXPECT_FALSE(is_idempotent(m, e(a, a) + e(a, b)));
}

TEST(Idempotents, SupportBound) {
  const auto m = ising_z(1.0);
  PairElement u;
  for (std::int64_t x = 0; x < 7; ++x) {
    const auto c = m.config("plus", {{at(x), 0}});
    u += e(c, c);
  }
  EXPECT_THROW(is_idempotent(m, u), SupportTooLarge);
  EXPECT_TRUE(is_idempotent(m, u, 7));
}

TEST(FertileIdealIso, HandComputedImage) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus"), eta = m.config("minus");
  const auto zeta = sigma.with({{at(0), 0}, {at(5), 0}});
  const auto xi = sigma.with(at(5), 0);
  const auto iso = fertile_ideal_iso(m, sigma, eta, zeta, xi);
  EXPECT_EQ(iso.closure, (Region{at(-1), at(0), at(1)}));
  EXPECT_EQ(iso.lambda, (Region{at(5)}));
  EXPECT_EQ(iso.zeta_image, m.config("minus", {{at(-1), 1}, {at(1), 1}, {at(5), 1}}));
  EXPECT_EQ(iso.xi_image, m.config("minus", {{at(-1), 1}, {at(0), 1}, {at(1), 1}, {at(5), 1}}));

  const auto back = fertile_ideal_iso_map(m, eta, sigma, iso.zeta_image, iso.xi_image);
  EXPECT_EQ(back, (ConfigPair{zeta, xi}));
}

TEST(FertileIdealIso, DiagonalPairOfASingleFlip) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus"), eta = m.config("minus");
  const auto zeta = sigma.with(at(0), 0);
  const auto iso = fertile_ideal_iso(m, sigma, eta, zeta, zeta);
  EXPECT_TRUE(iso.closure.empty());
  EXPECT_EQ(iso.lambda, (Region{at(0)}));
  EXPECT_EQ(iso.zeta_image, m.config("minus", {{at(0), 1}}));
  EXPECT_EQ(iso.xi_image, iso.zeta_image);
}

TEST(FertileIdealIso, PreservesCoefficientsButNotPairwise) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus"), eta = m.config("minus");
  const auto zeta = sigma.with({{at(0), 0}, {at(5), 0}});
  const auto xi = sigma.with(at(5), 0);
  const auto r = check_iso_coefficients(m, sigma, eta, {{zeta, xi}, {xi, zeta}, {sigma, sigma.with(at(2), 0)}});
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.max_coefficient_diff, 1e-15);
  // f applied to the offspring pair (zeta, zeta) lands on the diagonal of a
  // different configuration, outside the image's offspring.
  EXPECT_GT(r.pairwise_image_outside, 0u);
  ASSERT_TRUE(r.pairwise_witness.has_value());
  const auto diag = fertile_ideal_iso_map(m, sigma, eta, zeta, zeta);
  EXPECT_EQ(diag.first, m.config("minus", {{at(0), 1}, {at(5), 1}}));
}

TEST(FertileIdealIso, RejectsBadInput) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus"), eta = m.config("minus");
  EXPECT_THROW(fertile_ideal_iso(m, sigma, eta, eta, eta), NotFertile);
  const Model star(star_inverse_square(SpinSet{2, {0.0, 1.0}}), ClusterPartition::unique(),
                   {TailPattern::constant("zero", 0), TailPattern::constant("one", 1)});
  EXPECT_THROW(fertile_ideal_iso(star, star.config("zero"), star.config("one"), star.config("zero"),
                                 star.config("zero", {{at(1), 1}})),
               InfiniteRange);
}
