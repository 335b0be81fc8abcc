#include <gtest/gtest.h>

#include <cmath>

#include "gga/gga.hpp"
#include "oracles.hpp"

using namespace gga;

namespace {

Site at(std::int64_t x) { return Site{0, x, 0}; }

Model ising_z(double beta, ClusterPartition part = ClusterPartition::atomic()) {
  return Model(ising_pair(Lattice::integers(), SpinSet::ising(), beta), std::move(part),
               {TailPattern::constant("plus", 1), TailPattern::constant("minus", 0)});
}

Model zero_z() {
  return Model(zero_potential(Lattice::integers(), SpinSet::ising()), ClusterPartition::atomic(),
               {TailPattern::constant("plus", 1), TailPattern::constant("minus", 0)});
}

AlgebraElement e(const Configuration& c, double k = 1.0) { return AlgebraElement::basis(c, k); }

}  // namespace

TEST(Coefficients, SingleFlipIsing) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus");
  const auto eta = m.config("plus", {{at(0), 0}});
  const auto cv = coefficient_vector(m, sigma, eta);
  ASSERT_EQ(cv.entries.size(), 2u);
  EXPECT_NEAR(cv.at(sigma), 0.982013790037908442, 1e-15);
  EXPECT_NEAR(cv.at(eta), 1.0 - 0.982013790037908442, 1e-15);
  EXPECT_NEAR(cv.at(sigma), 1.0 / (1.0 + std::exp(-4.0)), 1e-15);
}

TEST(Coefficients, ZeroPotentialIsUniform) {
  const auto m = zero_z();
  const auto sigma = m.config("plus");
  const auto eta = m.config("plus", {{at(0), 0}, {at(5), 0}});
  const auto cv = coefficient_vector(m, sigma, eta);
  ASSERT_EQ(cv.entries.size(), 4u);
  for (const auto& [c, v] : cv.entries) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Coefficients, SumToOneAndCommute) {
  const auto m = ising_z(0.6);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::map<Site, int> ra, rb;
    for (int k = 0; k < 3; ++k) ra[at(rng.between(-4, 4))] = static_cast<int>(rng.below(2));
    for (int k = 0; k < 3; ++k) rb[at(rng.between(-4, 4))] = static_cast<int>(rng.below(2));
    const auto a = m.config("plus", ra), b = m.config("plus", rb);
    const auto ab = coefficient_vector(m, a, b), ba = coefficient_vector(m, b, a);
    EXPECT_NEAR(ab.sum(), 1.0, 1e-12);
    ASSERT_EQ(ab.entries.size(), ba.entries.size());
    for (const auto& [c, v] : ab.entries) EXPECT_EQ(v, ba.at(c));
  }
}

TEST(Coefficients, MacroscopicPairHasNoOffspring) {
  const auto m = ising_z(1.0);
  EXPECT_TRUE(coefficient_vector(m, m.config("plus"), m.config("minus")).empty());
  EXPECT_TRUE(product(m, e(m.config("plus")), e(m.config("minus"))).is_zero());
}

TEST(Coefficients, MatchBruteForceOnFiniteChain) {
  for (const double beta : {0.3, 1.0}) {
    const auto box = Lattice::box(8);
    const Model m(ising_pair(box, SpinSet::ising(), beta), ClusterPartition::atomic(),
                  {TailPattern::constant("minus", 0)});
    Rng rng(17);
    std::vector<int> cluster(8);
    for (int i = 0; i < 8; ++i) cluster[static_cast<std::size_t>(i)] = i;
    for (int t = 0; t < 50; ++t) {
      const auto zs = oracle::decode_spins(rng.below(256), 8), es = oracle::decode_spins(rng.below(256), 8);
      std::map<Site, int> zo, eo;
      for (int i = 0; i < 8; ++i) {
        zo[at(i)] = zs[static_cast<std::size_t>(i)] > 0;
        eo[at(i)] = es[static_cast<std::size_t>(i)] > 0;
      }
      const auto ref = oracle::chain_coefficients(zs, es, cluster, beta);
      const auto cv = coefficient_vector(m, m.config("minus", zo), m.config("minus", eo));
      ASSERT_EQ(cv.entries.size(), ref.size());
      for (const auto& [c, v] : cv.entries) {
        std::vector<int> s(8);
        for (int i = 0; i < 8; ++i) s[static_cast<std::size_t>(i)] = c.at(at(i)) ? 1 : -1;
        ASSERT_TRUE(ref.count(s));
        EXPECT_NEAR(v, ref.at(s), 1e-12);
      }
    }
  }
}

TEST(Product, BilinearWithZeroPotential) {
  const auto m = zero_z();
  const auto sigma = m.config("plus");
  const auto eta = m.config("plus", {{at(0), 0}});
  const auto p = product(m, e(sigma, 2.0), e(eta, 3.0));
  EXPECT_EQ(p, e(sigma, 3.0) + e(eta, 3.0));
  EXPECT_EQ(product(m, e(sigma), e(sigma)), e(sigma));
}

TEST(Product, ExactlyCommutative) {
  const auto m = ising_z(0.8);
  const auto a = m.config("plus", {{at(0), 0}});
  const auto b = m.config("plus", {{at(2), 0}, {at(3), 0}});
  const auto c = m.config("minus", {{at(1), 1}});
  const auto u = e(a, 0.5) + e(b, -1.5) + e(c, 2.0);
  const auto v = e(b, 0.25) + e(m.config("plus"), 1.0) + e(m.config("minus"), -0.75);
  EXPECT_EQ(product(m, u, v), product(m, v, u));
}

TEST(Associator, ThreeSiteTripleOnTheIsingChain) {
  const auto m = ising_z(1.0);
  const auto sigma = m.config("plus");
  const auto eta = sigma.with(at(0), 0);
  const auto zeta = eta.with(at(1), 0);
  const double z = associator(m, e(sigma), e(eta), e(zeta)).coefficient(sigma);
  EXPECT_NEAR(z, -0.0340987962103928378, 1e-14);

  // Independent closed form from the local energies.
  const double a = 1.0 / (1.0 + std::exp(-4.0));
  const double b = std::exp(3.0) / (std::exp(3.0) + 3.0 * std::exp(-1.0));
  EXPECT_NEAR(b, 0.947914993827515604, 1e-15);
  const double closed = a * b - 0.5 * a - 0.5 * b;
  EXPECT_NEAR(z, closed, 1e-14);

  // The textbook rearrangement (c_{eta zeta, eta} - c_{sigma zeta, sigma}) c_{sigma eta, sigma}
  // + c_{eta zeta, zeta} c_{sigma zeta, sigma} comes out with the opposite sign.
  const double printed = (0.5 - b) * a + 0.5 * b;
  EXPECT_NEAR(printed, 0.0340987962103928378, 1e-14);
  EXPECT_NEAR(z + printed, 0.0, 1e-14);
}

TEST(Associator, TwoDimensionalAlgebraIsNotAssociative) {
  const auto one = Lattice::box(1);
  const Model m(zero_potential(one, SpinSet::labels(2)), ClusterPartition::atomic(),
                {TailPattern::constant("zero", 0)});
  const auto e0 = e(m.config("zero")), e1 = e(m.config("zero", {{at(0), 1}}));
  const auto z = associator(m, e0, e0, e1);
  EXPECT_DOUBLE_EQ(z.coefficient(m.config("zero")), -0.25);
  EXPECT_DOUBLE_EQ(z.coefficient(m.config("zero", {{at(0), 1}})), 0.25);
  EXPECT_TRUE(associator(m, e0, e1, e0).is_zero());
}

TEST(PiFunctional, MultiplicativeOnAClass) {
  const auto m = ising_z(0.7);
  const FertileClassId plus{"plus"}, minus{"minus"};
  const auto a = m.config("plus", {{at(0), 0}}), b = m.config("plus", {{at(1), 0}, {at(4), 0}});
  const auto u = e(a, 2.0) + e(m.config("minus"), -1.0);
  const auto v = e(b, 0.5) + e(a, -3.0);
  EXPECT_DOUBLE_EQ(pi_functional(m, plus, u), 2.0);
  EXPECT_DOUBLE_EQ(pi_functional(m, minus, u), -1.0);
  EXPECT_NEAR(pi_functional(m, plus, product(m, u, v)), pi_functional(m, plus, u) * pi_functional(m, plus, v), 1e-12);
  EXPECT_NEAR(pi_functional(m, plus, product(m, e(a), e(b))), 1.0, 1e-15);
}

TEST(PiFunctional, ClassIdFollowsTheTail) {
  const auto m = ising_z(1.0);
  EXPECT_EQ(fertile_class_id(m, m.config("plus", {{at(3), 0}})).tail_id, "plus");
  EXPECT_EQ(fertile_class_id(m, canonicalize(TailPattern::constant("other", 0), {})).tail_id, "minus");
  EXPECT_EQ(fertile_class_id(m, canonicalize(TailPattern::row("alt", {0, 1}), {})).tail_id.rfind("anon:", 0), 0u);
}

TEST(PrincipalIdeal, TrivialAndSingleSite) {
  const auto m = ising_z(1.0);
  const auto eta = m.config("plus");
  const auto r0 = express_in_principal_ideal(m, eta, eta);
  EXPECT_EQ(r0.multiplier, e(eta));
  EXPECT_EQ(r0.residual, 0.0);
  EXPECT_EQ(r0.depth, 0u);

  // e_eta (w) = e_zeta with w = (e_zeta - c e_eta)/(1-c) for one flipped site.
  const auto zeta = eta.with(at(0), 0);
  const auto r1 = express_in_principal_ideal(m, eta, zeta);
  const double c = 1.0 / (1.0 + std::exp(-4.0));
  EXPECT_NEAR(r1.multiplier.coefficient(zeta), 1.0 / (1.0 - c), 1e-9);
  EXPECT_NEAR(r1.multiplier.coefficient(eta), -c / (1.0 - c), 1e-9);
  EXPECT_LT(r1.residual, 1e-25);
  EXPECT_EQ(r1.depth, 1u);
}

TEST(PrincipalIdeal, ThreeSitesResidual) {
  const auto m = ising_z(1.0);
  const auto eta = m.config("plus");
  const auto zeta = eta.with({{at(-1), 0}, {at(0), 0}, {at(2), 0}});
  const auto r = express_in_principal_ideal(m, eta, zeta);
  EXPECT_EQ(r.depth, 3u);
  EXPECT_LT(r.residual, 1e-20);
  EXPECT_LT(r.residual_double, 1e-6);
  EXPECT_GT(r.multiplier_l1, 1e3);
  EXPECT_THROW(express_in_principal_ideal(m, eta, m.config("minus")), NotFertile);
}

TEST(Embedding, FiniteVolumeReproducesCoefficients) {
  const auto m = ising_z(0.9);
  const auto sigma = m.config("plus");
  const std::vector<Configuration> basis{sigma, sigma.with(at(0), 0), sigma.with(at(1), 0),
                                         sigma.with({{at(0), 0}, {at(1), 0}})};
  const auto r = embed_finite_subalgebra(m, basis, std::nullopt, sigma);
  EXPECT_EQ(r.lambda, (Region{at(-1), at(0), at(1), at(2)}));
  EXPECT_TRUE(r.injective);
  EXPECT_TRUE(r.offspring_match);
  EXPECT_LT(r.max_diff, 1e-12);
  EXPECT_EQ(r.pairs, 10u);

  const Region bigger{at(-3), at(-2), at(-1), at(0), at(1), at(2), at(3)};
  const auto rb = embed_finite_subalgebra(m, basis, bigger, m.config("minus"));
  EXPECT_LT(rb.max_diff, 1e-12);
  EXPECT_THROW(embed_finite_subalgebra(m, basis, Region{at(0)}, sigma), ValidationError);
  EXPECT_THROW(embed_finite_subalgebra(m, {sigma, m.config("minus")}, std::nullopt, sigma), ClassMismatch);
}
