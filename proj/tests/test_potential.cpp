#include <gtest/gtest.h>

#include "gga/gga.hpp"
#include "oracles.hpp"

using namespace gga;

namespace {

Site at(std::int64_t x) { return Site{0, x, 0}; }

const Lattice Z = Lattice::integers();

Configuration plus(std::map<Site, int> ov = {}) { return canonicalize(TailPattern::constant("plus", 1), ov); }

}  // namespace

TEST(Hamiltonian, ZeroPotential) {
  const auto phi = zero_potential(Z, SpinSet::ising());
  EXPECT_EQ(hamiltonian_restricted(*phi, {at(0), at(4)}, plus({{at(0), 0}})), 0.0);
  EXPECT_EQ(log_boltzmann(*phi, {at(0)}, plus()), 0.0);
}

TEST(Hamiltonian, IsingSingleFlip) {
  const auto phi = ising_pair(Z, SpinSet::ising(), 1.0);
  const auto sigma = plus({{at(0), 0}});
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*phi, {at(0)}, sigma), 2.0);
  EXPECT_DOUBLE_EQ(log_boltzmann(*phi, {at(0)}, sigma), -2.0);
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*phi, {at(0)}, plus()), -2.0);
}

TEST(Hamiltonian, IsingAgreesWithHandSumOnRandomRegions) {
  const double beta = 0.7;
  const auto phi = ising_pair(Z, SpinSet::ising(), beta);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::set<long> minus, region;
    std::map<Site, int> ov;
    for (int k = 0; k < 4; ++k) {
      const long x = rng.between(-5, 5);
      minus.insert(x);
      ov[at(x)] = 0;
    }
    Region lam;
    for (int k = 0; k < 3; ++k) {
      const long x = rng.between(-5, 5);
      region.insert(x);
      lam.insert(at(x));
    }
    EXPECT_NEAR(hamiltonian_restricted(*phi, lam, plus(ov)), oracle::z_ising_local_energy(minus, region, beta),
                1e-12);
  }
}

TEST(Hamiltonian, StarPotentialHub) {
  const SpinSet s01{2, {0.0, 1.0}};
  const auto phi = star_inverse_square(s01);
  const auto ones = canonicalize(TailPattern::constant("one", 1), {});
  EXPECT_NEAR(hamiltonian_restricted(*phi, {at(0)}, ones), static_cast<double>(oracle::zeta2()), 1e-15);
  EXPECT_NEAR(log_boltzmann(*phi, {at(0)}, ones), -1.6449340668482264, 1e-15);
  // Removing sites 1 and 2 from the sum.
  const auto holes = ones.with({{at(1), 0}, {at(2), 0}});
  EXPECT_NEAR(hamiltonian_restricted(*phi, {at(0)}, holes), static_cast<double>(oracle::zeta2() - 1.25L), 1e-15);
  // Off the hub only finitely many terms are involved.
  EXPECT_NEAR(hamiltonian_restricted(*phi, {at(3)}, ones), 1.0 / 9.0, 1e-15);
}

TEST(Hamiltonian, StarPotentialRejectsPeriodicTailAtHub) {
  const SpinSet s01{2, {0.0, 1.0}};
  const auto phi = star_inverse_square(s01);
  const auto alt = canonicalize(TailPattern::row("alt", {0, 1}), {});
  EXPECT_THROW(hamiltonian_restricted(*phi, {at(0)}, alt), UnsupportedTail);
  EXPECT_NO_THROW(hamiltonian_restricted(*phi, {at(5)}, alt));
}

TEST(Boundary, NearestNeighbours) {
  const auto phi = ising_pair(Z, SpinSet::ising(), 1.0);
  EXPECT_EQ(potential_boundary(*phi, {at(0)}), (Region{at(-1), at(1)}));
  EXPECT_EQ(potential_boundary(*phi, {at(0), at(1)}), (Region{at(-1), at(2)}));
  EXPECT_EQ(closure(*phi, {at(0)}), (Region{at(-1), at(0), at(1)}));
  EXPECT_TRUE(potential_boundary(*zero_potential(Z, SpinSet::ising()), {at(0), at(4)}).empty());
}

TEST(Boundary, StarHubIsInfinite) {
  const auto phi = star_inverse_square(SpinSet{2, {0.0, 1.0}});
  EXPECT_FALSE(phi->finite_range());
  EXPECT_THROW(potential_boundary(*phi, {at(0)}), InfiniteRange);
  EXPECT_EQ(potential_boundary(*phi, {at(7)}), (Region{at(0)}));
  EXPECT_FALSE(phi_neighborhood(*phi, at(0)).has_value());
  EXPECT_EQ(*phi_neighborhood(*phi, at(7)), (Region{at(0)}));
}

TEST(Neighborhood, SquareLattice) {
  const auto phi = ising_pair(Lattice::square(), SpinSet::ising(), 1.0);
  const auto n = phi_neighborhood(*phi, Site{0, 0, 0});
  ASSERT_TRUE(n.has_value());
  EXPECT_EQ(*n, (Region{Site{0, -1, 0}, Site{0, 1, 0}, Site{0, 0, -1}, Site{0, 0, 1}}));
}

TEST(Terms, AreLocal) {
  const auto phi = potts_pair(Z, SpinSet::labels(3), 0.9);
  Rng rng(5);
  const auto tail = TailPattern::constant("z", 0);
  for (int t = 0; t < 100; ++t) {
    std::map<Site, int> a, b;
    for (std::int64_t x = -3; x <= 3; ++x) a[at(x)] = static_cast<int>(rng.below(3));
    for (const auto& term : phi->terms_touching({at(0)})) {
      b = a;
      for (std::int64_t x = -3; x <= 3; ++x)
        if (std::find(term.support.begin(), term.support.end(), at(x)) == term.support.end())
          b[at(x)] = static_cast<int>(rng.below(3));
      EXPECT_EQ(term(canonicalize(tail, a)), term(canonicalize(tail, b)));
    }
  }
}

TEST(Shift, AddsConstantsOnTouchedSupports) {
  const auto phi = ising_pair(Z, SpinSet::ising(), 1.0);
  const auto psi = shift_potential(phi, {{Region{at(0), at(1)}, 0.5}});
  const auto both = shift_potential(phi, {{Region{at(0), at(1)}, 0.5}, {Region{at(-2), at(-1)}, 0.25}});
  EXPECT_EQ(shift_potential(phi, {}), phi);
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto sigma = plus({{at(rng.between(-3, 3)), 0}, {at(rng.between(-3, 3)), 0}});
    const double h = hamiltonian_restricted(*phi, {at(0)}, sigma);
    EXPECT_NEAR(hamiltonian_restricted(*psi, {at(0)}, sigma), h + 0.5, 1e-12);
    const double h2 = hamiltonian_restricted(*phi, {at(0), at(-1)}, sigma);
    EXPECT_NEAR(hamiltonian_restricted(*both, {at(0), at(-1)}, sigma), h2 + 0.75, 1e-12);
  }
}

TEST(DirectSum, HamiltoniansSeparate) {
  const auto ising = ising_pair(Z, SpinSet::ising(), 0.8);
  const auto potts = potts_pair(Z, SpinSet::ising(), 0.3);
  const auto sum = direct_sum_potentials({ising, potts});
  const auto tail = std::make_shared<const TailPattern>(
      "pp", std::vector<PeriodicTable>{PeriodicTable::constant(1), PeriodicTable::constant(0)});
  const auto sigma = canonicalize(tail, {{Site{0, 0, 0}, 0}, {Site{1, 1, 0}, 1}, {Site{1, 2, 0}, 1}});
  const Region lam{Site{0, 0, 0}, Site{0, 1, 0}, Site{1, 1, 0}};
  const double expected = hamiltonian_restricted(*ising, {at(0), at(1)}, project_parts(sigma, 0, 1)) +
                          hamiltonian_restricted(*potts, {at(1)}, project_parts(sigma, 1, 1));
  EXPECT_NEAR(hamiltonian_restricted(*sum, lam, sigma), expected, 1e-12);
  EXPECT_THROW(direct_sum_potentials({ising, potts_pair(Z, SpinSet::labels(3), 1.0)}), SpinMismatch);
}

TEST(DirectSum, ZeroPlusZeroIsZero) {
  const auto sum = direct_sum_potentials({zero_potential(Z, SpinSet::ising()), zero_potential(Z, SpinSet::ising())});
  const auto tail = TailPattern::constant("z", 0, 2);
  EXPECT_EQ(hamiltonian_restricted(*sum, {Site{0, 0, 0}, Site{1, 3, 0}}, canonicalize(tail, {{Site{1, 3, 0}, 1}})),
            0.0);
}

TEST(TauImage, TranslationMovesTheSupport) {
  const SpinSet s01{2, {0.0, 1.0}};
  const auto phi = finite_terms(Z, s01, {FiniteTermSpec{{at(0), at(1)}, {0, 0, 1, 1}}});
  const auto img = tau_image_potential(phi, TauTransform::translation(1));
  const auto one = canonicalize(TailPattern::constant("one", 1), {});
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*phi, {at(0)}, one), 1.0);
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*img, {at(0)}, one), 0.0);
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*img, {at(1)}, one), 1.0);
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*img, {at(2)}, one), 1.0);
  EXPECT_EQ(potential_boundary(*img, {at(1)}), (Region{at(2)}));
}

TEST(TauImage, CovarianceUnderSpinFlipAndTranslation) {
  const auto phi = ising_pair(Z, SpinSet::ising(), 1.3);
  for (const auto& tau : {TauTransform::identity().with_spin_map({1, 0}), TauTransform::translation(3),
                          TauTransform::reflection(2).with_spin_map({1, 0})}) {
    const auto img = tau_image_potential(phi, tau);
    Rng rng(21);
    for (int t = 0; t < 100; ++t) {
      const auto sigma = plus({{at(rng.between(-4, 4)), 0}, {at(rng.between(-4, 4)), 0}});
      const Region lam{at(rng.between(-4, 4)), at(rng.between(-4, 4))};
      EXPECT_NEAR(hamiltonian_restricted(*img, push_region(tau, lam), apply_tau(Z, tau, sigma)),
                  hamiltonian_restricted(*phi, lam, sigma), 1e-12);
    }
  }
}

TEST(TauImage, IncompatibleTransformRejected) {
  const auto phi = ising_pair(Lattice::naturals(), SpinSet::ising(), 1.0);
  EXPECT_THROW(tau_image_potential(phi, TauTransform::translation(1)), IncompatibleTransform);
  EXPECT_THROW(tau_image_potential(phi, TauTransform::reflection(0)), IncompatibleTransform);
}

TEST(FiniteVolume, AdditivitySplitOverOffspring) {
  // On a finite lattice H_L = H_D + (terms away from D), and the second part
  // does not change across offspring.
  const auto box = Lattice::box(6);
  const auto phi = ising_pair(box, SpinSet::ising(), 0.9);
  const auto tail = TailPattern::constant("b", 0);
  const auto zeta = canonicalize(box, tail, {{at(1), 1}, {at(4), 1}});
  const auto eta = zeta.with({{at(1), 0}, {at(2), 1}});
  const auto d = discrepancy(zeta, eta).region();
  Region all;
  for (const auto& s : box.finite_sites()) all.insert(s);
  std::optional<double> rest;
  for (const auto& o : offspring(ClusterPartition::atomic(), zeta, eta)) {
    const double r = hamiltonian_restricted(*phi, all, o) - hamiltonian_restricted(*phi, d, o);
    if (!rest) rest = r;
    EXPECT_NEAR(r, *rest, 1e-12);
  }
}
