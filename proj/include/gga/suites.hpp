#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gga/embedding.hpp"
#include "gga/evolution.hpp"
#include "gga/finite_oracle.hpp"
#include "gga/genetic.hpp"
#include "gga/sampling.hpp"
#include "gga/spec_io.hpp"
#include "gga/transforms.hpp"

namespace gga {

struct Check {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string comparison = "<=";  // "<=": deviation within tolerance, ">": deviation must exceed it
  json witness = json::object();
};

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<Check> checks;
  double duration = 0.0;  // seconds; the only non-deterministic field

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  json body() const {
    json cs = json::array();
    for (const auto& c : checks)
      cs.push_back({{"name", c.name},
                    {"status", c.passed ? "pass" : "fail"},
                    {"max_deviation", c.max_deviation},
                    {"tolerance", c.tolerance},
                    {"comparison", c.comparison},
                    {"witness", c.witness}});
    return {{"suite", suite}, {"seed", seed}, {"samples", samples}, {"passed", passed()}, {"checks", cs}};
  }

  json to_json() const {
    auto j = body();
    j["duration_s"] = duration;
    return j;
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "markov",   "nonassoc",     "decomposition",     "equiv-potentials", "tau-iso",     "functionals",
      "tensor",   "finite-oracle", "evo-factorization", "em-ideal-iso",     "counterexample", "embed-finite"};
  return names;
}

namespace suite_detail {

inline Check within(std::string name, double dev, double tol, json witness = json::object()) {
  return Check{std::move(name), dev <= tol, dev, tol, "<=", std::move(witness)};
}

inline Check exceeds(std::string name, double dev, double tol, json witness = json::object()) {
  return Check{std::move(name), dev > tol, dev, tol, ">", std::move(witness)};
}

inline Check holds(std::string name, bool ok, json witness = json::object()) {
  return Check{std::move(name), ok, ok ? 0.0 : 1.0, 0.0, "<=", std::move(witness)};
}

template <class T>
T param(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("suite_params.") + key + ": wrong type");
  }
}

inline SampleSpec sample_spec(const json& params, std::size_t max_discrepancy = 3) {
  SampleSpec s;
  s.window = param<std::int64_t>(params, "window", s.window);
  s.max_overrides = param<std::size_t>(params, "max_overrides", s.max_overrides);
  s.max_discrepancy = param<std::size_t>(params, "max_discrepancy", max_discrepancy);
  return s;
}

inline Model with_clusters(const Model& m, ClusterPartition c) { return Model(m.potential, std::move(c), m.tails, m.measure); }

inline Model with_potential(const Model& m, PotentialPtr phi) { return Model(std::move(phi), m.clusters, m.tails, m.measure); }

inline std::string cluster_name(const ClusterPartition& c) {
  switch (c.kind()) {
    case ClusterPartition::Kind::Atomic: return "atomic";
    case ClusterPartition::Kind::Unique: return "unique";
    case ClusterPartition::Kind::Blocks: return "blocks(" + std::to_string(c.block_size()) + ")";
    case ClusterPartition::Kind::FiniteList: return "list";
    case ClusterPartition::Kind::DisjointUnion: return "disjoint-union";
  }
  return "?";
}

inline json pair_witness(const Model& m, const Configuration& a, const Configuration& b) {
  return {{"left", config_to_json(m, a)}, {"right", config_to_json(m, b)}};
}

// Tail whose table is constant `label`, or nullptr.
inline TailPtr constant_tail(const Model& m, int label) {
  for (const auto& t : m.tails)
    if (t->is_constant() && t->parts().front().table.front() == label) return t;
  return nullptr;
}

inline const std::string& tail_param(const Model& m, const json& params, const char* key, std::size_t fallback) {
  if (params.contains(key)) {
    const auto id = param<std::string>(params, key, "");
    for (const auto& t : m.tails)
      if (t->id() == id) return t->id();
    throw ValidationError(std::string("suite_params.") + key + ": unknown tail '" + id + "'");
  }
  if (fallback >= m.tails.size()) throw ValidationError("suite needs at least " + std::to_string(fallback + 1) + " tails");
  return m.tails[fallback]->id();
}

// All subsets of `pool` with at most k elements, in lexicographic order.
inline std::vector<std::vector<Site>> small_subsets(const std::vector<Site>& pool, std::size_t k) {
  std::vector<std::vector<Site>> out{{}};
  std::vector<Site> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) return;
    for (std::size_t i = start; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      out.push_back(cur);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Every way to change the labels on `sites` away from base's labels.
inline std::vector<Configuration> all_changes(const Configuration& base, const std::vector<Site>& sites, int q) {
  std::vector<Configuration> out;
  std::map<Site, int> changes;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == sites.size()) {
      out.push_back(base.with(changes));
      return;
    }
    for (int v = 0; v < q; ++v) {
      if (v == base.at(sites[i])) continue;
      changes[sites[i]] = v;
      rec(i + 1);
    }
    changes.erase(sites[i]);
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------

inline void markov(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  const auto& base = spec.model;
  const auto sspec = sample_spec(spec.suite_params, 6);
  std::vector<ClusterPartition> parts{ClusterPartition::atomic(), ClusterPartition::unique(), ClusterPartition::blocks(2)};
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto m = with_clusters(base, parts[p]);
    const auto samples = sample_fertile_pairs(m, n, seed + p, sspec);
    double dev = 0.0, evo_dev = 0.0;
    json worst;
    for (const auto& [a, b] : samples) {
      const double d = std::fabs(coefficient_vector(m, a, b).sum() - 1.0);
      if (d > dev || worst.is_null()) {
        dev = std::max(dev, d);
        worst = pair_witness(m, a, b);
      }
      evo_dev = std::max(evo_dev, std::fabs(evo_coefficient_matrix(m, a, b).sum() - 1.0));
    }
    const auto name = cluster_name(parts[p]);
    r.checks.push_back(within("markov-sum[" + name + "]", dev, 1e-12, worst));
    r.checks.push_back(within("evo-markov-sum[" + name + "]", evo_dev, 1e-12));
  }

  // Unique cluster: two offspring, a replica of each parent.
  const auto m = with_clusters(base, ClusterPartition::unique());
  SampleSpec uspec = sspec;
  const std::size_t nu = param<std::size_t>(spec.suite_params, "unique_samples", 500);
  const auto samples = sample_fertile_pairs(m, nu, seed + 17, uspec);
  double comp = 0.0, logistic = 0.0;
  for (const auto& [a, b] : samples) {
    const auto cv = coefficient_vector(m, a, b);
    if (a == b) continue;
    comp = std::max(comp, std::fabs(cv.at(a) + cv.at(b) - 1.0));
    const auto d = discrepancy(a, b).region();
    const double ha = hamiltonian_restricted(*m.potential, d, a);
    const double hb = hamiltonian_restricted(*m.potential, d, b);
    logistic = std::max(logistic, std::fabs(cv.at(a) - 1.0 / (1.0 + std::exp(ha - hb))));
  }
  r.checks.push_back(within("unique-complement", comp, 1e-15));
  r.checks.push_back(within("unique-logistic", logistic, 1e-12));
}

inline void nonassoc(const ModelSpec& spec, std::uint64_t, std::size_t, Report& r) {
  const auto& m = spec.model;
  const auto& params = spec.suite_params;
  const auto x = param<std::int64_t>(params, "x", 0);
  const auto y = param<std::int64_t>(params, "y", 1);
  if (x == y) throw ValidationError("suite_params: x and y must differ");
  const Site sx{0, x, 0}, sy{0, y, 0};
  if (!m.lattice.contains(sx) || !m.lattice.contains(sy)) throw ValidationError("nonassoc: x, y not in the lattice");
  const int q = m.spins.q;
  const auto sigma = m.config(tail_param(m, params, "tail", 0));
  const auto eta = sigma.with(sx, (sigma.at(sx) + 1) % q);
  const auto zeta = eta.with(sy, (eta.at(sy) + 1) % q);

  const auto es = AlgebraElement::basis(sigma), ee = AlgebraElement::basis(eta), ez = AlgebraElement::basis(zeta);
  const double route_product = associator(m, es, ee, ez).coefficient(sigma);

  const double c_se_s = coefficient_vector(m, sigma, eta).at(sigma);
  const double c_sz_s = coefficient_vector(m, sigma, zeta).at(sigma);
  const auto cez = coefficient_vector(m, eta, zeta);
  const double route_closed = c_se_s * c_sz_s - cez.at(eta) * c_se_s - cez.at(zeta) * c_sz_s;
  const double printed = (cez.at(eta) - c_sz_s) * c_se_s + cez.at(zeta) * c_sz_s;

  json w{{"sigma", config_to_json(m, sigma)},
         {"eta", config_to_json(m, eta)},
         {"zeta", config_to_json(m, zeta)},
         {"associator_sigma_coefficient", route_product},
         {"closed_form", route_closed},
         {"printed_form", printed}};
  r.checks.push_back(exceeds("lemma-triple-nonzero", std::fabs(route_product), 1e-9, w));
  r.checks.push_back(within("lemma-triple-closed-form", std::fabs(route_product - route_closed), 1e-12, w));
  r.checks.push_back(within("lemma-triple-printed-form-negated", std::fabs(route_product + printed), 1e-12, w));

  // One site, q = 2: the algebra has dimension 2.
  const Lattice one = Lattice::box(1);
  const SpinSet spins = SpinSet::labels(2);
  const Model dim2(zero_potential(one, spins), ClusterPartition::atomic(),
                   {TailPattern::constant("zero", 0)});
  const std::vector<Configuration> basis{dim2.config("zero"), dim2.config("zero", {{Site{0, 0, 0}, 1}})};
  double worst = 0.0;
  json ww = json::object();
  for (const auto& a : basis)
    for (const auto& b : basis)
      for (const auto& c : basis) {
        const auto z = associator(dim2, AlgebraElement::basis(a), AlgebraElement::basis(b), AlgebraElement::basis(c));
        if (z.max_abs() > worst) {
          worst = z.max_abs();
          ww = {{"u", config_to_json(dim2, a)},
                {"v", config_to_json(dim2, b)},
                {"w", config_to_json(dim2, c)},
                {"associator", element_to_json(dim2, z)}};
        }
      }
  r.checks.push_back(within("dim2-associative", worst, 1e-15, ww));
}

inline void decomposition(const ModelSpec& spec, std::uint64_t, std::size_t, Report& r) {
  const auto& m = spec.model;
  const auto w = param<std::int64_t>(spec.suite_params, "decomposition_window", m.lattice.part(0).dimension() == 2 ? 1 : 3);
  const auto k = param<std::size_t>(spec.suite_params, "max_discrepancy", 4);
  const auto pool = window_sites(m.lattice, w);
  double worst = 0.0, worst_double = 0.0, worst_l1 = 0.0;
  std::size_t count = 0;
  json wit = json::object();
  for (const auto& t : m.tails) {
    const auto eta = m.config(t->id());
    for (const auto& sites : small_subsets(pool, k))
      for (const auto& zeta : all_changes(eta, sites, m.spins.q)) {
        const auto rep = express_in_principal_ideal(m, eta, zeta);
        ++count;
        worst_double = std::max(worst_double, rep.residual_double);
        worst_l1 = std::max(worst_l1, rep.multiplier_l1);
        if (rep.residual > worst || wit.empty()) {
          worst = std::max(worst, rep.residual);
          wit = pair_witness(m, eta, zeta);
        }
      }
  }
  wit["configurations"] = count;
  wit["max_residual_double"] = worst_double;
  wit["max_multiplier_l1"] = worst_l1;
  r.checks.push_back(within("principal-ideal-residual", worst, 1e-10, wit));
}

inline json adjust_beta(json potential, double delta) {
  if (potential.contains("beta")) {
    potential["beta"] = potential["beta"].get<double>() + delta;
    return potential;
  }
  if (potential.contains("base")) {
    potential["base"] = adjust_beta(potential["base"], delta);
    return potential;
  }
  if (potential.value("kind", "") == "ising_pair" || potential.value("kind", "") == "potts_pair") {
    potential["beta"] = 1.0 + delta;
    return potential;
  }
  throw ValidationError("equiv-potentials: negative control needs a beta parameter in the potential");
}

inline void equiv_potentials(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  if (spec.is_product()) throw ValidationError("equiv-potentials expects a single model");
  const auto& m = spec.model;
  const auto sspec = sample_spec(spec.suite_params);
  const auto samples = sample_fertile_pairs(m, n, seed, sspec);

  // Constant 2^-k shifts on nearest-neighbour bonds of the sampling window.
  std::vector<std::pair<Region, double>> shifts;
  const auto sites = window_sites(m.lattice, sspec.window + 1);
  std::size_t i = 0;
  for (const auto& s : sites)
    for (const auto& [dx, dy] : nearest_neighbor_offsets(m.lattice)) {
      const Site t{s.part, s.x + dx, s.y + dy};
      if (!m.lattice.contains(t)) continue;
      shifts.push_back({Region{s, t}, std::ldexp(1.0, -static_cast<int>(1 + i++ % 10))});
    }
  const auto shifted = with_potential(m, shift_potential(m.potential, shifts));
  const auto same = check_potential_equivalence(m, with_potential(m, shift_potential(m.potential, {})), samples);
  r.checks.push_back(within("empty-shift", same.max_diff, 0.0));
  const auto eq = check_potential_equivalence(m, shifted, samples);
  r.checks.push_back(within("shifted-equivalent", eq.offspring_match ? eq.max_diff : 1.0, 1e-12,
                            {{"shifts", shifts.size()}, {"coefficients", eq.coefficients}}));

  const double delta = param<double>(spec.suite_params, "beta_shift", 0.5);
  const auto control_phi = potential_from_json(m.lattice, m.spins, adjust_beta(spec.document.at("potential"), delta));
  const auto ctrl = check_potential_equivalence(m, with_potential(m, control_phi), samples);
  r.checks.push_back(exceeds("negative-control-flagged", ctrl.max_diff, 1e-3,
                             {{"beta_shift", delta}, {"equal", ctrl.equal()}}));
}

inline std::vector<Region> probe_windows(const Lattice& lattice) {
  const auto pool = window_sites(lattice, 1);
  std::vector<Region> out;
  for (const auto& s : pool) out.push_back({s});
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) out.push_back({pool[i], pool[j]});
  return out;
}

inline void tau_iso(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  if (spec.is_product()) throw ValidationError("tau-iso expects a single model");
  const auto& m = spec.model;
  const auto tau = spec.suite_params.contains("tau")
                       ? tau_from_json(m.lattice, m.spins.q, spec.suite_params.at("tau"))
                       : TauTransform::translation(1);
  tau.check_compatible(m.lattice, m.spins.q);
  const auto kind = m.clusters.kind();
  if (kind != ClusterPartition::Kind::Atomic && kind != ClusterPartition::Kind::Unique)
    throw ValidationError("tau-iso: tau(C) is only formed for atomic or unique clusters");
  const Model image(tau_image_potential(m.potential, tau), m.clusters, m.tails, m.measure);
  const auto samples = sample_fertile_pairs(m, n, seed, sample_spec(spec.suite_params));
  const auto rep = check_tau_isomorphism(m, image, tau, samples);
  r.checks.push_back(holds("discrepancy-covariant", rep.discrepancy_covariant && rep.clusters_consistent));
  r.checks.push_back(within("tau-genetic", rep.offspring_match ? rep.max_genetic_diff : 1.0, 1e-12));
  r.checks.push_back(within("tau-evolution", rep.offspring_match ? rep.max_evolution_diff : 1.0, 1e-12));

  // Is Phi itself equivalent to tau(Phi)? Probe H^{Phi - tau(Phi)} on small windows.
  std::vector<Configuration> bases;
  for (const auto& t : m.tails) bases.push_back(m.config(t->id()));
  const auto probe = probe_equivalence(*m.potential, *image.potential, probe_windows(m.lattice), bases);
  json w{{"verdict", probe.verdict()}, {"windows", probe.windows}, {"evaluations", probe.evaluations}};
  if (probe.witness) {
    json win = json::array();
    for (const auto& s : probe.witness->window) win.push_back(site_to_json(m.lattice, s));
    w["witness"] = {{"window", win},
                    {"first", config_to_json(m, probe.witness->first)},
                    {"second", config_to_json(m, probe.witness->second)},
                    {"first_value", probe.witness->first_value},
                    {"second_value", probe.witness->second_value}};
  }
  const auto expect = param<std::string>(spec.suite_params, "probe_expect", "");
  bool ok = true;
  if (expect == "not-equivalent") ok = !probe.consistent;
  else if (expect == "consistent") ok = probe.consistent;
  else if (!expect.empty()) throw ValidationError("suite_params.probe_expect: expected 'not-equivalent' or 'consistent'");
  w["expected"] = expect.empty() ? "none" : expect;
  r.checks.push_back(holds("probe-phi-vs-tau-phi", ok, w));
}

inline AlgebraElement random_element(const Model& m, Rng& rng, std::size_t max_support, const SampleSpec& s) {
  AlgebraElement u;
  const auto k = 1 + rng.below(max_support);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& tail = m.tails[rng.below(m.tails.size())]->id();
    u.add(random_configuration(m, tail, rng, s), 2.0 * rng.uniform() - 1.0);
  }
  return u;
}

inline void functionals(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  const auto& m = spec.model;
  SampleSpec s = sample_spec(spec.suite_params);
  s.window = param<std::int64_t>(spec.suite_params, "window", 2);
  Rng rng(seed);
  double worst = 0.0;
  std::set<FertileClassId> seen;
  std::size_t mixed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = random_element(m, rng, 5, s), v = random_element(m, rng, 5, s);
    const auto uv = product(m, u, v);
    std::set<FertileClassId> classes;
    for (const auto* e : {&u, &v, &uv})
      for (const auto& [c, x] : e->terms()) classes.insert(fertile_class_id(m, c));
    if (classes.size() > 1) ++mixed;
    for (const auto& cls : classes) {
      seen.insert(cls);
      worst = std::max(worst, std::fabs(pi_functional(m, cls, uv) - pi_functional(m, cls, u) * pi_functional(m, cls, v)));
    }
  }
  json cls = json::array();
  for (const auto& c : seen) cls.push_back(c.tail_id);
  r.checks.push_back(within("pi-multiplicative", worst, 1e-10, {{"classes", cls}, {"mixed_pairs", mixed}}));
}

inline void tensor(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  if (!spec.is_product()) throw ValidationError("tensor suite needs a product spec");
  const auto samples = sample_fertile_pairs(spec.model, n, seed, sample_spec(spec.suite_params));
  const auto rep = check_tensor_factorization(spec.model, spec.factors, samples);
  r.checks.push_back(holds("offspring-factorize", rep.offspring_factorize));
  r.checks.push_back(within("tensor-genetic", rep.max_genetic_diff, 1e-12));
  r.checks.push_back(within("tensor-evolution", rep.max_evolution_diff, 1e-12));
}

inline void finite_oracle(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  const auto& m = spec.model;
  if (m.lattice.is_finite()) {
    const auto cmp = compare_finite_equivalence(m, n, seed);
    json w{{"coefficients", cmp.coefficients}, {"states", FiniteModel::from_model(m).state_count()}};
    r.checks.push_back(holds("oracle-offspring", cmp.offspring_match));
    r.checks.push_back(within("oracle-genetic", cmp.max_genetic_diff, 1e-10, w));
    r.checks.push_back(within("oracle-evolution", cmp.max_evolution_diff, 1e-10, w));
  }
  // Atomic clusters, q = 2: the offspring of (zeta, eta) are all labelings of
  // D, so c is the finite-volume conditional on D.
  if (m.spins.q != 2 || !m.potential->finite_range()) {
    r.checks.push_back(holds("atomic-dlr", true, {{"skipped", "needs q = 2 and finite range"}}));
    return;
  }
  const auto atomic = with_clusters(m, ClusterPartition::atomic());
  const auto samples = sample_fertile_pairs(atomic, n, seed + 1, sample_spec(spec.suite_params));
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& [zeta, eta] : samples) {
    const auto d = discrepancy(zeta, eta).region();
    const auto fm = FiniteModel::window(atomic, closure(*atomic.potential, d), zeta);
    const auto table = enumerate_measure(fm);
    std::vector<std::size_t> idx;
    for (const auto& s : d) idx.push_back(fm.index_of(s));
    for (const auto& [sigma, c] : coefficient_vector(atomic, zeta, eta).entries) {
      worst = std::max(worst, std::fabs(c - conditional_probability(fm, table, fm.read(sigma), idx)));
      ++count;
    }
  }
  r.checks.push_back(within("atomic-dlr", worst, 1e-10, {{"coefficients", count}}));
}

inline void evo_factorization(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  const auto& m = spec.model;
  const auto samples = sample_fertile_pairs(m, n, seed, sample_spec(spec.suite_params));
  double worst = 0.0, square = 0.0;
  for (const auto& [a, b] : samples) {
    const auto outer = evo_coefficient_matrix(m, a, b);
    const auto direct = evo_coefficient_direct(m, a, b);
    for (std::size_t i = 0; i < outer.entries.size(); ++i)
      worst = std::max(worst, std::fabs(outer.entries[i].second - direct.entries[i].second));
    const auto sq1 = evo_product(m, PairElement::basis(a, b), PairElement::basis(a, b));
    const auto sq2 = evo_product(m, PairElement::basis(b, a), PairElement::basis(b, a));
    for (const auto& [k, v] : (sq1 - sq2).terms()) square = std::max(square, std::fabs(v));
  }
  r.checks.push_back(within("evo-factorization", worst, 1e-14));
  r.checks.push_back(within("square-symmetry", square, 1e-15));

  // Idempotents among 0/1 combinations of pair-basis elements.
  const auto s0 = m.config(m.tails.front()->id());
  const auto pool_sites = window_sites(m.lattice, 1);
  if (pool_sites.size() < 2) throw ValidationError("evo-factorization: lattice too small");
  std::vector<Configuration> configs{s0, s0.with(pool_sites[0], (s0.at(pool_sites[0]) + 1) % m.spins.q),
                                     s0.with(pool_sites[1], (s0.at(pool_sites[1]) + 1) % m.spins.q)};
  if (m.tails.size() > 1) configs.push_back(m.config(m.tails[1]->id()));
  std::vector<ConfigPair> pairs;
  for (const auto& a : configs)
    for (const auto& b : configs) pairs.emplace_back(a, b);
  std::size_t combos = 0, mismatches = 0, idempotents = 0;
  json wit = json::object();
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> visit = [&](std::size_t start) {
    if (!pick.empty()) {
      PairElement u;
      bool diagonal = true;
      for (std::size_t t : pick) {
        u.add(pairs[t], 1.0);
        diagonal = diagonal && pairs[t].first == pairs[t].second;
      }
      ++combos;
      const bool idem = is_idempotent(m, u);
      idempotents += idem;
      if (idem != diagonal) {
        ++mismatches;
        if (wit.empty()) wit = {{"element", pair_element_to_json(m, u)}, {"idempotent", idem}};
      }
    }
    if (pick.size() == 3) return;
    for (std::size_t t = start; t < pairs.size(); ++t) {
      pick.push_back(t);
      visit(t + 1);
      pick.pop_back();
    }
  };
  visit(0);
  wit["combinations"] = combos;
  wit["idempotents"] = idempotents;
  r.checks.push_back(within("idempotent-characterization", static_cast<double>(mismatches), 0.0, wit));
}

inline void em_ideal_iso(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  const auto& m = spec.model;
  const auto& sid = tail_param(m, spec.suite_params, "sigma_ref", 0);
  const auto& eid = tail_param(m, spec.suite_params, "eta_ref", 1);
  const auto sigma = m.config(sid), eta = m.config(eid);
  SampleSpec s = sample_spec(spec.suite_params);
  s.min_discrepancy = 0;
  Rng rng(seed);
  std::vector<ConfigPair> samples;
  for (std::size_t i = 0; i < n; ++i) samples.push_back(random_fertile_pair_in(m, sid, rng, s));
  const auto rep = check_iso_coefficients(m, sigma, eta, samples);
  json diag{{"pairwise_image_outside", rep.pairwise_image_outside}};
  if (rep.pairwise_witness) diag["pairwise_witness"] = *rep.pairwise_witness;
  r.checks.push_back(within("iso-coefficients", rep.offspring_mapped_onto ? rep.max_coefficient_diff : 1.0, 1e-12, diag));
  r.checks.push_back(holds("iso-discrepancy-preserved", rep.discrepancy_preserved));
  r.checks.push_back(holds("iso-round-trip", rep.round_trip_exact));
  r.checks.push_back(holds("iso-injective", rep.injective));
}

inline void counterexample(const ModelSpec& spec, std::uint64_t, std::size_t, Report& r) {
  const auto& m = spec.model;
  if (m.potential->kind() != "star_inverse_square")
    throw ValidationError("counterexample suite needs the star_inverse_square potential");
  const auto zero = constant_tail(m, 0), one = constant_tail(m, 1);
  if (!zero || !one) throw ValidationError("counterexample suite needs constant tails 0 and 1");
  const auto u = with_clusters(m, ClusterPartition::unique());
  const Site hub{0, 0, 0};

  const auto xi1 = u.config(one->id());
  const auto eta1 = xi1.with(hub, 0);
  const double c = coefficient_vector(u, xi1, eta1).at(xi1);
  const double target = 1.0 / (1.0 + std::exp(std::numbers::pi * std::numbers::pi / 6.0));
  r.checks.push_back(within("star-coefficient", std::fabs(c - target), 1e-9, {{"c", c}, {"target", target}}));

  // xi, eta in the class of zeta = 0 with supports in {0..N}.
  const auto nmax = param<std::int64_t>(spec.suite_params, "scan_max_site", 6);
  const auto zeta = u.config(zero->id());
  std::vector<Configuration> members;
  const std::size_t width = static_cast<std::size_t>(nmax + 1);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << width); ++mask) {
    std::map<Site, int> ov;
    for (std::size_t i = 0; i < width; ++i)
      if (mask >> i & 1U) ov[Site{0, static_cast<std::int64_t>(i), 0}] = 1;
    members.push_back(zeta.with(ov));
  }
  double least = 1.0;
  json wit;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      ++pairs;
      for (const auto& [sigma, v] : coefficient_vector(u, members[i], members[j]).entries)
        if (v < least) {
          least = v;
          wit = pair_witness(u, members[i], members[j]);
        }
    }
  wit["pairs"] = pairs;
  wit["min_coefficient"] = least;
  r.checks.push_back(exceeds("strict-inequality-scan", least - c, 0.0, wit));

  bool rejected = false;
  try {
    fertile_ideal_iso(u, zeta, xi1, zeta, zeta);
  } catch (const InfiniteRange&) {
    rejected = true;
  }
  r.checks.push_back(holds("iso-infinite-range-rejected", rejected));
}

inline void embed_finite(const ModelSpec& spec, std::uint64_t seed, std::size_t n, Report& r) {
  const auto& m = spec.model;
  SampleSpec s = sample_spec(spec.suite_params);
  s.window = param<std::int64_t>(spec.suite_params, "window", 2);
  Rng rng(seed);
  double worst = 0.0, worst_enlarged = 0.0;
  bool injective = true, offspring = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tail = m.tails[rng.below(m.tails.size())]->id();
    std::vector<Configuration> basis{random_configuration(m, tail, rng, s)};
    const auto k = 1 + rng.below(3);
    SampleSpec ch = s;
    ch.min_discrepancy = 1;
    ch.max_discrepancy = 2;
    while (basis.size() < k) {
      auto [a, b] = random_fertile_pair_in(m, tail, rng, ch);
      std::map<Site, int> diff;
      const auto d = discrepancy(a, b);
      for (const auto& x : d.region()) diff[x] = b.at(x);
      basis.push_back(basis.front().with(diff));
    }
    const auto xi = random_configuration(m, tail, rng, s);
    const auto plain = embed_finite_subalgebra(m, basis, std::nullopt, xi);
    const auto bigger = embed_finite_subalgebra(m, basis, closure(*m.potential, plain.lambda), xi);
    worst = std::max(worst, plain.max_diff);
    worst_enlarged = std::max(worst_enlarged, bigger.max_diff);
    injective = injective && plain.injective && bigger.injective;
    offspring = offspring && plain.offspring_match && bigger.offspring_match;
  }
  r.checks.push_back(within("embed-lambda", worst, 1e-12));
  r.checks.push_back(within("embed-enlarged", worst_enlarged, 1e-12));
  r.checks.push_back(holds("embed-injective", injective && offspring));
}

inline std::size_t default_samples(const std::string& suite) {
  static const std::map<std::string, std::size_t> d{
      {"markov", 1000},     {"nonassoc", 1},      {"decomposition", 1},      {"equiv-potentials", 500},
      {"tau-iso", 500},     {"functionals", 200}, {"tensor", 100},           {"finite-oracle", 200},
      {"evo-factorization", 1000}, {"em-ideal-iso", 50}, {"counterexample", 1}, {"embed-finite", 50}};
  return d.at(suite);
}

}  // namespace suite_detail

// samples == 0 selects the suite's default sample count.
inline Report run_suite(const ModelSpec& spec, const std::string& suite, std::uint64_t seed, std::size_t samples = 0) {
  using Fn = void (*)(const ModelSpec&, std::uint64_t, std::size_t, Report&);
  static const std::map<std::string, Fn> table{
      {"markov", suite_detail::markov},
      {"nonassoc", suite_detail::nonassoc},
      {"decomposition", suite_detail::decomposition},
      {"equiv-potentials", suite_detail::equiv_potentials},
      {"tau-iso", suite_detail::tau_iso},
      {"functionals", suite_detail::functionals},
      {"tensor", suite_detail::tensor},
      {"finite-oracle", suite_detail::finite_oracle},
      {"evo-factorization", suite_detail::evo_factorization},
      {"em-ideal-iso", suite_detail::em_ideal_iso},
      {"counterexample", suite_detail::counterexample},
      {"embed-finite", suite_detail::embed_finite},
  };
  auto it = table.find(suite);
  if (it == table.end()) throw UnknownSuite("unknown suite '" + suite + "'");
  Report r;
  r.suite = suite;
  r.seed = seed;
  r.samples = samples ? samples : suite_detail::default_samples(suite);
  const auto start = std::chrono::steady_clock::now();
  it->second(spec, seed, r.samples, r);
  r.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace gga
