#pragma once
// Test-side reference computations. Nothing here calls into the library's
// coefficient, measure or potential code.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

// sum_{n>=1} 1/n^2: direct sum below N plus the Euler-Maclaurin tail.
inline long double zeta2() {
  constexpr int N = 2000;
  long double s = 0.0L;
  for (int n = N - 1; n >= 1; --n) s += 1.0L / (static_cast<long double>(n) * n);
  const long double x = N;
  s += 1.0L / x + 1.0L / (2 * x * x) + 1.0L / (6 * x * x * x) - 1.0L / (30 * x * x * x * x * x);
  return s;
}

inline double star_constant() { return static_cast<double>(1.0L / (1.0L + std::exp(zeta2()))); }

// Open Ising chain, spins in {-1,+1}: H = -beta * sum s_i s_{i+1}.
inline double chain_energy(const std::vector<int>& s, double beta) {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) h -= beta * s[i] * s[i + 1];
  return h;
}

// log Z of the open chain by the 2x2 transfer matrix.
inline double chain_log_partition(std::size_t n, double beta) {
  const double a = std::exp(beta), b = std::exp(-beta);
  std::array<long double, 2> v{1.0L, 1.0L};
  for (std::size_t i = 1; i < n; ++i) v = {a * v[0] + b * v[1], b * v[0] + a * v[1]};
  return static_cast<double>(std::log(v[0] + v[1]));
}

inline std::vector<int> decode_spins(std::uint64_t code, std::size_t n) {
  std::vector<int> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (code >> i & 1U) ? 1 : -1;
  return s;
}

// Brute-force genetic coefficients on an open Ising chain: mu(sigma) / mu(offspring).
// cluster[i] labels the cluster of site i; offspring are zeta with eta pasted on
// any subset of the clusters where they differ.
inline std::map<std::vector<int>, double> chain_coefficients(const std::vector<int>& zeta, const std::vector<int>& eta,
                                                             const std::vector<int>& cluster, double beta) {
  std::set<int> differing;
  for (std::size_t i = 0; i < zeta.size(); ++i)
    if (zeta[i] != eta[i]) differing.insert(cluster[i]);
  const std::vector<int> groups(differing.begin(), differing.end());
  std::vector<std::vector<int>> offs;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << groups.size()); ++mask) {
    auto s = zeta;
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (mask >> g & 1U)
        for (std::size_t i = 0; i < s.size(); ++i)
          if (cluster[i] == groups[g]) s[i] = eta[i];
    offs.push_back(s);
  }
  long double z = 0.0L;
  for (const auto& s : offs) z += std::exp(static_cast<long double>(-chain_energy(s, beta)));
  std::map<std::vector<int>, double> out;
  for (const auto& s : offs) out[s] = static_cast<double>(std::exp(static_cast<long double>(-chain_energy(s, beta))) / z);
  return out;
}

// Two-point Ising contribution of the bonds touching a set of sites on Z,
// for configurations given as finitely many -1 sites on the all-+1 background.
inline double z_ising_local_energy(const std::set<long>& minus, const std::set<long>& region, double beta) {
  auto v = [&](long x) { return minus.count(x) ? -1 : 1; };
  std::set<std::pair<long, long>> bonds;
  for (long x : region) {
    bonds.insert({x - 1, x});
    bonds.insert({x, x + 1});
  }
  double h = 0.0;
  for (const auto& [a, b] : bonds) h -= beta * v(a) * v(b);
  return h;
}

}  // namespace oracle
