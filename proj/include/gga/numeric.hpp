#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>

namespace gga {

inline constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

// log(sum(exp(x))), with the largest term factored out and the remainder fed to log1p.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  std::size_t imax = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[imax]) imax = i;
  const double m = xs[imax];
  if (!std::isfinite(m)) return m;
  double rest = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (i != imax) rest += std::exp(xs[i] - m);
  return m + std::log1p(rest);
}

// Portable generator: mt19937_64 output is fixed by the standard, the
// distributions are not, so integer and real draws are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gga
