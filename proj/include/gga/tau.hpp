#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "gga/lattice.hpp"

namespace gga {

// A spatial bijection of the lattice combined with site-indexed spin bijections:
// (tau sigma)(x) = tau_x(sigma(tau_*^{-1} x)).
class TauTransform {
 public:
  enum class Spatial { Identity, Translation, Reflection, Permutation };

  static TauTransform identity() { return TauTransform(); }

  static TauTransform translation(std::int64_t dx, std::int64_t dy = 0) {
    TauTransform t;
    t.spatial_ = Spatial::Translation;
    t.dx_ = dx;
    t.dy_ = dy;
    return t;
  }

  // x -> a - x along the first axis.
  static TauTransform reflection(std::int64_t a) {
    TauTransform t;
    t.spatial_ = Spatial::Reflection;
    t.a_ = a;
    return t;
  }

  static TauTransform permutation(const std::map<Site, Site>& mapping) {
    TauTransform t;
    t.spatial_ = Spatial::Permutation;
    for (const auto& [from, to] : mapping) {
      if (from == to) continue;
      t.fwd_[from] = to;
      if (!t.bwd_.emplace(to, from).second)
        throw IncompatibleTransform("permutation maps two sites to " + to_string(to));
    }
    for (const auto& [from, to] : t.fwd_)
      if (!t.bwd_.count(from))
        throw IncompatibleTransform("permutation is not a bijection of its support");
    return t;
  }

  TauTransform with_spin_map(std::vector<int> perm) const {
    return with_spin_family(1, 1, {std::move(perm)});
  }

  // Spin bijection at site (x,y) is maps[(y mod py)*px + (x mod px)].
  TauTransform with_spin_family(std::int64_t px, std::int64_t py,
                                std::vector<std::vector<int>> maps) const {
    if (px < 1 || py < 1 || static_cast<std::int64_t>(maps.size()) != px * py)
      throw IncompatibleTransform("spin family size does not match its period");
    TauTransform t = *this;
    t.spx_ = px;
    t.spy_ = py;
    t.spin_ = std::move(maps);
    t.spin_inv_.clear();
    for (const auto& m : t.spin_) {
      std::vector<int> inv(m.size(), -1);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] < 0 || static_cast<std::size_t>(m[i]) >= m.size() ||
            inv[static_cast<std::size_t>(m[i])] != -1)
          throw IncompatibleTransform("spin map is not a bijection");
        inv[static_cast<std::size_t>(m[i])] = static_cast<int>(i);
      }
      t.spin_inv_.push_back(std::move(inv));
    }
    if (t.spatial_ == Spatial::Permutation && t.spin_.size() > 1)
      throw IncompatibleTransform("finite permutations take a single spin map");
    return t;
  }

  Spatial spatial() const { return spatial_; }
  Region moved_sites() const {
    Region r;
    for (const auto& [from, to] : fwd_) r.insert(from);
    return r;
  }
  bool has_spin_maps() const { return !spin_.empty(); }
  std::int64_t spin_period_x() const { return spx_; }
  std::int64_t spin_period_y() const { return spy_; }

  Site forward(const Site& s) const {
    switch (spatial_) {
      case Spatial::Identity: return s;
      case Spatial::Translation: return {s.part, s.x + dx_, s.y + dy_};
      case Spatial::Reflection: return {s.part, a_ - s.x, s.y};
      case Spatial::Permutation: {
        auto it = fwd_.find(s);
        return it == fwd_.end() ? s : it->second;
      }
    }
    return s;
  }

  Site backward(const Site& s) const {
    switch (spatial_) {
      case Spatial::Identity: return s;
      case Spatial::Translation: return {s.part, s.x - dx_, s.y - dy_};
      case Spatial::Reflection: return {s.part, a_ - s.x, s.y};
      case Spatial::Permutation: {
        auto it = bwd_.find(s);
        return it == bwd_.end() ? s : it->second;
      }
    }
    return s;
  }

  int spin(const Site& x, int label) const {
    return spin_.empty() ? label : spin_[family_index(x)][static_cast<std::size_t>(label)];
  }
  int spin_inverse(const Site& x, int label) const {
    return spin_.empty() ? label : spin_inv_[family_index(x)][static_cast<std::size_t>(label)];
  }

  // rho with rho(tau sigma) = sigma; rho_y = tau_{tau_* y}^{-1}.
  TauTransform inverse() const {
    TauTransform t;
    t.spatial_ = spatial_;
    t.dx_ = -dx_;
    t.dy_ = -dy_;
    t.a_ = a_;
    t.fwd_ = bwd_;
    t.bwd_ = fwd_;
    if (spin_.empty()) return t;
    std::vector<std::vector<int>> maps;
    for (std::int64_t ry = 0; ry < spy_; ++ry)
      for (std::int64_t rx = 0; rx < spx_; ++rx) {
        const Site image = spatial_ == Spatial::Permutation ? Site{0, rx, ry} : forward({0, rx, ry});
        maps.push_back(spin_inv_[family_index(image)]);
      }
    return t.with_spin_family(spx_, spy_, std::move(maps));
  }

  void check_compatible(const Lattice& lattice, int q) const {
    for (const auto& m : spin_)
      if (static_cast<int>(m.size()) != q)
        throw IncompatibleTransform("spin map size " + std::to_string(m.size()) +
                                    " does not match q=" + std::to_string(q));
    for (const auto& p : lattice.parts()) {
      switch (spatial_) {
        case Spatial::Identity:
        case Spatial::Permutation: break;
        case Spatial::Translation:
          if ((dx_ != 0 || dy_ != 0) && !(p.kind == PartKind::Square ||
                                          (p.kind == PartKind::Integers && dy_ == 0)))
            throw IncompatibleTransform("translation is not a bijection of this lattice");
          break;
        case Spatial::Reflection:
          if (p.kind == PartKind::Naturals ||
              (p.kind == PartKind::Box && a_ != p.width - 1))
            throw IncompatibleTransform("reflection is not a bijection of this lattice");
          break;
      }
    }
    for (const auto& [from, to] : fwd_)
      if (!lattice.contains(from) || !lattice.contains(to))
        throw IncompatibleTransform("permutation moves a site outside the lattice");
  }

 private:
  std::size_t family_index(const Site& x) const {
    return static_cast<std::size_t>(floor_mod(x.y, spy_) * spx_ + floor_mod(x.x, spx_));
  }

  Spatial spatial_ = Spatial::Identity;
  std::int64_t dx_ = 0, dy_ = 0, a_ = 0;
  std::map<Site, Site> fwd_, bwd_;
  std::int64_t spx_ = 1, spy_ = 1;
  std::vector<std::vector<int>> spin_, spin_inv_;
};

inline Region push_region(const TauTransform& tau, const Region& r) {
  Region out;
  for (const auto& s : r) out.insert(tau.forward(s));
  return out;
}

inline Region pull_region(const TauTransform& tau, const Region& r) {
  Region out;
  for (const auto& s : r) out.insert(tau.backward(s));
  return out;
}

inline Configuration apply_tau(const Lattice& lattice, const TauTransform& tau,
                               const Configuration& sigma) {
  const bool permuting = tau.spatial() == TauTransform::Spatial::Permutation;
  std::vector<PeriodicTable> parts;
  for (int i = 0; i < sigma.tail().part_count(); ++i) {
    const auto& lp = lattice.part(i);
    if (lp.is_finite()) {
      parts.push_back(PeriodicTable{});
      continue;
    }
    const auto& src = sigma.tail().parts()[static_cast<std::size_t>(i)];
    const std::int64_t px = std::lcm(src.px, tau.spin_period_x());
    const std::int64_t py = lp.dimension() == 1 ? 1 : std::lcm(src.py, tau.spin_period_y());
    PeriodicTable t{px, py, {}};
    for (std::int64_t y = 0; y < py; ++y)
      for (std::int64_t x = 0; x < px; ++x) {
        const Site here{i, x, y};
        const Site from = permuting ? here : tau.backward(here);
        t.table.push_back(tau.spin(here, src.at(from.x, from.y)));
      }
    parts.push_back(std::move(t));
  }
  auto tail = std::make_shared<const TailPattern>("tau(" + sigma.tail().id() + ")", std::move(parts));

  Region keys;
  for (const auto& [s, v] : sigma.overrides()) keys.insert(tau.forward(s));
  if (permuting) {
    for (const auto& [s, v] : sigma.overrides()) keys.insert(s);
    const auto moved = tau.moved_sites();
    keys.insert(moved.begin(), moved.end());
  }
  for (const auto& s : lattice.finite_sites()) keys.insert(s);
  std::map<Site, int> raw;
  for (const auto& k : keys) raw[k] = tau.spin(k, sigma.at(tau.backward(k)));
  return canonicalize(lattice, tail, raw);
}

}  // namespace gga
