#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gga/error.hpp"

namespace gga {

// A site of a (possibly multi-part) lattice. Single-part lattices use part 0;
// one-dimensional parts use y = 0.
struct Site {
  int part = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const Site&, const Site&) = default;
};

inline std::string to_string(const Site& s) {
  std::ostringstream os;
  os << '(';
  if (s.part != 0) os << s.part << ':';
  os << s.x;
  if (s.y != 0) os << ',' << s.y;
  os << ')';
  return os.str();
}

using Region = std::set<Site>;

inline Region region_union(const Region& a, const Region& b) {
  Region out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline Region region_intersection(const Region& a, const Region& b) {
  Region out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline Region region_difference(const Region& a, const Region& b) {
  Region out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline Region region_symmetric_difference(const Region& a, const Region& b) {
  Region out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::inserter(out, out.end()));
  return out;
}

enum class PartKind { Integers, Square, Naturals, Box };

struct LatticePart {
  PartKind kind = PartKind::Integers;
  std::int64_t width = 0;
  std::int64_t height = 1;

  bool is_finite() const { return kind == PartKind::Box; }
  int dimension() const {
    return kind == PartKind::Square || (kind == PartKind::Box && height > 1) ? 2 : 1;
  }
  bool contains(std::int64_t x, std::int64_t y) const {
    switch (kind) {
      case PartKind::Integers: return y == 0;
      case PartKind::Square: return true;
      case PartKind::Naturals: return x >= 0 && y == 0;
      case PartKind::Box: return x >= 0 && x < width && y >= 0 && y < height;
    }
    return false;
  }

  friend bool operator==(const LatticePart&, const LatticePart&) = default;
};

class Lattice {
 public:
  Lattice() : parts_{LatticePart{}} {}
  explicit Lattice(std::vector<LatticePart> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw ValidationError("lattice needs at least one part");
    for (const auto& p : parts_)
      if (p.kind == PartKind::Box && (p.width < 1 || p.height < 1))
        throw ValidationError("finite lattice dimensions must be positive");
  }

  static Lattice integers() { return Lattice({LatticePart{PartKind::Integers}}); }
  static Lattice square() { return Lattice({LatticePart{PartKind::Square}}); }
  static Lattice naturals() { return Lattice({LatticePart{PartKind::Naturals}}); }
  static Lattice box(std::int64_t width, std::int64_t height = 1) {
    return Lattice({LatticePart{PartKind::Box, width, height}});
  }

  static Lattice disjoint_union(const std::vector<Lattice>& factors) {
    std::vector<LatticePart> parts;
    for (const auto& f : factors) parts.insert(parts.end(), f.parts_.begin(), f.parts_.end());
    return Lattice(std::move(parts));
  }

  int part_count() const { return static_cast<int>(parts_.size()); }
  const LatticePart& part(int i) const { return parts_.at(static_cast<std::size_t>(i)); }
  const std::vector<LatticePart>& parts() const { return parts_; }

  bool contains(const Site& s) const {
    return s.part >= 0 && s.part < part_count() && part(s.part).contains(s.x, s.y);
  }

  bool is_finite() const {
    return std::all_of(parts_.begin(), parts_.end(), [](const auto& p) { return p.is_finite(); });
  }

  // All sites of the finite parts, in site order.
  std::vector<Site> finite_sites() const {
    std::vector<Site> out;
    for (int i = 0; i < part_count(); ++i) {
      const auto& p = part(i);
      if (!p.is_finite()) continue;
      for (std::int64_t x = 0; x < p.width; ++x)
        for (std::int64_t y = 0; y < p.height; ++y) out.push_back({i, x, y});
    }
    return out;
  }

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::vector<LatticePart> parts_;
};

struct SpinSet {
  int q = 2;
  std::vector<double> values;

  static SpinSet labels(int q) { return SpinSet{q, {}}; }
  static SpinSet ising() { return SpinSet{2, {-1.0, 1.0}}; }

  double value(int label) const {
    return values.empty() ? static_cast<double>(label) : values[static_cast<std::size_t>(label)];
  }

  void validate() const {
    if (q < 2) throw ValidationError("spins.q: q >= 2 required, got " + std::to_string(q));
    if (!values.empty()) {
      if (static_cast<int>(values.size()) != q)
        throw ValidationError("spins.values: expected " + std::to_string(q) + " values");
      auto sorted = values;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("spins.values: values must be distinct");
    }
  }

  friend bool operator==(const SpinSet&, const SpinSet&) = default;
};

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t m) {
  return (a - floor_mod(a, m)) / m;
}

// One part of a tail: a table over the fundamental domain [0,px) x [0,py),
// row-major (index = y*px + x).
struct PeriodicTable {
  std::int64_t px = 1;
  std::int64_t py = 1;
  std::vector<int> table{0};

  static PeriodicTable constant(int label) { return PeriodicTable{1, 1, {label}}; }
  static PeriodicTable row(std::vector<int> labels) {
    const auto n = static_cast<std::int64_t>(labels.size());
    return PeriodicTable{n, 1, std::move(labels)};
  }

  int at(std::int64_t x, std::int64_t y) const {
    return table[static_cast<std::size_t>(floor_mod(y, py) * px + floor_mod(x, px))];
  }

  // Same function with the smallest period along each axis.
  PeriodicTable minimal() const {
    auto smallest = [&](std::int64_t period, auto agrees) {
      for (std::int64_t d = 1; d < period; ++d)
        if (period % d == 0 && agrees(d)) return d;
      return period;
    };
    const std::int64_t nx = smallest(px, [&](std::int64_t d) {
      for (std::int64_t y = 0; y < py; ++y)
        for (std::int64_t x = 0; x < px; ++x)
          if (at(x, y) != at(x % d, y)) return false;
      return true;
    });
    const std::int64_t ny = smallest(py, [&](std::int64_t d) {
      for (std::int64_t y = 0; y < py; ++y)
        for (std::int64_t x = 0; x < px; ++x)
          if (at(x, y) != at(x, y % d)) return false;
      return true;
    });
    PeriodicTable out{nx, ny, {}};
    out.table.reserve(static_cast<std::size_t>(nx * ny));
    for (std::int64_t y = 0; y < ny; ++y)
      for (std::int64_t x = 0; x < nx; ++x) out.table.push_back(at(x, y));
    return out;
  }

  friend auto operator<=>(const PeriodicTable&, const PeriodicTable&) = default;
};

// Periodic reference configuration. Tables are stored in minimal-period form,
// so two tails describe the same function iff their tables compare equal.
class TailPattern {
 public:
  TailPattern(std::string id, std::vector<PeriodicTable> parts) : id_(std::move(id)) {
    if (parts.empty()) throw ValidationError("tail '" + id_ + "': no parts");
    for (auto& p : parts) {
      if (p.px < 1 || p.py < 1 || static_cast<std::int64_t>(p.table.size()) != p.px * p.py)
        throw ValidationError("tail '" + id_ + "': table size does not match period");
      parts_.push_back(p.minimal());
    }
  }

  static std::shared_ptr<const TailPattern> constant(std::string id, int label, int parts = 1) {
    return std::make_shared<const TailPattern>(
        std::move(id), std::vector<PeriodicTable>(static_cast<std::size_t>(parts),
                                                  PeriodicTable::constant(label)));
  }
  static std::shared_ptr<const TailPattern> row(std::string id, std::vector<int> labels) {
    return std::make_shared<const TailPattern>(
        std::move(id), std::vector<PeriodicTable>{PeriodicTable::row(std::move(labels))});
  }

  const std::string& id() const { return id_; }
  const std::vector<PeriodicTable>& parts() const { return parts_; }
  int part_count() const { return static_cast<int>(parts_.size()); }

  int at(const Site& s) const { return parts_.at(static_cast<std::size_t>(s.part)).at(s.x, s.y); }

  bool is_constant() const {
    return std::all_of(parts_.begin(), parts_.end(),
                       [&](const auto& p) { return p.table.size() == 1; });
  }

  // Finite parts carry no tail information; their values live in overrides.
  std::shared_ptr<const TailPattern> adapted(const Lattice& lattice) const {
    bool changed = false;
    auto parts = parts_;
    for (int i = 0; i < lattice.part_count() && i < part_count(); ++i) {
      if (lattice.part(i).is_finite() && parts[static_cast<std::size_t>(i)] != PeriodicTable{}) {
        parts[static_cast<std::size_t>(i)] = PeriodicTable{};
        changed = true;
      }
    }
    if (!changed) return std::make_shared<const TailPattern>(*this);
    return std::make_shared<const TailPattern>(id_, std::move(parts));
  }

 private:
  std::string id_;
  std::vector<PeriodicTable> parts_;
};

using TailPtr = std::shared_ptr<const TailPattern>;

inline bool same_function(const TailPattern& a, const TailPattern& b) {
  return a.parts() == b.parts();
}

// Tail + finite overrides. Always canonical: no override equals the tail value.
class Configuration {
 public:
  int at(const Site& s) const {
    auto it = overrides_.find(s);
    return it != overrides_.end() ? it->second : tail_->at(s);
  }

  const TailPattern& tail() const { return *tail_; }
  const TailPtr& tail_ptr() const { return tail_; }
  const std::map<Site, int>& overrides() const { return overrides_; }

  Configuration with(const std::map<Site, int>& changes) const {
    Configuration out = *this;
    for (const auto& [s, v] : changes) {
      if (tail_->at(s) == v)
        out.overrides_.erase(s);
      else
        out.overrides_[s] = v;
    }
    return out;
  }

  Configuration with(const Site& s, int v) const { return with(std::map<Site, int>{{s, v}}); }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.overrides_ == b.overrides_ &&
           (a.tail_ == b.tail_ || same_function(*a.tail_, *b.tail_));
  }

  friend std::strong_ordering operator<=>(const Configuration& a, const Configuration& b) {
    if (a.tail_ != b.tail_) {
      if (auto c = a.tail_->parts() <=> b.tail_->parts(); c != 0) return c;
    }
    return a.overrides_ <=> b.overrides_;
  }

  // Trusted constructor: callers guarantee canonical form.
  static Configuration from_canonical(TailPtr tail, std::map<Site, int> overrides) {
    return Configuration(std::move(tail), std::move(overrides));
  }

 private:
  Configuration(TailPtr tail, std::map<Site, int> overrides)
      : tail_(std::move(tail)), overrides_(std::move(overrides)) {}

  TailPtr tail_;
  std::map<Site, int> overrides_;
};

inline Configuration canonicalize(TailPtr tail, const std::map<Site, int>& raw) {
  std::map<Site, int> kept;
  for (const auto& [s, v] : raw)
    if (tail->at(s) != v) kept.emplace(s, v);
  return Configuration::from_canonical(std::move(tail), std::move(kept));
}

// Lattice-aware form: finite parts are folded into overrides over a constant-0 tail.
inline Configuration canonicalize(const Lattice& lattice, const TailPtr& tail,
                                  const std::map<Site, int>& raw) {
  bool has_finite = false;
  for (const auto& p : lattice.parts()) has_finite = has_finite || p.is_finite();
  if (!has_finite) return canonicalize(tail, raw);
  auto adapted = tail->adapted(lattice);
  std::map<Site, int> full;
  for (const auto& s : lattice.finite_sites()) {
    auto it = raw.find(s);
    full[s] = it != raw.end() ? it->second : tail->at(s);
  }
  for (const auto& [s, v] : raw)
    if (!lattice.part(s.part).is_finite()) full[s] = v;
  return canonicalize(std::move(adapted), full);
}

inline std::string to_string(const Configuration& c) {
  std::ostringstream os;
  os << c.tail().id() << '{';
  bool first = true;
  for (const auto& [s, v] : c.overrides()) {
    if (!first) os << ' ';
    first = false;
    os << to_string(s) << '=' << v;
  }
  os << '}';
  return os.str();
}

class DiscrepancyResult {
 public:
  static DiscrepancyResult finite(Region r) { return DiscrepancyResult(true, std::move(r)); }
  static DiscrepancyResult macroscopic() { return DiscrepancyResult(false, {}); }

  bool is_finite() const { return finite_; }
  bool is_macroscopic() const { return !finite_; }

  const Region& region() const& {
    if (!finite_) throw NotFertile("discrepancy is macroscopic");
    return region_;
  }
  // by value on temporaries, so range-for over discrepancy(a, b).region() is safe
  Region region() && {
    if (!finite_) throw NotFertile("discrepancy is macroscopic");
    return std::move(region_);
  }

  friend bool operator==(const DiscrepancyResult&, const DiscrepancyResult&) = default;

 private:
  DiscrepancyResult(bool finite, Region r) : finite_(finite), region_(std::move(r)) {}
  bool finite_;
  Region region_;
};

inline DiscrepancyResult tails_agree_cofinitely(const TailPattern& t1, const TailPattern& t2) {
  if (t1.part_count() != t2.part_count()) return DiscrepancyResult::macroscopic();
  for (int i = 0; i < t1.part_count(); ++i) {
    const auto& a = t1.parts()[static_cast<std::size_t>(i)];
    const auto& b = t2.parts()[static_cast<std::size_t>(i)];
    const std::int64_t lx = std::lcm(a.px, b.px);
    const std::int64_t ly = std::lcm(a.py, b.py);
    for (std::int64_t y = 0; y < ly; ++y)
      for (std::int64_t x = 0; x < lx; ++x)
        if (a.at(x, y) != b.at(x, y)) return DiscrepancyResult::macroscopic();
  }
  return DiscrepancyResult::finite({});
}

inline DiscrepancyResult discrepancy(const Configuration& sigma, const Configuration& eta) {
  if (sigma.tail_ptr() != eta.tail_ptr() &&
      tails_agree_cofinitely(sigma.tail(), eta.tail()).is_macroscopic())
    return DiscrepancyResult::macroscopic();
  Region r;
  for (const auto& [s, v] : sigma.overrides())
    if (eta.at(s) != v) r.insert(s);
  for (const auto& [s, v] : eta.overrides())
    if (sigma.at(s) != v) r.insert(s);
  return DiscrepancyResult::finite(std::move(r));
}

}  // namespace gga

template <>
struct std::hash<gga::Site> {
  std::size_t operator()(const gga::Site& s) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(s.x);
    h ^= std::hash<std::int64_t>{}(s.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<int>{}(s.part) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};
