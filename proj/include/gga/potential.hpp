#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gga/lattice.hpp"
#include "gga/numeric.hpp"
#include "gga/tau.hpp"

namespace gga {

// Phi_A: support A (sorted) and its value as a function of the labels on A.
struct InteractionTerm {
  std::vector<Site> support;
  std::function<double(std::span<const int>)> energy;

  double operator()(const Configuration& sigma) const {
    std::vector<int> labels;
    labels.reserve(support.size());
    for (const auto& s : support) labels.push_back(sigma.at(s));
    return energy(labels);
  }
};

class Potential;
using PotentialPtr = std::shared_ptr<const Potential>;

class Potential {
 public:
  Potential(Lattice lattice, SpinSet spins) : lattice_(std::move(lattice)), spins_(std::move(spins)) {}
  virtual ~Potential() = default;

  virtual std::string kind() const = 0;
  virtual bool finite_range() const { return true; }

  // Terms whose support meets lam, one per support. Throws InfiniteRange if
  // that set is infinite.
  virtual std::vector<InteractionTerm> terms_touching(const Region& lam) const = 0;

  virtual double hamiltonian(const Region& lam, const Configuration& sigma) const {
    double h = 0.0;
    for (const auto& t : terms_touching(lam)) h += t(sigma);
    return h;
  }

  // Sites sharing a non-vanishing term with x; nullopt when that set is infinite.
  virtual std::optional<Region> neighborhood(const Site& x) const {
    Region out;
    for (const auto& t : terms_touching({x})) {
      if (vanishes(t)) continue;
      for (const auto& s : t.support)
        if (s != x) out.insert(s);
    }
    return out;
  }

  bool vanishes(const InteractionTerm& t) const {
    const std::size_t k = t.support.size();
    std::vector<int> labels(k, 0);
    while (true) {
      if (t.energy(labels) != 0.0) return false;
      std::size_t i = 0;
      while (i < k && ++labels[i] == spins_.q) labels[i++] = 0;
      if (i == k) return true;
    }
  }

  const Lattice& lattice() const { return lattice_; }
  const SpinSet& spins() const { return spins_; }

 protected:
  // Groups contributions by support and sums those that share one.
  static std::vector<InteractionTerm> merge(std::vector<InteractionTerm> terms) {
    std::map<std::vector<Site>, std::vector<std::function<double(std::span<const int>)>>> by;
    for (auto& t : terms) by[t.support].push_back(std::move(t.energy));
    std::vector<InteractionTerm> out;
    out.reserve(by.size());
    for (auto& [support, fns] : by) {
      if (fns.size() == 1) {
        out.push_back({support, std::move(fns.front())});
      } else {
        out.push_back({support, [fns = std::move(fns)](std::span<const int> l) {
                         double e = 0.0;
                         for (const auto& f : fns) e += f(l);
                         return e;
                       }});
      }
    }
    return out;
  }

 private:
  Lattice lattice_;
  SpinSet spins_;
};

class ZeroPotential final : public Potential {
 public:
  using Potential::Potential;
  std::string kind() const override { return "zero"; }
  std::vector<InteractionTerm> terms_touching(const Region&) const override { return {}; }
  double hamiltonian(const Region&, const Configuration&) const override { return 0.0; }
};

struct PairOffset {
  std::int64_t dx = 1;
  std::int64_t dy = 0;
  std::vector<double> table;  // q*q, indexed [label(x) * q + label(x + offset)]
};

// Bonds {x, x+o} inside one lattice part.
class PairPotential final : public Potential {
 public:
  PairPotential(Lattice lattice, SpinSet spins, std::string kind, std::vector<PairOffset> offsets)
      : Potential(std::move(lattice), std::move(spins)), kind_(std::move(kind)) {
    const int q = this->spins().q;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<double>> merged;
    for (auto& o : offsets) {
      if (static_cast<int>(o.table.size()) != q * q)
        throw ValidationError("pair table must have q*q entries");
      if (o.dx == 0 && o.dy == 0) throw ValidationError("pair offset must be nonzero");
      std::vector<double> t = o.table;
      if (o.dx < 0 || (o.dx == 0 && o.dy < 0)) {
        o.dx = -o.dx;
        o.dy = -o.dy;
        for (int a = 0; a < q; ++a)
          for (int b = 0; b < q; ++b) t[static_cast<std::size_t>(a * q + b)] = o.table[static_cast<std::size_t>(b * q + a)];
      }
      auto& slot = merged[{o.dx, o.dy}];
      if (slot.empty()) slot.assign(t.size(), 0.0);
      for (std::size_t i = 0; i < t.size(); ++i) slot[i] += t[i];
    }
    for (auto& [off, t] : merged) {
      bool zero = true;
      for (double v : t) zero = zero && v == 0.0;
      if (!zero) offsets_.push_back({off.first, off.second, std::move(t)});
    }
  }

  std::string kind() const override { return kind_; }

  std::vector<InteractionTerm> terms_touching(const Region& lam) const override {
    std::set<std::pair<Site, std::size_t>> bonds;
    for (const auto& s : lam) {
      for (std::size_t k = 0; k < offsets_.size(); ++k) {
        const auto& o = offsets_[k];
        const Site up{s.part, s.x + o.dx, s.y + o.dy};
        const Site down{s.part, s.x - o.dx, s.y - o.dy};
        if (lattice().contains(up)) bonds.insert({s, k});
        if (lattice().contains(down)) bonds.insert({down, k});
      }
    }
    const int q = spins().q;
    std::vector<InteractionTerm> out;
    out.reserve(bonds.size());
    for (const auto& [s, k] : bonds) {
      const auto& o = offsets_[k];
      out.push_back({{s, Site{s.part, s.x + o.dx, s.y + o.dy}},
                     [table = o.table, q](std::span<const int> l) {
                       return table[static_cast<std::size_t>(l[0] * q + l[1])];
                     }});
    }
    return out;
  }

  double hamiltonian(const Region& lam, const Configuration& sigma) const override {
    // Same bond set as terms_touching, without materializing closures.
    std::set<std::pair<Site, std::size_t>> bonds;
    for (const auto& s : lam) {
      for (std::size_t k = 0; k < offsets_.size(); ++k) {
        const auto& o = offsets_[k];
        const Site up{s.part, s.x + o.dx, s.y + o.dy};
        const Site down{s.part, s.x - o.dx, s.y - o.dy};
        if (lattice().contains(up)) bonds.insert({s, k});
        if (lattice().contains(down)) bonds.insert({down, k});
      }
    }
    const int q = spins().q;
    double h = 0.0;
    for (const auto& [s, k] : bonds) {
      const auto& o = offsets_[k];
      h += o.table[static_cast<std::size_t>(sigma.at(s) * q + sigma.at({s.part, s.x + o.dx, s.y + o.dy}))];
    }
    return h;
  }

  const std::vector<PairOffset>& offsets() const { return offsets_; }

 private:
  std::string kind_;
  std::vector<PairOffset> offsets_;
};

inline std::vector<std::pair<std::int64_t, std::int64_t>> nearest_neighbor_offsets(const Lattice& lattice) {
  if (lattice.part(0).dimension() == 2) return {{1, 0}, {0, 1}};
  return {{1, 0}};
}

inline PotentialPtr zero_potential(Lattice lattice, SpinSet spins) {
  return std::make_shared<const ZeroPotential>(std::move(lattice), std::move(spins));
}

// Phi_{x,y}(sigma) = -beta * v(sigma(x)) * v(sigma(y)) over nearest neighbours.
inline PotentialPtr ising_pair(Lattice lattice, SpinSet spins, double beta) {
  std::vector<PairOffset> offs;
  for (auto [dx, dy] : nearest_neighbor_offsets(lattice)) {
    PairOffset o{dx, dy, {}};
    for (int a = 0; a < spins.q; ++a)
      for (int b = 0; b < spins.q; ++b) o.table.push_back(-beta * spins.value(a) * spins.value(b));
    offs.push_back(std::move(o));
  }
  return std::make_shared<const PairPotential>(std::move(lattice), std::move(spins), "ising_pair",
                                               std::move(offs));
}

// Phi_{x,y}(sigma) = -beta * [sigma(x) == sigma(y)] over nearest neighbours.
inline PotentialPtr potts_pair(Lattice lattice, SpinSet spins, double beta) {
  std::vector<PairOffset> offs;
  for (auto [dx, dy] : nearest_neighbor_offsets(lattice)) {
    PairOffset o{dx, dy, {}};
    for (int a = 0; a < spins.q; ++a)
      for (int b = 0; b < spins.q; ++b) o.table.push_back(a == b ? -beta : 0.0);
    offs.push_back(std::move(o));
  }
  return std::make_shared<const PairPotential>(std::move(lattice), std::move(spins), "potts_pair",
                                               std::move(offs));
}

inline PotentialPtr custom_pair(Lattice lattice, SpinSet spins, std::vector<PairOffset> offsets) {
  return std::make_shared<const PairPotential>(std::move(lattice), std::move(spins), "custom_pair",
                                               std::move(offsets));
}

struct FiniteTermSpec {
  std::vector<Site> sites;
  std::vector<double> table;  // q^k entries, first site most significant
};

// Explicit finite family of terms.
class FiniteTermsPotential final : public Potential {
 public:
  FiniteTermsPotential(Lattice lattice, SpinSet spins, std::vector<FiniteTermSpec> specs)
      : Potential(std::move(lattice), std::move(spins)) {
    const int q = this->spins().q;
    for (auto& spec : specs) {
      if (spec.sites.empty()) throw ValidationError("finite term with empty support");
      std::size_t n = 1;
      for (std::size_t i = 0; i < spec.sites.size(); ++i) n *= static_cast<std::size_t>(q);
      if (spec.table.size() != n)
        throw ValidationError("finite term table must have q^|support| entries");
      for (const auto& s : spec.sites)
        if (!this->lattice().contains(s)) throw ValidationError("finite term site outside lattice: " + to_string(s));
      Entry e;
      e.sorted = spec.sites;
      std::sort(e.sorted.begin(), e.sorted.end());
      if (std::adjacent_find(e.sorted.begin(), e.sorted.end()) != e.sorted.end())
        throw ValidationError("finite term support has repeated sites");
      for (const auto& s : spec.sites)
        e.position.push_back(static_cast<std::size_t>(
            std::lower_bound(e.sorted.begin(), e.sorted.end(), s) - e.sorted.begin()));
      e.table = std::move(spec.table);
      const std::size_t idx = entries_.size();
      for (const auto& s : e.sorted) by_site_[s].push_back(idx);
      entries_.push_back(std::make_shared<const Entry>(std::move(e)));
    }
  }

  std::string kind() const override { return "finite_terms"; }

  std::vector<InteractionTerm> terms_touching(const Region& lam) const override {
    std::set<std::size_t> hit;
    for (const auto& s : lam) {
      auto it = by_site_.find(s);
      if (it != by_site_.end()) hit.insert(it->second.begin(), it->second.end());
    }
    std::vector<InteractionTerm> out;
    const int q = spins().q;
    for (std::size_t i : hit) {
      std::shared_ptr<const Entry> e = entries_[i];
      out.push_back({e->sorted, [e, q](std::span<const int> l) {
                       std::size_t idx = 0;
                       for (std::size_t p : e->position) idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(l[p]);
                       return e->table[idx];
                     }});
    }
    return merge(std::move(out));
  }

 private:
  struct Entry {
    std::vector<Site> sorted;
    std::vector<std::size_t> position;  // original order -> index into sorted
    std::vector<double> table;
  };
  std::vector<std::shared_ptr<const Entry>> entries_;
  std::map<Site, std::vector<std::size_t>> by_site_;
};

inline PotentialPtr finite_terms(Lattice lattice, SpinSet spins, std::vector<FiniteTermSpec> specs) {
  return std::make_shared<const FiniteTermsPotential>(std::move(lattice), std::move(spins),
                                                      std::move(specs));
}

// Phi_{0,n}(sigma) = scale * v(sigma(0)) * v(sigma(n)) / n^2 on N0: an infinite
// star around the hub 0.
class StarInverseSquare final : public Potential {
 public:
  StarInverseSquare(SpinSet spins, double scale)
      : Potential(Lattice::naturals(), std::move(spins)), scale_(scale) {}

  std::string kind() const override { return "star_inverse_square"; }
  bool finite_range() const override { return false; }
  double scale() const { return scale_; }

  std::vector<InteractionTerm> terms_touching(const Region& lam) const override {
    if (lam.count(Site{0, 0, 0}))
      throw InfiniteRange("star potential: infinitely many terms touch the hub 0");
    std::vector<InteractionTerm> out;
    for (const auto& s : lam) {
      const double w = scale_ / (static_cast<double>(s.x) * static_cast<double>(s.x));
      const SpinSet sp = spins();
      out.push_back({{Site{0, 0, 0}, s}, [w, sp](std::span<const int> l) {
                       return w * sp.value(l[0]) * sp.value(l[1]);
                     }});
    }
    return out;
  }

  double hamiltonian(const Region& lam, const Configuration& sigma) const override {
    const Site hub{0, 0, 0};
    if (!lam.count(hub)) return Potential::hamiltonian(lam, sigma);
    const auto& tail = sigma.tail();
    if (!tail.is_constant())
      throw UnsupportedTail("star potential needs a constant tail, got '" + tail.id() + "'");
    const double t = spins().value(tail.at(hub));
    // sum_{n>=1} v(sigma(n))/n^2 = t*zeta(2) + corrections at overridden sites.
    double correction = 0.0;
    for (const auto& [s, label] : sigma.overrides()) {
      if (s.x < 1) continue;
      const double n = static_cast<double>(s.x);
      correction += (spins().value(label) - t) / (n * n);
    }
    return scale_ * spins().value(sigma.at(hub)) * (t * kZeta2 + correction);
  }

  std::optional<Region> neighborhood(const Site& x) const override {
    if (x == Site{0, 0, 0}) return std::nullopt;
    return Region{Site{0, 0, 0}};
  }

 private:
  double scale_;
};

inline PotentialPtr star_inverse_square(SpinSet spins, double scale = 1.0) {
  return std::make_shared<const StarInverseSquare>(std::move(spins), scale);
}

// Psi_A = Phi_A + c_A on the listed supports.
class ShiftedPotential final : public Potential {
 public:
  ShiftedPotential(PotentialPtr base, std::vector<std::pair<Region, double>> shifts)
      : Potential(base->lattice(), base->spins()), base_(std::move(base)), shifts_(std::move(shifts)) {}

  std::string kind() const override { return "shifted"; }
  bool finite_range() const override { return base_->finite_range(); }
  const PotentialPtr& base() const { return base_; }
  const std::vector<std::pair<Region, double>>& shifts() const { return shifts_; }

  std::vector<InteractionTerm> terms_touching(const Region& lam) const override {
    auto out = base_->terms_touching(lam);
    for (const auto& [support, c] : shifts_) {
      if (region_intersection(support, lam).empty()) continue;
      out.push_back({std::vector<Site>(support.begin(), support.end()),
                     [c = c](std::span<const int>) { return c; }});
    }
    return merge(std::move(out));
  }

  double hamiltonian(const Region& lam, const Configuration& sigma) const override {
    double h = base_->hamiltonian(lam, sigma);
    for (const auto& [support, c] : shifts_)
      if (!region_intersection(support, lam).empty()) h += c;
    return h;
  }

  std::optional<Region> neighborhood(const Site& x) const override {
    auto n = base_->neighborhood(x);
    if (!n) return n;
    for (const auto& [support, c] : shifts_)
      if (c != 0.0 && support.count(x))
        for (const auto& s : support)
          if (s != x) n->insert(s);
    return n;
  }

 private:
  PotentialPtr base_;
  std::vector<std::pair<Region, double>> shifts_;
};

inline PotentialPtr shift_potential(PotentialPtr phi, std::vector<std::pair<Region, double>> shifts) {
  if (shifts.empty()) return phi;
  return std::make_shared<const ShiftedPotential>(std::move(phi), std::move(shifts));
}

// Parts [offset, offset+count) of a multi-part configuration, re-tagged from 0.
inline Configuration project_parts(const Configuration& sigma, int offset, int count) {
  std::vector<PeriodicTable> parts(sigma.tail().parts().begin() + offset,
                                   sigma.tail().parts().begin() + offset + count);
  auto tail = std::make_shared<const TailPattern>(sigma.tail().id(), std::move(parts));
  std::map<Site, int> ov;
  for (const auto& [s, v] : sigma.overrides())
    if (s.part >= offset && s.part < offset + count) ov.emplace(Site{s.part - offset, s.x, s.y}, v);
  return Configuration::from_canonical(std::move(tail), std::move(ov));
}

// Concatenates factor configurations into one on the disjoint-union lattice.
inline Configuration join_parts(const std::vector<Configuration>& factors) {
  std::vector<PeriodicTable> parts;
  std::map<Site, int> ov;
  std::string id;
  int offset = 0;
  for (const auto& f : factors) {
    if (!id.empty()) id += '|';
    id += f.tail().id();
    parts.insert(parts.end(), f.tail().parts().begin(), f.tail().parts().end());
    for (const auto& [s, v] : f.overrides()) ov.emplace(Site{s.part + offset, s.x, s.y}, v);
    offset += f.tail().part_count();
  }
  return Configuration::from_canonical(std::make_shared<const TailPattern>(id, std::move(parts)),
                                       std::move(ov));
}

class DirectSumPotential final : public Potential {
 public:
  explicit DirectSumPotential(std::vector<PotentialPtr> factors)
      : Potential(union_lattice(factors), common_spins(factors)), factors_(std::move(factors)) {
    int off = 0;
    for (const auto& f : factors_) {
      offsets_.push_back(off);
      off += f->lattice().part_count();
    }
  }

  std::string kind() const override { return "direct_sum"; }
  bool finite_range() const override {
    for (const auto& f : factors_)
      if (!f->finite_range()) return false;
    return true;
  }
  const std::vector<PotentialPtr>& factors() const { return factors_; }
  int offset(std::size_t i) const { return offsets_[i]; }

  std::vector<InteractionTerm> terms_touching(const Region& lam) const override {
    std::vector<InteractionTerm> out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const Region local = localize(lam, i);
      if (local.empty()) continue;
      for (auto& t : factors_[i]->terms_touching(local)) {
        for (auto& s : t.support) s.part += offsets_[i];
        out.push_back(std::move(t));
      }
    }
    return out;
  }

  double hamiltonian(const Region& lam, const Configuration& sigma) const override {
    double h = 0.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const Region local = localize(lam, i);
      if (local.empty()) continue;
      h += factors_[i]->hamiltonian(
          local, project_parts(sigma, offsets_[i], factors_[i]->lattice().part_count()));
    }
    return h;
  }

  std::optional<Region> neighborhood(const Site& x) const override {
    const std::size_t i = factor_of(x);
    auto n = factors_[i]->neighborhood(Site{x.part - offsets_[i], x.x, x.y});
    if (!n) return n;
    Region out;
    for (auto s : *n) {
      s.part += offsets_[i];
      out.insert(s);
    }
    return out;
  }

 private:
  static Lattice union_lattice(const std::vector<PotentialPtr>& fs) {
    std::vector<Lattice> ls;
    for (const auto& f : fs) ls.push_back(f->lattice());
    return Lattice::disjoint_union(ls);
  }
  static SpinSet common_spins(const std::vector<PotentialPtr>& fs) {
    if (fs.empty()) throw ValidationError("direct sum needs at least one factor");
    for (const auto& f : fs)
      if (!(f->spins() == fs.front()->spins())) throw SpinMismatch("direct sum factors use different spin sets");
    return fs.front()->spins();
  }
  std::size_t factor_of(const Site& s) const {
    std::size_t i = 0;
    while (i + 1 < offsets_.size() && s.part >= offsets_[i + 1]) ++i;
    return i;
  }
  Region localize(const Region& lam, std::size_t i) const {
    Region out;
    const int lo = offsets_[i], hi = lo + factors_[i]->lattice().part_count();
    for (const auto& s : lam)
      if (s.part >= lo && s.part < hi) out.insert(Site{s.part - lo, s.x, s.y});
    return out;
  }

  std::vector<PotentialPtr> factors_;
  std::vector<int> offsets_;
};

inline PotentialPtr direct_sum_potentials(std::vector<PotentialPtr> factors) {
  return std::make_shared<const DirectSumPotential>(std::move(factors));
}

// tau(Phi)_A = Phi_{tau_*^{-1} A} o tau^{-1}.
class TauImagePotential final : public Potential {
 public:
  TauImagePotential(PotentialPtr base, TauTransform tau)
      : Potential(base->lattice(), base->spins()), base_(std::move(base)), tau_(std::move(tau)),
        inv_(tau_.inverse()) {}

  std::string kind() const override { return "tau_image"; }
  bool finite_range() const override { return base_->finite_range(); }

  std::vector<InteractionTerm> terms_touching(const Region& lam) const override {
    std::vector<InteractionTerm> out;
    for (auto& t : base_->terms_touching(pull_region(tau_, lam))) {
      std::vector<Site> image;
      for (const auto& a : t.support) image.push_back(tau_.forward(a));
      std::vector<Site> sorted = image;
      std::sort(sorted.begin(), sorted.end());
      std::vector<std::size_t> pos;
      for (const auto& s : image)
        pos.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin()));
      out.push_back({sorted, [tau = tau_, image, pos, fn = std::move(t.energy)](std::span<const int> l) {
                       std::vector<int> base_labels(image.size());
                       for (std::size_t j = 0; j < image.size(); ++j)
                         base_labels[j] = tau.spin_inverse(image[j], l[pos[j]]);
                       return fn(base_labels);
                     }});
    }
    return out;
  }

  double hamiltonian(const Region& lam, const Configuration& sigma) const override {
    if (base_->finite_range()) return Potential::hamiltonian(lam, sigma);
    return base_->hamiltonian(pull_region(tau_, lam), apply_tau(lattice(), inv_, sigma));
  }

  std::optional<Region> neighborhood(const Site& x) const override {
    auto n = base_->neighborhood(tau_.backward(x));
    if (!n) return n;
    return push_region(tau_, *n);
  }

 private:
  PotentialPtr base_;
  TauTransform tau_;
  TauTransform inv_;
};

inline PotentialPtr tau_image_potential(PotentialPtr phi, const TauTransform& tau) {
  tau.check_compatible(phi->lattice(), phi->spins().q);
  return std::make_shared<const TauImagePotential>(std::move(phi), tau);
}

inline double hamiltonian_restricted(const Potential& phi, const Region& lam, const Configuration& sigma) {
  return phi.hamiltonian(lam, sigma);
}

inline double log_boltzmann(const Potential& phi, const Region& lam, const Configuration& sigma) {
  return -phi.hamiltonian(lam, sigma);
}

inline Region potential_boundary(const Potential& phi, const Region& L) {
  Region out;
  for (const auto& t : phi.terms_touching(L)) {
    if (phi.vanishes(t)) continue;
    for (const auto& s : t.support)
      if (!L.count(s)) out.insert(s);
  }
  return out;
}

inline Region closure(const Potential& phi, const Region& L) {
  return region_union(L, potential_boundary(phi, L));
}

inline std::optional<Region> phi_neighborhood(const Potential& phi, const Site& x) {
  return phi.neighborhood(x);
}

}  // namespace gga
