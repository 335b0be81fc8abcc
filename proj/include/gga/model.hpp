#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gga/clusters.hpp"
#include "gga/lattice.hpp"
#include "gga/potential.hpp"

namespace gga {

// Lattice, spins, potential, clusters and the declared tails. A Gibbs measure
// label may be attached but is never consulted by the algebra.
struct Model {
  Lattice lattice;
  SpinSet spins;
  PotentialPtr potential;
  ClusterPartition clusters;
  std::vector<TailPtr> tails;
  std::string measure;

  Model(PotentialPtr phi, ClusterPartition c, std::vector<TailPtr> t, std::string measure_label = {})
      : lattice(phi->lattice()), spins(phi->spins()), potential(std::move(phi)), clusters(std::move(c)),
        tails(std::move(t)), measure(std::move(measure_label)) {
    validate();
  }

  const TailPtr& tail(std::string_view id) const {
    for (const auto& t : tails)
      if (t->id() == id) return t;
    throw ValidationError("unknown tail '" + std::string(id) + "'");
  }

  Configuration config(std::string_view tail_id, const std::map<Site, int>& overrides = {}) const {
    for (const auto& [s, v] : overrides) {
      if (!lattice.contains(s)) throw ValidationError("site " + to_string(s) + " is not in the lattice");
      if (v < 0 || v >= spins.q) throw ValidationError("label " + std::to_string(v) + " out of range");
    }
    return canonicalize(lattice, tail(tail_id), overrides);
  }

  void validate() const {
    spins.validate();
    clusters.validate(lattice);
    if (tails.empty()) throw ValidationError("tails: at least one tail is required");
    std::set<std::string> ids;
    for (const auto& t : tails) {
      if (!ids.insert(t->id()).second) throw ValidationError("tails: duplicate id '" + t->id() + "'");
      if (t->part_count() != lattice.part_count())
        throw ValidationError("tails." + t->id() + ": part count does not match the lattice");
      for (int i = 0; i < t->part_count(); ++i) {
        const auto& p = t->parts()[static_cast<std::size_t>(i)];
        if (lattice.part(i).dimension() == 1 && p.py != 1)
          throw ValidationError("tails." + t->id() + ": two-dimensional period on a one-dimensional lattice");
        for (int v : p.table)
          if (v < 0 || v >= spins.q)
            throw ValidationError("tails." + t->id() + ": label " + std::to_string(v) + " out of range");
      }
      if (potential->kind() == "star_inverse_square" && !t->is_constant())
        throw ValidationError("tails." + t->id() + ": star potential supports constant tails only");
    }
  }
};

}  // namespace gga
