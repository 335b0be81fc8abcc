#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gga/evolution.hpp"
#include "gga/genetic.hpp"
#include "gga/model.hpp"
#include "gga/potential.hpp"
#include "gga/tau.hpp"
#include "gga/transforms.hpp"

namespace gga {

using json = nlohmann::json;

inline constexpr int kSpecVersion = 1;

namespace detail {

inline void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(path + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ValidationError(path + ": unknown field '" + k + "'");
  }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ValidationError(path + ": missing field '" + key + "'");
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path + ": expected a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path + ": expected a string");
  return v.get<std::string>();
}

inline const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError(path + ": expected an array");
  return v;
}

}  // namespace detail

// Sites are [x], [x, y], or a bare integer x; on multi-part lattices the part
// index comes first: [part, x] or [part, x, y].
inline Site site_from_json(const Lattice& lattice, const json& v, const std::string& path) {
  std::vector<std::int64_t> c;
  if (v.is_number_integer()) {
    c.push_back(v.get<std::int64_t>());
  } else {
    for (const auto& e : detail::array(v, path)) c.push_back(detail::integer(e, path));
  }
  Site s;
  std::size_t i = 0;
  if (lattice.part_count() > 1) {
    if (c.empty()) throw ValidationError(path + ": missing part index");
    s.part = static_cast<int>(c[i++]);
    if (s.part < 0 || s.part >= lattice.part_count()) throw ValidationError(path + ": part index out of range");
  }
  const int dim = lattice.part(s.part).dimension();
  if (c.size() - i != static_cast<std::size_t>(dim))
    throw ValidationError(path + ": expected " + std::to_string(dim) + " coordinate(s)");
  s.x = c[i++];
  if (dim == 2) s.y = c[i];
  if (!lattice.contains(s)) throw ValidationError(path + ": site " + to_string(s) + " is not in the lattice");
  return s;
}

inline json site_to_json(const Lattice& lattice, const Site& s) {
  json out = json::array();
  if (lattice.part_count() > 1) out.push_back(s.part);
  out.push_back(s.x);
  if (lattice.part(s.part).dimension() == 2) out.push_back(s.y);
  return out;
}

inline Region region_from_json(const Lattice& lattice, const json& v, const std::string& path) {
  Region r;
  std::size_t i = 0;
  for (const auto& e : detail::array(v, path)) r.insert(site_from_json(lattice, e, path + "[" + std::to_string(i++) + "]"));
  return r;
}

inline json lattice_to_json(const Lattice& l) {
  const auto& p = l.part(0);
  switch (p.kind) {
    case PartKind::Integers: return {{"kind", "Z"}};
    case PartKind::Square: return {{"kind", "Z2"}};
    case PartKind::Naturals: return {{"kind", "N0"}};
    case PartKind::Box: return {{"kind", "finite"}, {"width", p.width}, {"height", p.height}};
  }
  return {};
}

inline Lattice lattice_from_json(const json& j) {
  detail::check_keys(j, "lattice", {"kind", "width", "height"});
  const auto kind = detail::string(detail::require(j, "lattice", "kind"), "lattice.kind");
  if (kind != "finite" && (j.contains("width") || j.contains("height")))
    throw ValidationError("lattice: width/height only apply to kind 'finite'");
  if (kind == "Z") return Lattice::integers();
  if (kind == "Z2") return Lattice::square();
  if (kind == "N0") return Lattice::naturals();
  if (kind == "finite") {
    const auto w = detail::integer(detail::require(j, "lattice", "width"), "lattice.width");
    const auto h = j.contains("height") ? detail::integer(j.at("height"), "lattice.height") : 1;
    if (w < 1 || h < 1) throw ValidationError("lattice: width and height must be positive");
    return Lattice::box(w, h);
  }
  throw ValidationError("lattice.kind: unknown kind '" + kind + "' (expected Z, Z2, N0 or finite)");
}

inline SpinSet spins_from_json(const json& j) {
  detail::check_keys(j, "spins", {"q", "values"});
  SpinSet s;
  s.q = static_cast<int>(detail::integer(detail::require(j, "spins", "q"), "spins.q"));
  if (j.contains("values"))
    for (const auto& v : detail::array(j.at("values"), "spins.values")) s.values.push_back(detail::number(v, "spins.values"));
  s.validate();
  return s;
}

inline json spins_to_json(const SpinSet& s) {
  json out{{"q", s.q}};
  if (!s.values.empty()) out["values"] = s.values;
  return out;
}

inline TailPtr tail_from_json(const Lattice& lattice, const json& j, const std::string& path) {
  detail::check_keys(j, path, {"id", "period", "table"});
  const auto id = detail::string(detail::require(j, path, "id"), path + ".id");
  std::vector<std::int64_t> period;
  for (const auto& v : detail::array(detail::require(j, path, "period"), path + ".period"))
    period.push_back(detail::integer(v, path + ".period"));
  std::vector<int> table;
  for (const auto& v : detail::array(detail::require(j, path, "table"), path + ".table"))
    table.push_back(static_cast<int>(detail::integer(v, path + ".table")));
  const int dim = lattice.part(0).dimension();
  if (period.size() != static_cast<std::size_t>(dim))
    throw ValidationError(path + ".period: expected " + std::to_string(dim) + " entries");
  PeriodicTable t{period[0], dim == 2 ? period[1] : 1, std::move(table)};
  return std::make_shared<const TailPattern>(id, std::vector<PeriodicTable>{std::move(t)});
}

inline json tail_to_json(const TailPattern& t, int dim) {
  const auto& p = t.parts().front();
  json period = json::array({p.px});
  if (dim == 2) period.push_back(p.py);
  return {{"id", t.id()}, {"period", period}, {"table", p.table}};
}

inline TauTransform tau_from_json(const Lattice& lattice, int q, const json& j) {
  detail::check_keys(j, "tau", {"spatial", "shift", "axis", "mapping", "spin_map", "spin_family"});
  const auto kind = j.contains("spatial") ? detail::string(j.at("spatial"), "tau.spatial") : std::string("identity");
  TauTransform t;
  if (kind == "identity") {
    t = TauTransform::identity();
  } else if (kind == "translation") {
    const auto& sh = detail::array(detail::require(j, "tau", "shift"), "tau.shift");
    if (sh.empty() || sh.size() > 2) throw ValidationError("tau.shift: expected 1 or 2 entries");
    t = TauTransform::translation(detail::integer(sh[0], "tau.shift"), sh.size() == 2 ? detail::integer(sh[1], "tau.shift") : 0);
  } else if (kind == "reflection") {
    t = TauTransform::reflection(detail::integer(detail::require(j, "tau", "axis"), "tau.axis"));
  } else if (kind == "permutation") {
    std::map<Site, Site> m;
    for (const auto& e : detail::array(detail::require(j, "tau", "mapping"), "tau.mapping")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError("tau.mapping: entries are [from, to]");
      m[site_from_json(lattice, e[0], "tau.mapping")] = site_from_json(lattice, e[1], "tau.mapping");
    }
    t = TauTransform::permutation(m);
  } else {
    throw ValidationError("tau.spatial: unknown kind '" + kind + "'");
  }
  if (j.contains("spin_map") && j.contains("spin_family"))
    throw ValidationError("tau: give spin_map or spin_family, not both");
  if (j.contains("spin_map")) t = t.with_spin_map(j.at("spin_map").get<std::vector<int>>());
  if (j.contains("spin_family")) {
    const auto& f = j.at("spin_family");
    detail::check_keys(f, "tau.spin_family", {"period", "maps"});
    const auto period = detail::require(f, "tau.spin_family", "period").get<std::vector<std::int64_t>>();
    if (period.empty() || period.size() > 2) throw ValidationError("tau.spin_family.period: expected 1 or 2 entries");
    t = t.with_spin_family(period[0], period.size() == 2 ? period[1] : 1,
                           detail::require(f, "tau.spin_family", "maps").get<std::vector<std::vector<int>>>());
  }
  t.check_compatible(lattice, q);
  return t;
}

namespace detail {

inline std::vector<double> flatten_table(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
    return out;
  }
  for (const auto& e : array(v, path)) {
    auto inner = flatten_table(e, path);
    out.insert(out.end(), inner.begin(), inner.end());
  }
  return out;
}

}  // namespace detail

inline PotentialPtr potential_from_json(const Lattice& lattice, const SpinSet& spins, const json& j,
                                        const std::string& path = "potential") {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  const auto kind = detail::string(detail::require(j, path, "kind"), path + ".kind");
  auto beta = [&]() {
    const double b = j.contains("beta") ? detail::number(j.at("beta"), path + ".beta") : 1.0;
    if (b < 0) throw ValidationError(path + ".beta: must be >= 0");
    return b;
  };
  if (kind == "zero") {
    detail::check_keys(j, path, {"kind"});
    return zero_potential(lattice, spins);
  }
  if (kind == "ising_pair") {
    detail::check_keys(j, path, {"kind", "beta"});
    return ising_pair(lattice, spins, beta());
  }
  if (kind == "potts_pair") {
    detail::check_keys(j, path, {"kind", "beta"});
    return potts_pair(lattice, spins, beta());
  }
  if (kind == "star_inverse_square") {
    detail::check_keys(j, path, {"kind", "scale"});
    if (!(lattice == Lattice::naturals())) throw ValidationError(path + ": star potential lives on N0");
    return star_inverse_square(spins, j.contains("scale") ? detail::number(j.at("scale"), path + ".scale") : 1.0);
  }
  if (kind == "custom_pair") {
    detail::check_keys(j, path, {"kind", "pairs"});
    std::vector<PairOffset> offs;
    for (const auto& e : detail::array(detail::require(j, path, "pairs"), path + ".pairs")) {
      detail::check_keys(e, path + ".pairs", {"offset", "table"});
      const auto o = detail::require(e, path + ".pairs", "offset").get<std::vector<std::int64_t>>();
      if (o.size() != static_cast<std::size_t>(lattice.part(0).dimension()))
        throw ValidationError(path + ".pairs.offset: wrong dimension");
      offs.push_back({o[0], o.size() == 2 ? o[1] : 0, detail::flatten_table(detail::require(e, path + ".pairs", "table"), path + ".pairs.table")});
    }
    return custom_pair(lattice, spins, std::move(offs));
  }
  if (kind == "finite_terms") {
    detail::check_keys(j, path, {"kind", "terms"});
    std::vector<FiniteTermSpec> specs;
    for (const auto& e : detail::array(detail::require(j, path, "terms"), path + ".terms")) {
      detail::check_keys(e, path + ".terms", {"sites", "table"});
      FiniteTermSpec spec;
      for (const auto& s : detail::array(detail::require(e, path + ".terms", "sites"), path + ".terms.sites"))
        spec.sites.push_back(site_from_json(lattice, s, path + ".terms.sites"));
      spec.table = detail::flatten_table(detail::require(e, path + ".terms", "table"), path + ".terms.table");
      specs.push_back(std::move(spec));
    }
    return finite_terms(lattice, spins, std::move(specs));
  }
  if (kind == "shifted") {
    detail::check_keys(j, path, {"kind", "base", "shifts"});
    auto base = potential_from_json(lattice, spins, detail::require(j, path, "base"), path + ".base");
    std::vector<std::pair<Region, double>> shifts;
    for (const auto& e : detail::array(detail::require(j, path, "shifts"), path + ".shifts")) {
      detail::check_keys(e, path + ".shifts", {"sites", "value"});
      shifts.emplace_back(region_from_json(lattice, detail::require(e, path + ".shifts", "sites"), path + ".shifts.sites"),
                          detail::number(detail::require(e, path + ".shifts", "value"), path + ".shifts.value"));
    }
    return shift_potential(std::move(base), std::move(shifts));
  }
  if (kind == "tau_image") {
    detail::check_keys(j, path, {"kind", "base", "tau"});
    auto base = potential_from_json(lattice, spins, detail::require(j, path, "base"), path + ".base");
    return tau_image_potential(std::move(base), tau_from_json(lattice, spins.q, detail::require(j, path, "tau")));
  }
  throw ValidationError(path + ".kind: unknown potential kind '" + kind + "'");
}

inline ClusterPartition clusters_from_json(const Lattice& lattice, const json& j) {
  detail::check_keys(j, "clusters", {"kind", "k", "clusters"});
  const auto kind = detail::string(detail::require(j, "clusters", "kind"), "clusters.kind");
  if (kind != "blocks" && j.contains("k")) throw ValidationError("clusters: 'k' only applies to blocks");
  if (kind != "list" && j.contains("clusters")) throw ValidationError("clusters: 'clusters' only applies to list");
  if (kind == "atomic") return ClusterPartition::atomic();
  if (kind == "unique") return ClusterPartition::unique();
  if (kind == "blocks") return ClusterPartition::blocks(detail::integer(detail::require(j, "clusters", "k"), "clusters.k"));
  if (kind == "list") {
    std::vector<std::vector<Site>> cl;
    for (const auto& c : detail::array(detail::require(j, "clusters", "clusters"), "clusters.clusters")) {
      auto r = region_from_json(lattice, c, "clusters.clusters");
      cl.emplace_back(r.begin(), r.end());
    }
    return ClusterPartition::finite_list(cl);
  }
  throw ValidationError("clusters.kind: unknown kind '" + kind + "'");
}

// A validated spec: the normalized JSON document and the model it describes.
// For product specs the factors are kept as well.
struct ModelSpec {
  json document;
  Model model;
  std::vector<Model> factors;
  json suite_params = json::object();

  bool is_product() const { return !factors.empty(); }
};

namespace detail {

inline std::pair<json, Model> single_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"version", "lattice", "spins", "potential", "clusters", "tails", "measure", "suite_params"});
  const auto lattice = lattice_from_json(require(j, path, "lattice"));
  const auto spins = spins_from_json(require(j, path, "spins"));
  auto phi = potential_from_json(lattice, spins, require(j, path, "potential"));
  auto clusters = clusters_from_json(lattice, require(j, path, "clusters"));
  std::vector<TailPtr> tails;
  std::size_t i = 0;
  for (const auto& t : array(require(j, path, "tails"), path + ".tails"))
    tails.push_back(tail_from_json(lattice, t, "tails[" + std::to_string(i++) + "]"));
  const std::string measure = j.contains("measure") ? string(j.at("measure"), "measure") : std::string();
  Model m(std::move(phi), std::move(clusters), std::move(tails), measure);

  json doc = j;
  doc.erase("version");
  doc.erase("suite_params");
  doc["lattice"] = lattice_to_json(lattice);
  doc["spins"] = spins_to_json(spins);
  json tj = json::array();
  for (const auto& t : m.tails) tj.push_back(tail_to_json(*t, lattice.part(0).dimension()));
  doc["tails"] = tj;
  if (measure.empty()) doc.erase("measure");
  return {doc, std::move(m)};
}

}  // namespace detail

inline ModelSpec model_spec_from_json_unchecked(const json& j);

// Type errors inside nested arrays surface as ValidationError too.
inline ModelSpec model_spec_from_json(const json& j) {
  try {
    return model_spec_from_json_unchecked(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("spec: ") + e.what());
  }
}

inline ModelSpec model_spec_from_json_unchecked(const json& j) {
  if (!j.is_object()) throw ValidationError("spec: expected a JSON object");
  const auto version = detail::integer(detail::require(j, "spec", "version"), "version");
  if (version != kSpecVersion) throw ValidationError("version: unsupported spec version " + std::to_string(version));
  json params = json::object();
  if (j.contains("suite_params")) {
    if (!j.at("suite_params").is_object()) throw ValidationError("suite_params: expected an object");
    params = j.at("suite_params");
  }
  if (j.contains("product")) {
    detail::check_keys(j, "spec", {"version", "product", "suite_params"});
    const auto& arr = detail::array(j.at("product"), "product");
    if (arr.size() < 2 || arr.size() > 4) throw ValidationError("product: 2 to 4 factors required");
    std::vector<Model> factors;
    json docs = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      json f = arr[i];
      if (f.is_object() && f.contains("version") && f.at("version") != kSpecVersion)
        throw ValidationError("product[" + std::to_string(i) + "].version: unsupported");
      auto [doc, model] = detail::single_from_json(f, "product[" + std::to_string(i) + "]");
      docs.push_back(doc);
      factors.push_back(std::move(model));
    }
    auto product = build_product_model(factors);
    json doc{{"version", kSpecVersion}, {"product", docs}};
    if (!params.empty()) doc["suite_params"] = params;
    return ModelSpec{doc, std::move(product), std::move(factors), params};
  }
  auto [doc, model] = detail::single_from_json(j, "spec");
  json full{{"version", kSpecVersion}};
  full.update(doc);
  if (!params.empty()) full["suite_params"] = params;
  return ModelSpec{full, std::move(model), {}, params};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline ModelSpec parse_model_spec(const std::string& path) { return model_spec_from_json(read_json_file(path)); }

// {"tail": id, "overrides": [[site, label], ...]}
inline Configuration config_from_json(const Model& model, const json& j, const std::string& path = "config") {
  detail::check_keys(j, path, {"tail", "overrides"});
  const auto tail = detail::string(detail::require(j, path, "tail"), path + ".tail");
  std::map<Site, int> ov;
  if (j.contains("overrides")) {
    for (const auto& e : detail::array(j.at("overrides"), path + ".overrides")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError(path + ".overrides: entries are [site, label]");
      const auto s = site_from_json(model.lattice, e[0], path + ".overrides");
      const auto label = detail::integer(e[1], path + ".overrides");
      if (label < 0 || label >= model.spins.q) throw ValidationError(path + ".overrides: label out of range");
      if (ov.count(s)) throw ValidationError(path + ".overrides: site " + to_string(s) + " given twice");
      ov[s] = static_cast<int>(label);
    }
  }
  return model.config(tail, ov);
}

inline json config_to_json(const Model& model, const Configuration& c) {
  json ov = json::array();
  for (const auto& [s, v] : c.overrides()) ov.push_back(json::array({site_to_json(model.lattice, s), v}));
  return {{"tail", fertile_class_id(model, c).tail_id}, {"overrides", ov}};
}

// [{"config": cfg, "coeff": x}, ...]
inline AlgebraElement element_from_json(const Model& model, const json& j, const std::string& path = "element") {
  AlgebraElement e;
  for (const auto& t : detail::array(j, path)) {
    detail::check_keys(t, path, {"config", "coeff"});
    e.add(config_from_json(model, detail::require(t, path, "config"), path + ".config"),
          t.contains("coeff") ? detail::number(t.at("coeff"), path + ".coeff") : 1.0);
  }
  return e;
}

inline json element_to_json(const Model& model, const AlgebraElement& e) {
  json out = json::array();
  for (const auto& [c, v] : e.terms()) out.push_back({{"config", config_to_json(model, c)}, {"coeff", v}});
  return out;
}

// [{"left": cfg, "right": cfg, "coeff": x}, ...]
inline PairElement pair_element_from_json(const Model& model, const json& j, const std::string& path = "element") {
  PairElement e;
  for (const auto& t : detail::array(j, path)) {
    detail::check_keys(t, path, {"left", "right", "coeff"});
    e.add({config_from_json(model, detail::require(t, path, "left"), path + ".left"),
           config_from_json(model, detail::require(t, path, "right"), path + ".right")},
          t.contains("coeff") ? detail::number(t.at("coeff"), path + ".coeff") : 1.0);
  }
  return e;
}

inline json pair_element_to_json(const Model& model, const PairElement& e) {
  json out = json::array();
  for (const auto& [k, v] : e.terms())
    out.push_back({{"left", config_to_json(model, k.first)}, {"right", config_to_json(model, k.second)}, {"coeff", v}});
  return out;
}

}  // namespace gga
