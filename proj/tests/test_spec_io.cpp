#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gga/gga.hpp"
#include "gga/spec_io.hpp"

using namespace gga;

namespace {

Site at(std::int64_t x) { return Site{0, x, 0}; }

std::string fixture(const std::string& name) { return std::string(GGA_MODELS_DIR) + "/" + name; }

json minimal() {
  return json::parse(R"({
    "version": 1,
    "lattice": {"kind": "Z"},
    "spins": {"q": 2},
    "potential": {"kind": "zero"},
    "clusters": {"kind": "atomic"},
    "tails": [{"id": "zero", "period": [1], "table": [0]}]
  })");
}

}  // namespace

TEST(ModelSpec, MinimalSpecBuilds) {
  const auto spec = model_spec_from_json(minimal());
  EXPECT_EQ(spec.model.spins.q, 2);
  EXPECT_EQ(spec.model.potential->kind(), "zero");
  EXPECT_FALSE(spec.is_product());
  EXPECT_EQ(spec.model.tails.size(), 1u);
}

TEST(ModelSpec, RejectsInvalidInput) {
  auto j = minimal();
  j["spins"]["q"] = 1;
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  j = minimal();
  j["colour"] = "blue";
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  j = minimal();
  j["version"] = 2;
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  j = minimal();
  j["tails"][0]["table"] = json::array({3});
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  j = minimal();
  j["potential"] = {{"kind", "ising_pair"}, {"beta", -1.0}};
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  j = minimal();
  j["potential"] = {{"kind", "star_inverse_square"}, {"scale", 1.0}};
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  j = minimal();
  j["clusters"] = {{"kind", "blocks"}, {"k", 0}};
  EXPECT_THROW(model_spec_from_json(j), ValidationError);

  EXPECT_THROW(model_spec_from_json(json::array()), ValidationError);
}

TEST(ModelSpec, StarSpecBuilds) {
  const auto spec = parse_model_spec(fixture("star.json"));
  EXPECT_FALSE(spec.model.potential->finite_range());
  EXPECT_EQ(spec.model.lattice, Lattice::naturals());
  auto j = spec.document;
  j["tails"].push_back({{"id", "alt"}, {"period", {2}}, {"table", {0, 1}}});
  EXPECT_THROW(model_spec_from_json(j), ValidationError);
}

TEST(ModelSpec, EveryFixtureRoundTrips) {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(GGA_MODELS_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++n;
    SCOPED_TRACE(entry.path().filename().string());
    const auto spec = parse_model_spec(entry.path().string());
    const auto again = model_spec_from_json(spec.document);
    EXPECT_EQ(again.document, spec.document);
    EXPECT_EQ(again.model.lattice, spec.model.lattice);
    EXPECT_EQ(again.model.spins, spec.model.spins);
    EXPECT_EQ(again.model.tails.size(), spec.model.tails.size());
    EXPECT_EQ(again.is_product(), spec.is_product());
    // Same coefficients on a handful of pairs.
    for (const auto& [a, b] : sample_fertile_pairs(spec.model, 5, 1)) {
      const auto ca = coefficient_vector(spec.model, a, b), cb = coefficient_vector(again.model, a, b);
      ASSERT_EQ(ca.entries.size(), cb.entries.size());
      for (std::size_t i = 0; i < ca.entries.size(); ++i) EXPECT_EQ(ca.entries[i].second, cb.entries[i].second);
    }
  }
  EXPECT_GE(n, 10u);
}

TEST(ModelSpec, ProductSpec) {
  const auto spec = parse_model_spec(fixture("product_ising_potts.json"));
  ASSERT_TRUE(spec.is_product());
  EXPECT_EQ(spec.factors.size(), 2u);
  EXPECT_EQ(spec.model.lattice.part_count(), 2);
}

TEST(ModelSpec, PotentialKindsFromJson) {
  auto j = minimal();
  j["spins"] = {{"q", 2}, {"values", {0, 1}}};
  j["potential"] = json::parse(R"({"kind": "tau_image",
      "base": {"kind": "finite_terms", "terms": [{"sites": [0, 1], "table": [[0, 0], [1, 1]]}]},
      "tau": {"spatial": "translation", "shift": [1]}})");
  const auto spec = model_spec_from_json(j);
  const auto one = spec.model.config("zero", {{at(1), 1}, {at(2), 1}});
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*spec.model.potential, {at(1)}, one), 1.0);

  j["potential"] = json::parse(R"({"kind": "custom_pair",
      "pairs": [{"offset": [2], "table": [[0, 0.5], [0.5, 0]]}]})");
  const auto cp = model_spec_from_json(j);
  EXPECT_DOUBLE_EQ(hamiltonian_restricted(*cp.model.potential, {at(0)}, cp.model.config("zero", {{at(0), 1}})), 1.0);

  j["potential"] = json::parse(R"({"kind": "shifted", "base": {"kind": "ising_pair", "beta": 1.0},
      "shifts": [{"sites": [0, 1], "value": 0.5}]})");
  const auto sh = model_spec_from_json(j);
  EXPECT_EQ(sh.model.potential->kind(), "shifted");
}

TEST(Configs, JsonRoundTrip) {
  const auto spec = parse_model_spec(fixture("ising_z.json"));
  const auto& m = spec.model;
  const auto c = m.config("plus", {{at(-2), 0}, {at(3), 0}});
  const auto j = config_to_json(m, c);
  EXPECT_EQ(j, json::parse(R"({"tail": "plus", "overrides": [[[-2], 0], [[3], 0]]})"));
  EXPECT_EQ(config_from_json(m, j), c);

  // Bare integers are accepted on one-dimensional lattices.
  EXPECT_EQ(config_from_json(m, json::parse(R"({"tail": "plus", "overrides": [[-2, 0], [3, 0]]})")), c);
  // Overrides equal to the tail vanish.
  EXPECT_EQ(config_from_json(m, json::parse(R"({"tail": "plus", "overrides": [[0, 1]]})")), m.config("plus"));
  EXPECT_THROW(config_from_json(m, json::parse(R"({"tail": "plus", "overrides": [[0, 2]]})")), ValidationError);
  EXPECT_THROW(config_from_json(m, json::parse(R"({"tail": "plus", "overrides": [[0, 0], [0, 1]]})")),
               ValidationError);
  EXPECT_THROW(config_from_json(m, json::parse(R"({"tail": "nope"})")), ValidationError);

  AlgebraElement u = AlgebraElement::basis(c, 2.5) + AlgebraElement::basis(m.config("minus"), -1.0);
  EXPECT_EQ(element_from_json(m, element_to_json(m, u)), u);
  const auto p = PairElement::basis(c, m.config("plus"), 0.75);
  EXPECT_EQ(pair_element_from_json(m, pair_element_to_json(m, p)), p);
}

TEST(Configs, SquareLatticeSites) {
  const auto spec = parse_model_spec(fixture("ising_z2.json"));
  const auto c = config_from_json(spec.model, json::parse(R"({"tail": "plus", "overrides": [[[1, -2], 0]]})"));
  EXPECT_EQ(c.at(Site{0, 1, -2}), 0);
  EXPECT_EQ(config_from_json(spec.model, config_to_json(spec.model, c)), c);
  EXPECT_THROW(config_from_json(spec.model, json::parse(R"({"tail": "plus", "overrides": [[1, 0]]})")),
               ValidationError);
}

TEST(Files, ParseErrors) {
  EXPECT_THROW(parse_model_spec("/nonexistent/spec.json"), ParseError);
  const auto path = std::filesystem::temp_directory_path() / "gga_bad_spec.json";
  {
    std::ofstream out(path);
    out << "{ \"version\": 1, ";
  }
  EXPECT_THROW(parse_model_spec(path.string()), ParseError);
  std::filesystem::remove(path);
}
