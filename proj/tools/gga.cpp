// gga: command-line front end for the genetic/evolution algebra library.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gga/gga.hpp"
#include "gga/spec_io.hpp"
#include "gga/suites.hpp"

namespace {

using gga::json;

// Inline JSON, or @path to read it from a file.
json json_arg(const std::string& arg, const std::string& what) {
  if (!arg.empty() && arg.front() == '@') return gga::read_json_file(arg.substr(1));
  try {
    return json::parse(arg);
  } catch (const json::parse_error& e) {
    throw gga::ParseError(what + ": " + e.what());
  }
}

// A bare configuration stands for its basis element.
gga::AlgebraElement element_arg(const gga::Model& m, const std::string& arg, const std::string& what) {
  const auto j = json_arg(arg, what);
  if (j.is_object()) return gga::AlgebraElement::basis(gga::config_from_json(m, j, what));
  return gga::element_from_json(m, j, what);
}

gga::PairElement pair_element_arg(const gga::Model& m, const std::string& arg, const std::string& what) {
  const auto j = json_arg(arg, what);
  if (j.is_object()) {
    gga::detail::check_keys(j, what, {"left", "right"});
    return gga::PairElement::basis(gga::config_from_json(m, gga::detail::require(j, what, "left"), what + ".left"),
                                   gga::config_from_json(m, gga::detail::require(j, what, "right"), what + ".right"));
  }
  return gga::pair_element_from_json(m, j, what);
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_verify(const std::string& suite, const std::string& model, std::uint64_t seed, std::size_t samples) {
  const auto spec = gga::parse_model_spec(model);
  const auto report = gga::run_suite(spec, suite, seed, samples);
  emit(report.to_json());
  for (const auto& c : report.checks)
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "  deviation=" << c.max_deviation << ' ' << c.comparison
              << ' ' << c.tolerance << '\n';
  std::cerr << suite << ": " << (report.passed() ? "all checks passed" : "FAILED") << " (" << report.duration
            << " s)\n";
  return report.passed() ? 0 : 1;
}

int cmd_coeff(const std::string& model, const std::string& left, const std::string& right) {
  const auto spec = gga::parse_model_spec(model);
  const auto& m = spec.model;
  const auto a = gga::config_from_json(m, json_arg(left, "left"), "left");
  const auto b = gga::config_from_json(m, json_arg(right, "right"), "right");
  const auto cv = gga::coefficient_vector(m, a, b);
  gga::AlgebraElement sorted;
  for (const auto& [c, v] : cv.entries) sorted.add(c, v);
  emit({{"left", gga::config_to_json(m, a)},
        {"right", gga::config_to_json(m, b)},
        {"fertile", !cv.empty()},
        {"entries", gga::element_to_json(m, sorted)}});
  std::cerr << cv.entries.size() << " offspring\n";
  return 0;
}

int cmd_product(const std::string& model, const std::string& left, const std::string& right) {
  const auto spec = gga::parse_model_spec(model);
  const auto& m = spec.model;
  const auto u = element_arg(m, left, "left"), v = element_arg(m, right, "right");
  const auto p = gga::product(m, u, v);
  emit(gga::element_to_json(m, p));
  std::cerr << p.size() << " terms\n";
  return 0;
}

int cmd_evo_product(const std::string& model, const std::string& left, const std::string& right) {
  const auto spec = gga::parse_model_spec(model);
  const auto& m = spec.model;
  const auto u = pair_element_arg(m, left, "left"), v = pair_element_arg(m, right, "right");
  const auto p = gga::evo_product(m, u, v);
  emit(gga::pair_element_to_json(m, p));
  std::cerr << p.size() << " terms\n";
  return 0;
}

int cmd_oracle_compare(const std::string& model, std::uint64_t seed, std::size_t samples) {
  const auto spec = gga::parse_model_spec(model);
  const auto r = gga::compare_finite_equivalence(spec.model, samples, seed);
  const bool ok = r.offspring_match && r.max_genetic_diff <= 1e-10 && r.max_evolution_diff <= 1e-10;
  emit({{"samples", r.samples},
        {"coefficients", r.coefficients},
        {"max_genetic_diff", r.max_genetic_diff},
        {"max_evolution_diff", r.max_evolution_diff},
        {"offspring_match", r.offspring_match},
        {"passed", ok}});
  std::cerr << "oracle-compare: " << (ok ? "agree" : "DISAGREE") << " (genetic " << r.max_genetic_diff
            << ", evolution " << r.max_evolution_diff << ")\n";
  return ok ? 0 : 1;
}

// configs file: {"basis": [cfg, ...], "xi": cfg, "lam_prime": [site, ...]}
int cmd_embed(const std::string& model, const std::string& configs) {
  const auto spec = gga::parse_model_spec(model);
  const auto& m = spec.model;
  const auto j = gga::read_json_file(configs);
  gga::detail::check_keys(j, "configs", {"basis", "xi", "lam_prime"});
  std::vector<gga::Configuration> basis;
  for (const auto& c : gga::detail::array(gga::detail::require(j, "configs", "basis"), "configs.basis"))
    basis.push_back(gga::config_from_json(m, c, "configs.basis"));
  const auto xi = gga::config_from_json(m, gga::detail::require(j, "configs", "xi"), "configs.xi");
  std::optional<gga::Region> lam;
  if (j.contains("lam_prime")) lam = gga::region_from_json(m.lattice, j.at("lam_prime"), "configs.lam_prime");
  const auto r = gga::embed_finite_subalgebra(m, basis, lam, xi);
  auto sites = [&](const gga::Region& reg) {
    json out = json::array();
    for (const auto& s : reg) out.push_back(gga::site_to_json(m.lattice, s));
    return out;
  };
  const bool ok = r.injective && r.offspring_match && r.max_diff <= 1e-12;
  emit({{"lambda", sites(r.lambda)},
        {"lambda_prime", sites(r.lambda_prime)},
        {"pairs", r.pairs},
        {"coefficients", r.coefficients},
        {"max_diff", r.max_diff},
        {"injective", r.injective},
        {"offspring_match", r.offspring_match},
        {"passed", ok}});
  std::cerr << "embed: max diff " << r.max_diff << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic and evolution Gibbs algebras"};
  app.require_subcommand(1);

  std::string model, left, right, suite, configs;
  std::uint64_t seed = 1;
  std::size_t samples = 0;

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(gga::suite_names()));
  verify->add_option("--model", model, "Model spec (JSON)")->required();
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--samples", samples, "Sample count (0: suite default)");

  auto* coeff = app.add_subcommand("coeff", "Structure coefficients c_{left right, .}");
  auto* prod = app.add_subcommand("product", "Product in the genetic algebra");
  auto* evo = app.add_subcommand("evo-product", "Product in the evolution algebra");
  for (auto* sc : {coeff, prod, evo}) {
    sc->add_option("--model", model, "Model spec (JSON)")->required();
    sc->add_option("--left", left, "JSON or @file")->required();
    sc->add_option("--right", right, "JSON or @file")->required();
  }

  auto* oracle = app.add_subcommand("oracle-compare", "Compare against the finite-lattice oracle");
  oracle->add_option("--model", model, "Model spec on a finite lattice")->required();
  oracle->add_option("--seed", seed, "RNG seed");
  std::size_t oracle_samples = 200;
  oracle->add_option("--samples", oracle_samples, "Sample count");

  auto* embed = app.add_subcommand("embed", "Embed a finite subalgebra into a finite-volume algebra");
  embed->add_option("--model", model, "Model spec (JSON)")->required();
  embed->add_option("--configs", configs, "Basis/boundary file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(suite, model, seed, samples);
    if (*coeff) return cmd_coeff(model, left, right);
    if (*prod) return cmd_product(model, left, right);
    if (*evo) return cmd_evo_product(model, left, right);
    if (*oracle) return cmd_oracle_compare(model, seed, oracle_samples);
    if (*embed) return cmd_embed(model, configs);
  } catch (const gga::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const gga::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const gga::UnknownSuite& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const gga::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
