#include <doctest.h>

#include <sstream>
#include <string>

#include "wageband/config.hpp"
#include "wageband/errors.hpp"

using namespace wageband;

namespace {

IniDocument parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ini(in, "test.ini");
}

std::string config_error(const std::string& text) {
  try {
    RunConfig cfg;
    apply_ini(cfg, parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("INI sections, comments and whitespace") {
  const IniDocument doc = parse(
      "# comment\n"
      "[model]\n"
      "  a = 0.25   \n"
      "; another comment\n"
      "rho=1\n"
      "\n"
      "[policy]\n"
      "omega = 0.7\n");
  REQUIRE(doc.sections.count("model") == 1);
  CHECK(doc.sections.at("model").at("a") == "0.25");
  CHECK(doc.sections.at("model").at("rho") == "1");
  CHECK(doc.sections.at("policy").at("omega") == "0.7");
}

TEST_CASE("malformed INI input is a configuration error with its location") {
  CHECK_THROWS_AS(parse("a = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\njunk line\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\na = 1\na = 2\n"), ConfigError);
  try {
    parse("[model]\n\nnot a pair\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.ini") != std::string::npos);
    CHECK(std::string(e.what()).find('3') != std::string::npos);
  }
}

TEST_CASE("model section round-trips with exactly the documented keys") {
  ModelParams p;
  p.a = 0.3;
  p.b = 1.5;
  p.q = 0.75;
  p.rho = 1.25;
  p.beta = 0.4;
  p.A = 2.0;
  p.k = 1.5;
  p.t_floor = 1.2;
  p.z_min = 0.1;
  p.z_max = 2.5;
  const IniDocument doc = parse(model_params_to_ini(p));
  const auto& sec = doc.sections.at("model");
  CHECK(sec.size() == 11);
  for (const char* key : {"a", "b", "q", "rho", "beta", "A", "k", "t_floor", "z_min", "z_max",
                          "ability_law"})
    CHECK_MESSAGE(sec.count(key) == 1, key);
  const ModelParams r = model_params_from_section(sec);
  CHECK(r.a == p.a);
  CHECK(r.b == p.b);
  CHECK(r.q == p.q);
  CHECK(r.rho == p.rho);
  CHECK(r.beta == p.beta);
  CHECK(r.A == p.A);
  CHECK(r.k == p.k);
  CHECK(r.t_floor == p.t_floor);
  CHECK(r.z_min == p.z_min);
  CHECK(r.z_max == p.z_max);
  CHECK(r.ability_law == AbilityLaw::Uniform);
}

TEST_CASE("unknown keys and sections are rejected by name") {
  CHECK(config_error("[model]\nalpha = 1\n").find("alpha") != std::string::npos);
  CHECK(config_error("[policy]\nweight = 1\n").find("weight") != std::string::npos);
  CHECK(config_error("[search]\ngridd = 3\n").find("gridd") != std::string::npos);
  CHECK(config_error("[output]\nformat = svg\n").find("format") != std::string::npos);
  CHECK(config_error("[solver]\nx = 1\n").find("solver") != std::string::npos);
  CHECK(config_error("[model]\na = abc\n").find("'a'") != std::string::npos);
  CHECK(config_error("[policy]\nconstraint = maybe\n").find("constraint") != std::string::npos);
  CHECK(config_error("[model]\na = 0.5\n").empty());
}

TEST_CASE("settings apply onto a run configuration") {
  RunConfig cfg;
  apply_ini(cfg, parse("[model]\nq = 2\n[policy]\nomega = 0.4\nconstraint = minwage\nt_lo = 1.5\n"
                       "[search]\ngrid = 12\nrefine_evals = 10\n[output]\ndir = results\nfigures = yes\n"));
  CHECK(cfg.model.q == 2.0);
  CHECK(cfg.model.a == 0.5);
  CHECK(cfg.policy.omega == 0.4);
  CHECK(cfg.policy.constraint == PolicyConstraint::MinWageOnly);
  REQUIRE(cfg.policy.t_lo.has_value());
  CHECK(*cfg.policy.t_lo == 1.5);
  CHECK_FALSE(cfg.policy.t_hi.has_value());
  CHECK(cfg.search.grid == 12);
  CHECK(cfg.output.dir == "results");
  CHECK(cfg.output.figures);
  const SearchConfig sc = search_config(cfg);
  CHECK(sc.grid == 12);
  CHECK(sc.refine_evals == 10);
}

TEST_CASE("invalid model parameters surface as configuration errors") {
  RunConfig cfg;
  cfg.model.b = 0.2;
  CHECK_THROWS_AS(build_model(cfg), ConfigError);
  cfg.variant = ModelVariant::QuasilinearExample;
  CHECK(build_model(cfg).is_example());
  RunConfig bad_grid;
  bad_grid.search.grid = 1;
  CHECK_THROWS_AS(search_config(bad_grid), ConfigError);
}
