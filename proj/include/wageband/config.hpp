#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "wageband/model.hpp"
#include "wageband/optimizer.hpp"

namespace wageband {

/// Flat INI document: [section] headers, `key = value` lines, `#`/`;` comments.
struct IniDocument {
  std::map<std::string, std::map<std::string, std::string>> sections;
};

/// Throws ConfigError (with source and line) on malformed input.
IniDocument parse_ini(std::istream& in, const std::string& source = "<config>");

struct PolicySettings {
  double omega = 0.3;
  PolicyConstraint constraint = PolicyConstraint::Full;
  std::optional<double> t_lo, t_hi, z_lo, z_hi;
};

struct SearchSettings {
  int grid = 60;
  int refine_evals = 200;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double bottom_offset = 1e-4;
  int profile_points = 600;
  int frontier_grid = 40;
  int frontier_omegas = 21;
};

struct OutputSettings {
  std::string dir = "out";
  bool figures = false;
};

struct RunConfig {
  ModelVariant variant = ModelVariant::Parametric;
  ModelParams model{};
  PolicySettings policy{};
  SearchSettings search{};
  OutputSettings output{};
  int threads = 1;
};

/// Reads the [model] section. Every key must be one of a, b, q, rho, beta,
/// A, k, t_floor, z_min, z_max, ability_law; unknown keys raise ConfigError
/// naming the key. Missing keys keep their value in `base`.
ModelParams model_params_from_section(const std::map<std::string, std::string>& section,
                                      ModelParams base = {});
/// [model] section text for `params` (round-trips through model_params_from_section).
std::string model_params_to_ini(const ModelParams& params);

/// Applies every section of `doc` onto `config`; unknown sections or keys
/// raise ConfigError naming them.
void apply_ini(RunConfig& config, const IniDocument& doc);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Builds the model named by the run configuration; parameter violations
/// surface as ConfigError.
Model build_model(const RunConfig& config);
SearchConfig search_config(const RunConfig& config);
PathOptions path_options(const RunConfig& config);

}  // namespace wageband
