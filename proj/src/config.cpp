#include "wageband/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "wageband/errors.hpp"
#include "wageband/io.hpp"

namespace wageband {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& section, const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || text.empty())
    throw ConfigError("[" + section + "] '" + key + "': '" + text + "' is not a number");
  return v;
}

int parse_int(const std::string& section, const std::string& key, const std::string& text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw ConfigError("[" + section + "] '" + key + "': '" + text + "' is not an integer");
  return v;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("[" + section + "] '" + key + "': '" + text + "' is not a boolean");
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
}

}  // namespace

IniDocument parse_ini(std::istream& in, const std::string& source) {
  IniDocument doc;
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = source + ":" + std::to_string(number);
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError(where + ": malformed section header '" + t + "'");
      section = trim(t.substr(1, t.size() - 2));
      doc.sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + t + "'");
    if (section.empty()) throw ConfigError(where + ": key outside of any [section]");
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    const auto hash = value.find_first_of("#;");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw ConfigError(where + ": empty key");
    auto& sec = doc.sections[section];
    if (sec.count(key)) throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
    sec[key] = value;
  }
  return doc;
}

ModelParams model_params_from_section(const std::map<std::string, std::string>& section,
                                      ModelParams p) {
  const std::string name = "model";
  for (const auto& [key, value] : section) {
    if (key == "a") p.a = parse_double(name, key, value);
    else if (key == "b") p.b = parse_double(name, key, value);
    else if (key == "q") p.q = parse_double(name, key, value);
    else if (key == "rho") p.rho = parse_double(name, key, value);
    else if (key == "beta") p.beta = parse_double(name, key, value);
    else if (key == "A") p.A = parse_double(name, key, value);
    else if (key == "k") p.k = parse_double(name, key, value);
    else if (key == "t_floor") p.t_floor = parse_double(name, key, value);
    else if (key == "z_min") p.z_min = parse_double(name, key, value);
    else if (key == "z_max") p.z_max = parse_double(name, key, value);
    else if (key == "ability_law") {
      try {
        p.ability_law = ability_law_from_string(value);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("[model] ability_law: ") + e.what());
      }
    } else
      unknown_key(name, key);
  }
  return p;
}

std::string model_params_to_ini(const ModelParams& p) {
  std::ostringstream os;
  os << "[model]\n";
  os << "a = " << io::format_number(p.a) << "\n";
  os << "b = " << io::format_number(p.b) << "\n";
  os << "q = " << io::format_number(p.q) << "\n";
  os << "rho = " << io::format_number(p.rho) << "\n";
  os << "beta = " << io::format_number(p.beta) << "\n";
  os << "A = " << io::format_number(p.A) << "\n";
  os << "k = " << io::format_number(p.k) << "\n";
  os << "t_floor = " << io::format_number(p.t_floor) << "\n";
  os << "z_min = " << io::format_number(p.z_min) << "\n";
  os << "z_max = " << io::format_number(p.z_max) << "\n";
  os << "ability_law = " << to_string(p.ability_law) << "\n";
  return os.str();
}

void apply_ini(RunConfig& cfg, const IniDocument& doc) {
  for (const auto& [section, entries] : doc.sections) {
    if (section == "model") {
      cfg.model = model_params_from_section(entries, cfg.model);
    } else if (section == "policy") {
      for (const auto& [key, value] : entries) {
        if (key == "omega") cfg.policy.omega = parse_double(section, key, value);
        else if (key == "constraint") {
          try {
            cfg.policy.constraint = policy_constraint_from_string(value);
          } catch (const DomainError& e) {
            throw ConfigError(std::string("[policy] constraint: ") + e.what());
          }
        } else if (key == "t_lo") cfg.policy.t_lo = parse_double(section, key, value);
        else if (key == "t_hi") cfg.policy.t_hi = parse_double(section, key, value);
        else if (key == "z_lo") cfg.policy.z_lo = parse_double(section, key, value);
        else if (key == "z_hi") cfg.policy.z_hi = parse_double(section, key, value);
        else unknown_key(section, key);
      }
    } else if (section == "search") {
      for (const auto& [key, value] : entries) {
        if (key == "grid") cfg.search.grid = parse_int(section, key, value);
        else if (key == "refine_evals") cfg.search.refine_evals = parse_int(section, key, value);
        else if (key == "rel_tol") cfg.search.rel_tol = parse_double(section, key, value);
        else if (key == "abs_tol") cfg.search.abs_tol = parse_double(section, key, value);
        else if (key == "bottom_offset") cfg.search.bottom_offset = parse_double(section, key, value);
        else if (key == "profile_points") cfg.search.profile_points = parse_int(section, key, value);
        else if (key == "frontier_grid") cfg.search.frontier_grid = parse_int(section, key, value);
        else if (key == "frontier_omegas") cfg.search.frontier_omegas = parse_int(section, key, value);
        else unknown_key(section, key);
      }
    } else if (section == "output") {
      for (const auto& [key, value] : entries) {
        if (key == "dir") cfg.output.dir = value;
        else if (key == "figures") cfg.output.figures = parse_bool(section, key, value);
        else unknown_key(section, key);
      }
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }
  }
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
  apply_ini(base, parse_ini(in, path.string()));
  return base;
}

Model build_model(const RunConfig& cfg) {
  if (cfg.variant == ModelVariant::QuasilinearExample) return Model::quasilinear_example();
  try {
    return Model::parametric(cfg.model);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }
}

PathOptions path_options(const RunConfig& cfg) {
  PathOptions o;
  o.rel_tol = cfg.search.rel_tol;
  o.abs_tol = cfg.search.abs_tol;
  o.bottom_offset = cfg.search.bottom_offset;
  return o;
}

SearchConfig search_config(const RunConfig& cfg) {
  if (cfg.search.grid < 2) throw ConfigError("[search] grid must be at least 2");
  if (cfg.search.refine_evals < 0) throw ConfigError("[search] refine_evals must be non-negative");
  if (!(cfg.search.rel_tol > 0.0) || !(cfg.search.abs_tol > 0.0))
    throw ConfigError("[search] tolerances must be positive");
  if (!(cfg.search.bottom_offset > 0.0)) throw ConfigError("[search] bottom_offset must be positive");
  SearchConfig s;
  s.grid = cfg.search.grid;
  s.refine_evals = cfg.search.refine_evals;
  s.threads = std::max(cfg.threads, 1);
  s.path = path_options(cfg);
  return s;
}

}  // namespace wageband
