#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = TEST_SCRATCH_DIR;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Runs the CLI with `args`, optional environment prefix, capturing output.
RunResult run(const std::string& args, const std::string& env = "") {
  fs::create_directories(kScratch);
  const fs::path out = kScratch / "stdout.txt", err = kScratch / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" WAGE_BAND_LAB_EXE "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path fresh(const std::string& name) {
  const fs::path dir = kScratch / name;
  fs::remove_all(dir);
  return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("solve with only a minimum wage at the floor is separating") {
  const fs::path dir = fresh("solve_floor");
  const RunResult r = run("--out " + q(dir) + " solve --t-lo 1");
  REQUIRE(r.code == 0);
  const auto j = read_json(dir / "equilibrium.json");
  CHECK(j["kind"] == "Separating");
  CHECK(j["t_hi"].is_null());
  const auto rows = read_csv(dir / "path.csv");
  REQUIRE(rows.size() > 100);
  CHECK(rows[0] == std::vector<std::string>{"s", "tau", "mu"});
}

TEST_CASE("solve the example model from an ability band") {
  const fs::path dir = fresh("solve_example");
  const RunResult r = run("--out " + q(dir) + " --model example solve --z-lo 0.5 --z-hi 1");
  REQUIRE(r.code == 0);
  const auto j = read_json(dir / "equilibrium.json");
  CHECK(j["kind"] == "WellBehaved");
  CHECK(j["t_lo"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(j["t_hi"].get<double>() == doctest::Approx(5.0).epsilon(1e-9));
  // global flags are accepted after the command too
  const RunResult r2 = run("solve --z-lo 0.5 --z-hi 1 --model example --out " + q(dir));
  CHECK(r2.code == 0);
}

TEST_CASE("configuration errors exit with code 2 and name the problem") {
  const fs::path cfg = kScratch / "bad.ini";
  write_text(cfg, "[model]\na = 0.5\nalpha = 2\n");
  RunResult r = run("--config " + q(cfg) + " --out " + q(fresh("bad")) + " solve --t-lo 1");
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha") != std::string::npos);

  write_text(cfg, "[model]\nb = 0.2\n");
  r = run("--config " + q(cfg) + " --out " + q(fresh("bad")) + " solve --t-lo 1");
  CHECK(r.code == 2);
  CHECK(r.err.find("b must") != std::string::npos);

  CHECK(run("solve --t-lo 1 --z-lo 0.5 --z-hi 1 --out " + q(fresh("bad"))).code == 2);
  CHECK(run("solve --out " + q(fresh("bad"))).code == 2);
  CHECK(run("solve --t-lo 1 --bogus").code == 2);
  CHECK(run("launch").code == 2);
  CHECK(run("--model neither solve --t-lo 1").code == 2);
  CHECK(run("--config /nonexistent/file.ini solve --t-lo 1").code == 2);
  CHECK(run("solve --t-lo 1 --out " + q(fresh("bad")), "WAGE_BAND_LAB_THREADS=abc").code == 2);
  CHECK(run("optimize --omega 1.5 --out " + q(fresh("bad"))).code == 2);
  CHECK(run("sweep --param beta --from 0 --to 1 --out " + q(fresh("bad"))).code == 2);
}

TEST_CASE("solver failures exit with code 1") {
  const RunResult r = run("--out " + q(fresh("fail")) + " solve --t-lo 500");
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("command line overrides the configuration file") {
  const fs::path cfg = kScratch / "override.ini";
  write_text(cfg, "[policy]\nomega = 0.7\n[search]\ngrid = 12\nrefine_evals = 20\n");
  const fs::path a = fresh("override_a"), b = fresh("override_b");
  REQUIRE(run("--config " + q(cfg) + " --out " + q(a) + " optimize").code == 0);
  REQUIRE(run("--config " + q(cfg) + " --out " + q(b) + " optimize --omega 0.3").code == 0);
  CHECK(read_json(a / "optimal_policy.json")["welfare"]["omega"].get<double>() == 0.7);
  CHECK(read_json(b / "optimal_policy.json")["welfare"]["omega"].get<double>() == 0.3);
  CHECK(read_json(b / "optimal_policy.json")["grid"].get<int>() == 12);
}

TEST_CASE("optimize at omega 0.3 gives an interior band") {
  const fs::path dir = fresh("optimize");
  REQUIRE(run("--out " + q(dir) + " optimize --omega 0.3").code == 0);
  const auto j = read_json(dir / "optimal_policy.json");
  const double z_lo = j["band"]["z_lo"], z_hi = j["band"]["z_hi"];
  CHECK(z_lo > 0.0);
  CHECK(z_lo < z_hi);
  CHECK(z_hi < 3.0);
  CHECK(j["kind"] == "WellBehaved");
  CHECK(j["equilibrium"]["kind"] == "WellBehaved");
}

TEST_CASE("sweep over the education contribution") {
  const fs::path dir = fresh("sweep");
  REQUIRE(run("--out " + q(dir) + " --threads 4 sweep --param a --from 0 --to 1 --steps 11 --omega 0.3")
              .code == 0);
  const auto rows = read_csv(dir / "sweep.csv");
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == std::vector<std::string>{"param", "value", "z_lo", "z_hi", "t_lo", "t_hi", "W_full",
                                            "W_minonly", "W_none", "gain_full_pct", "gain_minonly_pct"});
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][2]) >= std::stod(rows[i - 1][2]));
    CHECK(std::stod(rows[i][3]) >= std::stod(rows[i - 1][3]));
  }
  const auto j = read_json(dir / "sweep.json");
  CHECK(j["rows"].size() == 11);
}

TEST_CASE("frontier artifacts and convexity report") {
  const fs::path dir = fresh("frontier");
  REQUIRE(run("--out " + q(dir) + " --threads 2 frontier --grid 40").code == 0);
  CHECK(read_csv(dir / "possibility.csv").size() == 1601);
  CHECK(read_csv(dir / "frontier.csv").size() > 3);
  const auto j = read_json(dir / "frontier.json");
  CHECK(j["convexity_violations"].get<int>() == 0);
  CHECK(j["no_intervention"]["strictly_inside"].get<bool>());
}

TEST_CASE("profile and validate artifacts") {
  const fs::path dir = fresh("profile");
  REQUIRE(run("--out " + q(dir) + " profile --omega 0.3").code == 0);
  for (const char* f : {"utility_profile.csv", "profit_profile.csv", "education_cdf.csv", "wage_cdf.csv",
                        "profile.json"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  CHECK(read_csv(dir / "utility_profile.csv")[0] ==
        std::vector<std::string>{"z", "value_policy", "value_reference"});
  CHECK(read_csv(dir / "wage_cdf.csv")[0] == std::vector<std::string>{"point", "cdf"});
  CHECK(read_json(dir / "profile.json")["utility_crossings"].size() == 2);
  const fs::path vdir = fresh("validate");
  REQUIRE(run("--out " + q(vdir) + " validate").code == 0);
  CHECK(read_json(vdir / "validation.json")["all_passed"].get<bool>());
  REQUIRE(run("--out " + q(vdir) + " --model example validate").code == 0);
}

TEST_CASE("figures are self-contained SVG documents") {
  const fs::path dir = fresh("figures");
  REQUIRE(run("--out " + q(dir) + " --figures profile --omega 0.3").code == 0);
  REQUIRE(run("--out " + q(dir) + " --figures frontier --grid 10 --omegas 5").code == 0);
  REQUIRE(run("--out " + q(dir) + " --figures solve --z-lo 0.5 --z-hi 2").code == 0);
  REQUIRE(run("--out " + q(dir) + " --figures sweep --param rho --from 0 --to 1 --steps 3 --grid 10").code ==
          0);
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".svg") continue;
    ++count;
    const std::string svg = slurp(e.path());
    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    CHECK(svg.find("url(") == std::string::npos);
    CHECK(svg.find("@import") == std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
  }
  CHECK(count >= 8);
  // no figures without the flag
  const fs::path plain = fresh("no_figures");
  REQUIRE(run("--out " + q(plain) + " solve --z-lo 0.5 --z-hi 2").code == 0);
  for (const auto& e : fs::directory_iterator(plain)) CHECK(e.path().extension() != ".svg");
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
  const std::string args = " --figures frontier --grid 16 --omegas 7";
  const fs::path a = fresh("det_a"), b = fresh("det_b"), c = fresh("det_c");
  REQUIRE(run("--out " + q(a) + " --threads 1" + args).code == 0);
  REQUIRE(run("--out " + q(b) + " --threads 6" + args).code == 0);
  REQUIRE(run("--out " + q(c) + args, "WAGE_BAND_LAB_THREADS=3").code == 0);
  for (const char* f : {"possibility.csv", "frontier.csv", "frontier.json", "frontier.svg"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    CHECK_MESSAGE(slurp(a / f) == slurp(c / f), f);
  }
  const std::string sargs = " sweep --param q --from 0.5 --to 1.5 --steps 3 --grid 14 --omega 0.3";
  REQUIRE(run("--out " + q(a) + " --threads 1" + sargs).code == 0);
  REQUIRE(run("--out " + q(b) + " --threads 5" + sargs).code == 0);
  CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
  CHECK(slurp(a / "sweep.json") == slurp(b / "sweep.json"));
  const std::string oargs = " optimize --omega 0.4 --grid 20";
  REQUIRE(run("--out " + q(a) + " --threads 1" + oargs).code == 0);
  REQUIRE(run("--out " + q(b) + " --threads 4" + oargs).code == 0);
  CHECK(slurp(a / "optimal_policy.json") == slurp(b / "optimal_policy.json"));
}
