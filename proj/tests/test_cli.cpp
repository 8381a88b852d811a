#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "levy/config.hpp"
#include "levy/demand_distribution.hpp"

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_file(const std::string& stem) {
  static int counter = 0;
  return fs::temp_directory_path() /
         ("levy_cli_" + stem + "_" + std::to_string(::getpid()) + "_" +
          std::to_string(counter++));
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path out_path = scratch_file("stdout");
  const fs::path err_path = scratch_file("stderr");
  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += std::string("\"") + LEVY_CLI_PATH + "\" " + args + " > " +
         out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

fs::path write_config(const std::string& stem, const std::string& text) {
  const fs::path path = scratch_file(stem + ".json");
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

// Mixed model kept small so shelling out stays cheap.
const char* kMixed = R"({
  "model": {"drift": 1.0, "unit_jump_size": 0.5, "unit_jump_rate": 2.0,
            "compound_rate": 1.5,
            "jump": {"kind": "exponential", "rate": 2.0}},
  "policy": {"initial_stock": 6.0, "reorder_offset": 2.0, "order_quantity": 3.0},
  "rates": {"ordering": 2.5, "holding": 0.7, "stockout": 1.3},
  "mc": {"paths": 2000, "horizon": 2.0, "seed": 123}
})";

const char* kDriftOnly = R"({
  "model": {"drift": 2.0, "unit_jump_size": 0.0, "unit_jump_rate": 0.0,
            "compound_rate": 0.0},
  "policy": {"initial_stock": 5.0, "reorder_offset": 1.0, "order_quantity": 4.0},
  "rates": {"ordering": 3.0, "holding": 1.0, "stockout": 2.0},
  "mc": {"paths": 500, "horizon": 2.0, "seed": 9}
})";

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

TEST_CASE("moments emits the documented csv and a self-consistent verdict") {
  const fs::path cfg = write_config("moments", kDriftOnly);
  const CliResult r = run_cli("moments " + cfg.string());
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "quantity,n,closed_form,mc_mean,mc_std_error,mc_ci_low,mc_ci_high,verdict");
  const auto mean_row = split_csv(lines[1]);
  const auto var_row = split_csv(lines[2]);
  REQUIRE(mean_row.size() == 8);
  CHECK(mean_row[0] == "mean");
  CHECK(mean_row[1] == "1");
  // deterministic drift crossing: closed form and every path agree exactly
  CHECK(std::stod(mean_row[2]) == 0.5);
  CHECK(std::stod(mean_row[3]) == 0.5);
  CHECK(std::stod(mean_row[4]) == 0.0);
  CHECK(mean_row[7] == "within_ci");
  CHECK(var_row[0] == "variance");
  CHECK(std::stod(var_row[2]) == 0.0);
  CHECK(var_row[7] == "within_ci");
  fs::remove(cfg);
}

TEST_CASE("tail csv series column matches the library value bit for bit") {
  const fs::path cfg = write_config("tail", kMixed);
  const CliResult r = run_cli("tail " + cfg.string() + " --s 1.2 --b 3.0");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "s,b,series,mc_mean,mc_std_error,mc_ci_low,mc_ci_high,verdict");
  const auto row = split_csv(lines[1]);
  REQUIRE(row.size() == 8);
  const levy::RunConfig parsed = levy::parse_config(kMixed);
  const double want = levy::demand_tail(parsed.model, 1.2, 3.0, parsed.series);
  CHECK(std::stod(row[2]) == want);
  CHECK((row[7] == "within_ci" || row[7] == "outside_ci"));
  fs::remove(cfg);
}

TEST_CASE("cost csv carries the four components and total recomposes") {
  const fs::path cfg = write_config("cost", kMixed);
  const CliResult r = run_cli("cost " + cfg.string());
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "component,t,analytic,mc_mean,mc_std_error,mc_ci_low,mc_ci_high");
  const char* names[] = {"ordering", "holding", "stockout", "total"};
  double analytic[4] = {};
  double mc_mean[4] = {};
  for (int i = 0; i < 4; ++i) {
    const auto row = split_csv(lines[1 + i]);
    REQUIRE(row.size() == 7);
    CHECK(row[0] == names[i]);
    CHECK(std::stod(row[1]) == 2.0);
    analytic[i] = std::stod(row[2]);
    mc_mean[i] = std::stod(row[3]);
  }
  CHECK(analytic[3] == doctest::Approx(analytic[0] + analytic[1] + analytic[2])
                           .epsilon(1e-12));
  CHECK(mc_mean[3] == doctest::Approx(mc_mean[0] + mc_mean[1] + mc_mean[2])
                          .epsilon(1e-12));
  fs::remove(cfg);
}

TEST_CASE("longrun reports the drift-only limit exactly") {
  const fs::path cfg = write_config("longrun", kDriftOnly);
  const CliResult r = run_cli("longrun " + cfg.string() + " --checkpoints 5,20");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "t,average_cost_per_time,long_run_limit");
  for (int i = 1; i <= 2; ++i) {
    const auto row = split_csv(lines[i]);
    REQUIRE(row.size() == 3);
    // ordering 3 * rate 2 + holding 1 * stock 5
    CHECK(row[2] == "11");
    CHECK(std::isfinite(std::stod(row[1])));
  }
  CHECK(split_csv(lines[1])[0] == "5");
  CHECK(split_csv(lines[2])[0] == "20");
  fs::remove(cfg);
}

TEST_CASE("simulate dumps legal per-path events") {
  const fs::path cfg = write_config("simulate", kMixed);
  const CliResult r = run_cli("simulate " + cfg.string() + " --paths 3 --t 4.0");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "path_id,time,jump_size,source");
  double prev_time = 0.0;
  int prev_path = -1;
  int unit_rows = 0, compound_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto row = split_csv(lines[i]);
    REQUIRE(row.size() == 4);
    const int path = std::stoi(row[0]);
    const double time = std::stod(row[1]);
    const double size = std::stod(row[2]);
    CHECK(path >= 0);
    CHECK(path <= 2);
    if (path != prev_path) {
      prev_path = path;
      prev_time = 0.0;
    }
    CHECK(time > prev_time);
    CHECK(time <= 4.0);
    prev_time = time;
    if (row[3] == "unit_jump") {
      CHECK(size == 0.5);
      ++unit_rows;
    } else {
      CHECK(row[3] == "compound_jump");
      CHECK(size > 0.0);
      ++compound_rows;
    }
  }
  CHECK(unit_rows > 0);
  CHECK(compound_rows > 0);
  fs::remove(cfg);
}

TEST_CASE("sweep prints one row per cell plus an argmin trailer") {
  const fs::path cfg = write_config("sweep", kDriftOnly);
  const CliResult r =
      run_cli("sweep " + cfg.string() + " --grid-a 1,2 --grid-q 3 --t 5.0");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "a,Q,t,ordering,holding,stockout,total");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 2; ++i) {
    const auto row = split_csv(lines[i]);
    REQUIRE(row.size() == 7);
    CHECK(std::stod(row[2]) == 5.0);
    best = std::min(best, std::stod(row[6]));
  }
  CHECK(lines[3].rfind("# argmin a=", 0) == 0);
  const std::string total_tag = " total=";
  const auto pos = lines[3].find(total_tag);
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(lines[3].substr(pos + total_tag.size())) == best);
  fs::remove(cfg);
}

TEST_CASE("json output mirrors csv values and parses cleanly") {
  const fs::path cfg = write_config("json", kMixed);
  const CliResult csv = run_cli("tail " + cfg.string() + " --s 1.2 --b 3.0");
  const CliResult json =
      run_cli("tail " + cfg.string() + " --s 1.2 --b 3.0 --format json");
  REQUIRE(csv.exit_code == 0);
  REQUIRE(json.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(json.out);
  CHECK(doc["subcommand"] == "tail");
  CHECK(doc["s"] == 1.2);
  CHECK(doc["b"] == 3.0);
  const auto row = split_csv(lines_of(csv.out)[1]);
  CHECK(doc["series"].get<double>() == std::stod(row[2]));
  CHECK(doc["mc"]["mean"].get<double>() == std::stod(row[3]));
  CHECK(doc["mc"]["paths"] == 2000);
  CHECK(doc["verdict"] == row[7]);

  const CliResult m = run_cli("moments " + cfg.string() + " --format json");
  REQUIRE(m.exit_code == 0);
  const nlohmann::json mdoc = nlohmann::json::parse(m.out);
  CHECK(mdoc["subcommand"] == "moments");
  CHECK(mdoc["closed_form"].contains("variance"));
  CHECK(mdoc["verdict"].contains("mean"));
  fs::remove(cfg);
}

TEST_CASE("repeat runs and different worker counts produce identical bytes") {
  const fs::path cfg = write_config("det", kMixed);
  const std::string cmd = "cost " + cfg.string();
  const CliResult a = run_cli(cmd, "LEVY_INVENTORY_THREADS=1");
  const CliResult b = run_cli(cmd, "LEVY_INVENTORY_THREADS=1");
  const CliResult c = run_cli(cmd, "LEVY_INVENTORY_THREADS=7");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const CliResult d = run_cli(cmd + " --seed 777", "LEVY_INVENTORY_THREADS=1");
  REQUIRE(d.exit_code == 0);
  CHECK(d.out != a.out);
  fs::remove(cfg);
}

TEST_CASE("--out writes the same bytes to a file and keeps stdout quiet") {
  const fs::path cfg = write_config("outfile", kMixed);
  const fs::path artifact = scratch_file("artifact.csv");
  const CliResult direct = run_cli("tail " + cfg.string() + " --s 1.0 --b 2.0");
  const CliResult filed = run_cli("tail " + cfg.string() + " --s 1.0 --b 2.0 --out " +
                                  artifact.string());
  REQUIRE(direct.exit_code == 0);
  REQUIRE(filed.exit_code == 0);
  CHECK(filed.out.empty());
  CHECK(slurp(artifact) == direct.out);
  fs::remove(artifact);
  fs::remove(cfg);
}

TEST_CASE("--paths override reaches the estimator") {
  const fs::path cfg = write_config("paths", kMixed);
  const CliResult r =
      run_cli("tail " + cfg.string() + " --s 1.0 --b 2.0 --paths 500 --format json");
  REQUIRE(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.out)["mc"]["paths"] == 500);
  fs::remove(cfg);
}

TEST_CASE("validation failures exit 1 with a stderr diagnostic") {
  const fs::path cfg = write_config("valid", kMixed);
  SUBCASE("missing config file") {
    const CliResult r = run_cli("moments /nonexistent/levy.json");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error (validation)") != std::string::npos);
    CHECK(r.out.empty());
  }
  SUBCASE("unparsable config") {
    const fs::path bad = write_config("badjson", "{nope");
    const CliResult r = run_cli("moments " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("not valid JSON") != std::string::npos);
    fs::remove(bad);
  }
  SUBCASE("unknown config key") {
    nlohmann::json doc = nlohmann::json::parse(kMixed);
    doc["mc"]["pathz"] = 3;
    const fs::path bad = write_config("badkey", doc.dump());
    const CliResult r = run_cli("moments " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("mc.pathz") != std::string::npos);
    fs::remove(bad);
  }
  SUBCASE("missing required flag") {
    const CliResult r = run_cli("tail " + cfg.string() + " --s 1.0");
    CHECK(r.exit_code == 1);
  }
  SUBCASE("unknown subcommand") {
    const CliResult r = run_cli("frobnicate " + cfg.string());
    CHECK(r.exit_code == 1);
  }
  SUBCASE("bad override values") {
    CHECK(run_cli("moments " + cfg.string() + " --paths 50").exit_code == 1);
    CHECK(run_cli("moments " + cfg.string() + " --t 0").exit_code == 1);
    CHECK(run_cli("moments " + cfg.string() + " --format xml").exit_code == 1);
    CHECK(run_cli("moments " + cfg.string() + " --n 0").exit_code == 1);
  }
  SUBCASE("json mode reports errors as a machine-readable object") {
    const CliResult r = run_cli("moments /nonexistent/levy.json --format json");
    CHECK(r.exit_code == 1);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["error"]["code"] == "validation");
    CHECK(doc["error"]["message"].is_string());
  }
  fs::remove(cfg);
}

TEST_CASE("series caps exit 2 with the series_cap code") {
  nlohmann::json doc = nlohmann::json::parse(kMixed);
  doc["model"]["compound_rate"] = 40.0;
  doc["series"] = {{"max_compound_index", 2}};
  doc["mc"] = {{"paths", 200}, {"horizon", 2.0}};
  const fs::path cfg = write_config("cap", doc.dump());
  const CliResult r = run_cli("tail " + cfg.string() + " --s 2.0 --b 90.0");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error (series_cap)") != std::string::npos);
  fs::remove(cfg);
}
