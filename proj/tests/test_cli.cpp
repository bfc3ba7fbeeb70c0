// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "anisolab/scenarios.hpp"

using namespace anisolab;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("anisolab_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path config_dir() { return fs::path(ANISOLAB_CONFIG_DIR); }

// last field of the first data row of a CSV with a trailing status column
std::vector<std::string> split_csv_row(const std::string& text, int row) {
  std::vector<std::string> lines;
  std::string line;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(line);
      line.clear();
    } else {
      line += ch;
    }
  }
  REQUIRE(static_cast<int>(lines.size()) > row);
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : lines[row]) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("config validation happens before any compute", "[cli]") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config("{\"scenario\": \"no-such\"}"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config("{\"scenario\": \"solve-elliptic\", \"bogus\": 1}"),
                  ConfigInvalid);

  ScenarioConfig empty_sweep =
      parse_config("{\"scenario\": \"solve-elliptic\", \"sweep.t\": []}");
  CHECK_THROWS_AS(validate(empty_sweep), ConfigInvalid);

  ScenarioConfig odd_grid =
      parse_config("{\"scenario\": \"solve-elliptic\", \"grid.sizes\": [15]}");
  CHECK_THROWS_AS(validate(odd_grid), ConfigInvalid);

  ScenarioConfig endpoint_mu = parse_config(
      "{\"scenario\": \"check-embedding\", \"exponents.p\": [1.0], \"exponents.q\": [2.0],"
      " \"problem.l\": [2], \"problem.alpha\": [1], \"sweep.mu\": [0.0]}");
  CHECK_THROWS_AS(validate(endpoint_mu), ConfigInvalid);
}

TEST_CASE("invalid configs leave no output behind", "[cli]") {
  const fs::path dir = fresh_dir("invalid");
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << "{\"scenario\": \"solve-elliptic\", \"sweep.lambda\": []}";
  CHECK_THROWS_AS(run_scenario(cfg, dir / "out"), ConfigInvalid);
  CHECK_FALSE(fs::exists(dir / "out" / "solve-elliptic.csv"));
}

TEST_CASE("golden elliptic model reproduces the hand constant", "[cli]") {
  const fs::path dir = fresh_dir("golden");
  const RunResult result = run_scenario(config_dir() / "elliptic_model.json", dir);
  const std::string csv = slurp(result.csv);

  const std::vector<std::string> header = split_csv_row(csv, 0);
  REQUIRE(header.size() == 8);
  CHECK(header[6] == "empirical_constant");

  const std::vector<std::string> row = split_csv_row(csv, 1);
  CHECK_THAT(std::stod(row[6]), WithinAbs(4.0 / 3.0, 1e-6));
  CHECK(row[7] == "ok");

  const std::string meta = slurp(result.meta);
  CHECK(meta.find("\"seed\": 1") != std::string::npos);
  CHECK(meta.find("elliptic_model.csv") != std::string::npos);
}

TEST_CASE("reruns are byte identical", "[cli]") {
  for (const char* name : {"elliptic_model.json", "embedding.json", "interp.json"}) {
    const fs::path a = fresh_dir(std::string("rerun_a_") + name);
    const fs::path b = fresh_dir(std::string("rerun_b_") + name);
    const RunResult ra = run_scenario(config_dir() / name, a);
    const RunResult rb = run_scenario(config_dir() / name, b);
    CHECK(slurp(ra.csv) == slurp(rb.csv));
    CHECK(slurp(ra.meta) == slurp(rb.meta));
  }
}

TEST_CASE("threaded sweeps match the serial rows", "[cli]") {
  const fs::path a = fresh_dir("threads_1");
  const fs::path b = fresh_dir("threads_4");
  const RunResult ra = run_scenario(config_dir() / "embedding.json", a, std::nullopt, 1);
  const RunResult rb = run_scenario(config_dir() / "embedding.json", b, std::nullopt, 4);
  CHECK(slurp(ra.csv) == slurp(rb.csv));
}

TEST_CASE("seed override lands in the metadata", "[cli]") {
  const fs::path dir = fresh_dir("seeded");
  const RunResult result =
      run_scenario(config_dir() / "interp.json", dir, std::uint64_t{42});
  CHECK(slurp(result.meta).find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("embedding reports flag inadmissible power weights", "[cli]") {
  const std::string base =
      "{\"scenario\": \"check-embedding\", \"grid.sizes\": [16],"
      " \"operator.diag\": [1.0], \"problem.l\": [2], \"problem.alpha\": [1],"
      " \"sweep.mu\": [0.25], \"field.kind\": \"random\", \"field.count\": 1,"
      " \"weight.kind\": \"power\", \"weight.exponents\": [EXP]}";
  const fs::path dir = fresh_dir("ap_flag");

  const auto run_with = [&](const std::string& exponent, const std::string& tag) {
    std::string text = base;
    text.replace(text.find("EXP"), 3, exponent);
    const fs::path cfg = dir / (tag + ".json");
    std::ofstream(cfg) << text;
    return slurp(run_scenario(cfg, dir / tag).meta);
  };

  const std::string good = run_with("0.5", "good");
  CHECK(good.find("\"ap_divergent\": 0.0") != std::string::npos);
  const std::string bad = run_with("3.0", "bad");
  CHECK(bad.find("\"ap_divergent\": 1.0") != std::string::npos);
}

TEST_CASE("scenario listing is fixed", "[cli]") {
  const auto& names = scenario_names();
  REQUIRE(names.size() == 7);
  CHECK(names.front() == "solve-elliptic");
  CHECK(names.back() == "check-degenerate");
}

TEST_CASE("every shipped config validates", "[cli]") {
  for (const auto& entry : fs::directory_iterator(config_dir())) {
    if (entry.path().extension() != ".json") continue;
    const std::string text = slurp(entry.path());
    CHECK_NOTHROW(validate(parse_config(text)));
  }
}
