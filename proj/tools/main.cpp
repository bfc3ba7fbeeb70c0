// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "anisolab/scenarios.hpp"
#include "anisolab/version.hpp"

#include <unistd.h>

namespace {

bool color_allowed() {
  return isatty(fileno(stderr)) && std::getenv("NO_COLOR") == nullptr;
}

void diagnostic(const std::string& message) {
  if (color_allowed())
    std::cerr << "\033[31merror:\033[0m " << message << "\n";
  else
    std::cerr << "error: " << message << "\n";
}

void emit_record(const std::string& status, const std::string& type,
                 const std::string& message) {
  nlohmann::json record;
  record["status"] = status;
  if (!type.empty()) record["type"] = type;
  if (!message.empty()) record["message"] = message;
  std::cout << record.dump() << "\n";
}

int fail_with(const std::string& type, const std::string& message, int code) {
  diagnostic(message);
  emit_record("error", type, message);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisolab: spectral solver and estimate-verification lab"};
  app.set_version_flag("--version", anisolab::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  CLI::App* run = app.add_subcommand("run", "execute a scenario configuration");
  run->add_option("--config", config_path, "JSON configuration file")->required();
  run->add_option("--out", out_dir, "output directory (default: current)");
  run->add_option("--seed", seed, "override the configured seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  run->add_option("--threads", threads, "worker threads for sweep cells")
      ->check(CLI::PositiveNumber);

  CLI::App* list = app.add_subcommand("list-scenarios", "print the known scenario names");

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a configuration file");
  validate_cmd->add_option("--config", validate_path, "JSON configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const std::string& name : anisolab::scenario_names()) std::cout << name << "\n";
      return 0;
    }
    if (validate_cmd->parsed()) {
      std::ifstream in(validate_path, std::ios::binary);
      if (!in) throw anisolab::ConfigInvalid("cannot read config file '" + validate_path + "'");
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      anisolab::validate(anisolab::parse_config(text));
      emit_record("ok", "", "");
      return 0;
    }
    const anisolab::RunResult result = anisolab::run_scenario(
        config_path, out_dir,
        seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt, threads);
    nlohmann::json record;
    record["status"] = "ok";
    record["csv"] = result.csv.string();
    record["meta"] = result.meta.string();
    std::cout << record.dump() << "\n";
    return 0;
  } catch (const anisolab::ConfigInvalid& e) {
    return fail_with("ConfigInvalid", e.what(), 2);
  } catch (const anisolab::Error& e) {
    return fail_with("Error", e.what(), 1);
  } catch (const std::exception& e) {
    return fail_with("Internal", e.what(), 1);
  }
}
