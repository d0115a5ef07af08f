#include "chainsim/experiments.hpp"
#include "chainsim/linalg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse-field dipolar chain experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List registered experiments");
  auto* run = app.add_subcommand("run", "Run one experiment");
  std::string experiment;
  std::string config_path;
  std::string out_dir = "results";
  int workers = 0;
  run->add_option("experiment", experiment, "Experiment name")->required();
  run->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& e : chainsim::experiment_registry()) {
      std::cout << e.name << "\t" << e.description << "\n";
    }
    return 0;
  }

  try {
    nlohmann::json j;
    {
      std::ifstream is(config_path);
      try {
        j = nlohmann::json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        return fail("config", std::string("cannot parse ") + config_path + ": " + e.what(), 2);
      }
    }
    if (workers > 0) j["workers"] = workers;
    const chainsim::RunConfig cfg = chainsim::RunConfig::from_json(experiment, j);
    const auto start = std::chrono::steady_clock::now();
    const auto tables = chainsim::run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    chainsim::write_results(tables, cfg, out_dir, wall);
    std::cout << nlohmann::json{{"status", "ok"}, {"experiment", cfg.experiment}, {"out", out_dir},
                                {"tables", tables.size()}, {"wall_time_seconds", wall}}
                     .dump()
              << "\n";
    return 0;
  } catch (const chainsim::ResourceGuardError& e) {
    return fail("resource_guard", e.what(), 3);
  } catch (const chainsim::ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
}
