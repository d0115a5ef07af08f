#pragma once

#include "chainsim/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace chainsim {

inline constexpr const char* kEngineVersion = "chainsim 1.0.0";

/// Raised for malformed or inconsistent run configurations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters shared by all experiments. Experiment-specific knobs stay in
/// `params` and are read through param().
struct RunConfig {
  std::string experiment;
  int num_sites = 0;
  double J = -1.0;
  double u = 1.0;
  std::vector<double> g;
  CouplingRange range = CouplingRange::PowerLaw;
  std::vector<double> times;
  int max_order = 0;
  int workers = 1;
  std::uint64_t seed = 0;
  /// Budget used to cap concurrent workers, in bytes.
  double memory_budget = 4.0e9;
  nlohmann::json params = nlohmann::json::object();

  /// Registry defaults for `experiment`, overridden key by key by `j`.
  /// Physical inputs (J_nn_krad_s with times_us) are converted to Jt here.
  static RunConfig from_json(const std::string& experiment, const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;

  SpinChainModel model(double field) const;

  template <class T>
  T param(const std::string& key, const T& fallback) const {
    return params.contains(key) ? params.at(key).get<T>() : fallback;
  }
};

struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void write_csv(const std::filesystem::path& file) const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  nlohmann::json defaults;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& name);

std::vector<ResultTable> run_experiment(const RunConfig& cfg);

/// One CSV per table plus metadata.json with the resolved config, engine
/// version, wall time and table list.
void write_results(const std::vector<ResultTable>& tables, const RunConfig& cfg,
                   const std::filesystem::path& out_dir, double wall_seconds);

/// Workers allowed by the memory budget for tasks of the given size.
int effective_workers(const RunConfig& cfg, double bytes_per_task);

}  // namespace chainsim
