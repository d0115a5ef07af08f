#include "chainsim/experiments.hpp"
#include "chainsim/pauli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chainsim;
using nlohmann::json;

namespace {

std::vector<ResultTable> run(const std::string& name, const json& j) {
  return run_experiment(RunConfig::from_json(name, j));
}

const ResultTable& table(const std::vector<ResultTable>& t, const std::string& name) {
  for (const auto& x : t) {
    if (x.name == name) return x;
  }
  throw std::runtime_error("missing table " + name);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Experiments, RegistryAndDefaults) {
  EXPECT_EQ(experiment_registry().size(), 10u);
  const RunConfig c = RunConfig::from_json("fig1a", json::object());
  EXPECT_EQ(c.num_sites, 12);
  EXPECT_EQ(c.g, (std::vector<double>{0.25, 1.0}));
  ASSERT_EQ(c.times.size(), 101u);
  EXPECT_NEAR(c.times.back(), 10.0, 1e-12);
  const RunConfig o = RunConfig::from_json("fig1a", json{{"L", 6}, {"g", 0.5}, {"times", {1.0, 2.0}}, {"extra", 3}});
  EXPECT_EQ(o.num_sites, 6);
  EXPECT_EQ(o.g, std::vector<double>{0.5});
  EXPECT_EQ(o.times, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(o.param("extra", 0), 3);
  EXPECT_FALSE(o.params.contains("L"));
  const RunConfig named = RunConfig::from_json("", json{{"experiment", "fig2"}, {"L", 4}});
  EXPECT_EQ(named.experiment, "fig2");
}

TEST(Experiments, ConfigErrors) {
  EXPECT_THROW(RunConfig::from_json("nope", json::object()), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json::array()), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"L", "x"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"L", 1}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"g", json::array()}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"workers", 0}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"range", "long"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"times", {{"stop", 1.0}, {"step", -1.0}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json("fig1a", json{{"L", 20}}), ResourceGuardError);
}

TEST(Experiments, PhysicalTimeUnits) {
  const RunConfig c =
      RunConfig::from_json("fig1a", json{{"L", 4}, {"times_us", {96.0}}, {"J_nn_krad_s", -33.0}, {"u_sequence", 0.2}});
  ASSERT_EQ(c.times.size(), 1u);
  EXPECT_NEAR(c.times[0], 0.6336, 1e-12);
}

TEST(Experiments, TablesAreRectangularAndDeterministic) {
  const json j{{"L", 5}, {"g", {0.5, 2.0}}, {"times", {0.0, 1.0, 2.0}}};
  const auto a = run("fig1a", j);
  const auto b = run("fig1a", j);
  const auto& t = table(a, "two_point");
  EXPECT_EQ(t.rows.size(), 6u);
  for (const auto& r : t.rows) EXPECT_EQ(r.size(), t.columns.size());
  EXPECT_EQ(t.rows, table(b, "two_point").rows);
  // equal-time correlators are normalized
  EXPECT_NEAR(t.rows[0][2], 1.0, 1e-12);
  EXPECT_NEAR(t.rows[0][3], 1.0, 1e-12);
  json threaded = j;
  threaded["workers"] = 2;
  EXPECT_EQ(table(run("fig1a", threaded), "two_point").rows, t.rows);
}

TEST(Experiments, WritesCsvAndMetadata) {
  const auto dir = std::filesystem::temp_directory_path() / "chainsim_experiments_test";
  std::filesystem::remove_all(dir);
  const RunConfig c = RunConfig::from_json("fig1a", json{{"L", 4}, {"g", 1.0}, {"times", {0.0, 0.5}}});
  write_results(run_experiment(c), c, dir, 0.25);
  const std::string csv = read_file(dir / "fig1a_two_point.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "g,Jt,zz,yy");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const json meta = json::parse(read_file(dir / "fig1a_metadata.json"));
  EXPECT_EQ(meta.at("engine_version"), kEngineVersion);
  EXPECT_EQ(meta.at("config").at("L"), 4);
  EXPECT_EQ(meta.at("tables").at(0).at("rows"), 2);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, SmallRunsOfEveryExperiment) {
  const json tiny{{"L", 4}, {"g", {1.0}}, {"times", {0.0, 1.0, 2.0}}};
  const auto f1 = run("fig1bc", tiny);
  EXPECT_EQ(table(f1, "c_yz_vs_field").rows.size(), 1u);
  EXPECT_EQ(table(f1, "c_yz_vs_time").rows.size(), 3u);
  const auto f2 = table(run("fig2", json{{"L", 4}, {"g", {0.1, 3.0}}, {"times", {0.0, 1.0, 2.0}}}), "time_averaged");
  ASSERT_EQ(f2.rows.size(), 2u);
  EXPECT_FALSE(std::isnan(f2.rows[0][5]));

  const auto f3 = run("fig3a", json{{"L", 5}, {"g", {2.0}}, {"max_order", 3}});
  EXPECT_EQ(table(f3, "eigenvalue_difference").rows.size(), 3u);
  EXPECT_EQ(table(f3, "optimal_order").rows.size(), 1u);

  const auto h = run("fig3bcd", json{{"L", 4}, {"g", {5.0}}, {"times", {1.0}}});
  const auto& weights = table(h, "hamming");
  double total = 0.0;
  for (const auto& r : weights.rows) total += r[3];
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_EQ(table(h, "hamming_summary").rows.size(), 1u);

  json decay{{"L", 4}, {"g", {1.0, 1.5, 2.0, 3.0}}, {"times", {{"start", 0.0}, {"stop", 10.0}, {"step", 0.05}}}};
  const auto d = run("sm-decay", decay);
  EXPECT_EQ(table(d, "decay_fits").rows.size(), 4u);
  EXPECT_EQ(table(d, "decay_trend").rows.size(), 1u);

  EXPECT_EQ(table(run("sm-otoc-sim", tiny), "otoc_panels").rows.size(), 1u);
  EXPECT_FALSE(table(run("sm-locality", json{{"L", 4}, {"g", {2.0}}, {"max_order", 2}}), "generator_locality").rows.empty());
  EXPECT_EQ(table(run("sm-prexx", json{{"L", 5}, {"g", {1.0}}, {"max_order", 2}}), "eigenvalue_difference").rows.size(), 2u);

  const auto fl = run("floquet", json{{"L", 3}, {"n_cycles", 2}, {"taus", {0.05, 0.1}}, {"phase_fields", {1e-3}}});
  const auto& avg = table(fl, "average_hamiltonian");
  ASSERT_EQ(avg.rows.size(), 2u);
  EXPECT_NEAR(avg.rows[0][4], 0.2, 1e-12);
  EXPECT_NEAR(avg.rows[1][4], -0.2, 1e-12);
  EXPECT_EQ(table(fl, "cycle_defect").rows.size(), 2u);
}

TEST(Experiments, CustomFloquetSequence) {
  json seq{{"delays", {0.1, 0.2, 0.1}}, {"pulses", {{{"phase_deg", 0.0}}, {{"phase_deg", 180.0}}}}};
  const auto fl = run("floquet", json{{"L", 3}, {"n_cycles", 1}, {"taus", {0.05}}, {"phase_fields", {1e-3}}, {"sequence", seq}});
  const auto& c = table(fl, "custom_sequence");
  ASSERT_EQ(c.rows.size(), 1u);
  EXPECT_NEAR(c.rows[0][0], 0.4, 1e-12);
  EXPECT_LT(c.rows[0][4], 1e-12);
  json bad{{"delays", {0.1}}, {"pulses", {{{"phase_deg", 0.0}}}}};
  EXPECT_THROW(run("floquet", json{{"L", 3}, {"sequence", bad}}), ConfigError);
}

TEST(Experiments, WorkerBudget) {
  RunConfig c = RunConfig::from_json("fig1a", json{{"L", 4}, {"workers", 8}});
  c.memory_budget = 1e9;
  EXPECT_EQ(effective_workers(c, 4e8), 2);
  EXPECT_EQ(effective_workers(c, 1e10), 1);
  EXPECT_EQ(effective_workers(c, 1.0), 8);
}

TEST(Experiments, SeriesDumpRoundTrips) {
  const auto dir = std::filesystem::temp_directory_path() / "chainsim_series_dump";
  std::filesystem::remove_all(dir);
  run("sm-locality", json{{"L", 4}, {"g", {2.0}}, {"max_order", 2}, {"dump_dir", dir.string()}});
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    std::ifstream is(e.path());
    const OperatorSum op = read_text(is);
    EXPECT_EQ(op.num_sites(), 4);
    ++files;
  }
  EXPECT_EQ(files, 4u);
  std::filesystem::remove_all(dir);
}
