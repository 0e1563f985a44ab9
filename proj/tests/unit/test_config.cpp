#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "manylaser/config.hpp"
#include "manylaser/errors.hpp"
#include "manylaser/runner.hpp"
#include "manylaser/sweep_table.hpp"

using namespace manylaser;

namespace {

std::string field_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesFullDocument) {
  const auto c = parse_config(R"({
    "schema_version": 1, "name": "t", "mode": "trajectory", "method": "diffusive",
    "params": {"L": 3, "U": 0.8, "n_max": 12},
    "sweep": [{"name": "P", "logspace": [0.1, 10, 3]}, {"name": "U", "values": [1.2, 0.8]}],
    "ensemble": {"num_trajectories": 50, "base_seed": 9, "schedule": {"t_burn": 10, "t_total": 100, "sample_every": 2}},
    "output": {"path": "x.csv"}})");
  EXPECT_EQ(c.mode, Mode::Trajectory);
  EXPECT_EQ(c.method, Method::Diffusive);
  EXPECT_EQ(c.params.L, 3);
  EXPECT_DOUBLE_EQ(c.params.g, 0.1);
  ASSERT_EQ(c.sweep.size(), 2u);
  EXPECT_NEAR(c.sweep[0].values[1], 1.0, 1e-14);
  EXPECT_EQ(c.ensemble.base_seed, 9u);
  EXPECT_DOUBLE_EQ(c.ensemble.schedule.t_total, 100.0);
  // canonical dump parses back to the same hash
  EXPECT_EQ(config_hash(parse_config(dump_config(c))), config_hash(c));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"mode": "ness"})"), "schema_version");
  EXPECT_EQ(field_of(R"({"schema_version": 2, "mode": "ness"})"), "schema_version");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "bogus"})"), "mode");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "ness", "params": {"kappa": -1}})"), "params");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "ness", "params": {"L": "x"}})"), "params.L");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "ness", "params": {"Q": 1}})"), "params.Q");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "sweep"})"), "sweep");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "sweep", "sweep": {"name": "U", "values": []}})"),
            "sweep[0].values");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "sweep", "sweep": {"name": "g", "values": [1]}})"),
            "sweep[0].name");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "sweep", "sweep": {"name": "L", "values": [2.5]}})"),
            "sweep[0].values");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "trajectory", "method": "exact"})"), "method");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "spectrum", "method": "jump"})"), "method");
  EXPECT_EQ(field_of(R"({"schema_version": 1, "mode": "ness", "solver": {"max_n_max": 1}})"), "solver.max_n_max");
  EXPECT_EQ(field_of("{not json"), "<config>");
}

TEST(Presets, AllExpandAndValidate) {
  const auto names = preset_names();
  EXPECT_EQ(names.size(), 8u);
  for (const auto& n : names) {
    const auto c = preset(n);
    EXPECT_EQ(c.name, n);
    EXPECT_FALSE(expand_grid(c).empty());
  }
  const auto fig3 = preset("fig3");
  EXPECT_EQ(fig3.mode, Mode::Sweep);
  EXPECT_EQ(fig3.sweep[0].name, "L");
  EXPECT_EQ(fig3.sweep[0].values.front(), 2);
  EXPECT_EQ(fig3.sweep[0].values.back(), 6);
  EXPECT_DOUBLE_EQ(fig3.params.P, 1.0);
  EXPECT_EQ(preset("fig7c").params.L, 11);
  EXPECT_EQ(preset("fig7c").method, Method::Jump);
  try {
    preset("fig9");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fig7c"), std::string::npos);
  }
}

TEST(Runner, GridIsSortedCartesianProduct) {
  RunConfig c;
  c.mode = Mode::Sweep;
  c.sweep = {{"L", {3, 2}}, {"U", {2.0, 0.5, 1.0}}};
  const auto g = expand_grid(c);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g[0].params.L, 2);
  EXPECT_DOUBLE_EQ(g[0].params.U, 0.5);
  EXPECT_DOUBLE_EQ(g[2].params.U, 2.0);
  EXPECT_EQ(g[3].params.L, 3);
  EXPECT_EQ(g[5].index, 5u);
  EXPECT_EQ(g[5].axis, "U");
}

TEST(Runner, TrivialPumpRow) {
  RunConfig c;
  c.params = figure_defaults(2, 1.0);
  c.params.P = 0.0;
  const auto r = run(c);
  ASSERT_TRUE(r.failures.empty());
  const auto n = r.table.select("photon_number");
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0]->value, 0.0);
  EXPECT_EQ(n[0]->standard_error, 0.0);
  EXPECT_EQ(r.table.select("magnetization")[0]->value, -2.0);
  EXPECT_FALSE(r.table.select("g2")[0]->defined);
}

TEST(Runner, CooperativityVanishesAtHeisenbergPoint) {
  RunConfig c;
  c.mode = Mode::Cooperativity;
  c.params = figure_defaults(3, 1.0);
  const auto r = run(c);
  ASSERT_TRUE(r.failures.empty());
  EXPECT_LT(std::abs(r.table.select("c_xxz")[0]->value), 1e-6);
}

TEST(Runner, PartialSweepKeepsRowsAndReportsFailures) {
  RunConfig c;
  c.mode = Mode::Sweep;
  c.params = figure_defaults(2, 1.0);
  c.params.n_max = 0;
  c.solver.memory_budget_mib = 4;
  c.sweep = {{"L", {2, 5}}};  // L = 5 does not fit in 4 MiB
  c.output_path = ::testing::TempDir() + "partial.csv";
  const auto r = run(c);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].point.params.L, 5);
  EXPECT_EQ(r.failures[0].kind, "budget");
  EXPECT_EQ(r.exit_code(), kExitBudget);
  EXPECT_NE(r.failures[0].message.find("trajectory"), std::string::npos);
  EXPECT_EQ(r.table.select("photon_number").size(), 1u);
  write_outputs(c, r);
  EXPECT_NE(slurp(c.output_path + ".failures.json").find("budget"), std::string::npos);
}

TEST(SweepTable, CsvRoundTripAndDeterminism) {
  RunConfig c;
  c.mode = Mode::Spectrum;
  c.params = figure_defaults(2, 1.0);
  c.sweep = {{"U", {0.5, 1.0}}};
  c.output_path = ::testing::TempDir() + "spec.csv";
  const auto r1 = run(c);
  write_outputs(c, r1);
  const std::string first = slurp(c.output_path);
  const auto back = SweepTable::read_csv(c.output_path);
  ASSERT_EQ(back.rows.size(), r1.table.rows.size());
  for (std::size_t k = 0; k < back.rows.size(); ++k) EXPECT_EQ(back.rows[k], r1.table.rows[k]);
  EXPECT_EQ(back.metadata.at("config_hash"), r1.table.metadata.at("config_hash"));
  EXPECT_EQ(back.to_csv(), first);
  const auto r2 = run(c);
  write_outputs(c, r2);
  EXPECT_EQ(slurp(c.output_path), first);
  EXPECT_THROW(SweepTable::from_csv("a,b\n1,2\n"), DomainError);
}

TEST(SweepTable, TrajectoryRowsDeterministicWithSeed) {
  RunConfig c;
  c.mode = Mode::Trajectory;
  c.method = Method::Jump;
  c.params = figure_defaults(2, 1.0);
  c.ensemble.num_trajectories = 4;
  c.ensemble.schedule.t_burn = 10;
  c.ensemble.schedule.t_total = 60;
  c.ensemble.schedule.sample_every = 2;
  RunOptions one, two;
  one.jobs = 1;
  two.jobs = 2;
  const auto a = run(c, one), b = run(c, two);
  EXPECT_EQ(a.table.to_csv(), b.table.to_csv());
  for (const auto& row : a.table.rows) {
    EXPECT_EQ(row.method, Method::Jump);
    if (row.defined) EXPECT_GT(row.standard_error, 0.0) << row.observable;
  }
}

#ifdef SIMULATE_PATH
TEST(Cli, ExitCodes) {
  const std::string exe = SIMULATE_PATH;
  const std::string dir = ::testing::TempDir();
  auto rc = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(rc(exe + " --list-presets"), 0);
  EXPECT_EQ(rc(exe + " --preset nope"), 2);
  EXPECT_EQ(rc(exe), 2);
  { std::ofstream(dir + "bad.json") << R"({"schema_version": 1, "mode": "ness", "params": {"L": -2}})"; }
  EXPECT_EQ(rc(exe + " --config " + dir + "bad.json"), 2);
  { std::ofstream(dir + "ok.json") << R"({"schema_version": 1, "mode": "ness", "params": {"L": 2, "P": 0}})"; }
  EXPECT_EQ(rc(exe + " --config " + dir + "ok.json --out " + dir + "ok.csv"), 0);
  EXPECT_NE(slurp(dir + "ok.csv").find("photon_number"), std::string::npos);
  EXPECT_NE(slurp(dir + "ok.csv.meta.json").find("written_at"), std::string::npos);
  { std::ofstream(dir + "big.json") << R"({"schema_version": 1, "mode": "ness", "params": {"L": 8}, "solver": {"memory_budget_mib": 8}})"; }
  EXPECT_EQ(rc(exe + " --config " + dir + "big.json --out " + dir + "big.csv"), 4);
  EXPECT_EQ(rc(exe + " --preset fig6 --print-config"), 0);
}
#endif
