#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manylaser/model.hpp"
#include "manylaser/trajectories.hpp"

namespace manylaser {

inline constexpr int kConfigSchemaVersion = 1;

enum class Mode { Ness, Trajectory, Sweep, Spectrum, Correlations, Cooperativity };
enum class Method { Exact, Jump, Diffusive };

std::string to_string(Mode mode);
std::string to_string(Method method);

struct SweepAxis {
  std::string name;  // P, U or L
  std::vector<double> values;
};

struct EnsembleConfig {
  int num_trajectories = 500;
  std::uint64_t base_seed = 1;
  // Zero fields fall back to Schedule::defaults for the grid point.
  Schedule schedule;
  std::string event_log;  // optional CSV path for jump events
};

struct SolverConfig {
  // Memory ceiling for one exact solve; above it the run fails with exit
  // code 4 and suggests trajectory mode.
  std::size_t memory_budget_mib = 3072;
  // Largest Fock cutoff the adaptive search may try.
  int max_n_max = 400;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name;
  std::string description;
  Mode mode = Mode::Ness;
  Method method = Method::Exact;
  SystemParams params;
  // Cartesian product, outermost axis first.
  std::vector<SweepAxis> sweep;
  EnsembleConfig ensemble;
  SolverConfig solver;
  std::string output_path = "manylaser.csv";

  // Throws ConfigError naming the offending field.
  void validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
// Canonical JSON (stable key order), the input of config_hash.
std::string dump_config(const RunConfig& config);
// FNV-1a 64 of the canonical JSON.
std::uint64_t config_hash(const RunConfig& config);

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
// Throws ConfigError listing valid names for unknown presets.
RunConfig preset(const std::string& name);

}  // namespace manylaser
