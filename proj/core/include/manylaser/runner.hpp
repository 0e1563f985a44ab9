#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "manylaser/config.hpp"
#include "manylaser/sweep_table.hpp"

namespace manylaser {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitBudget = 4 };

// Maps an exception onto the CLI exit code.
int exit_code_for(const std::exception& e);

struct GridPoint {
  std::size_t index = 0;
  SystemParams params;
  std::string axis;  // innermost swept axis, empty without a sweep
  double value = 0.0;
};

// Cartesian product of the sweep axes with each axis sorted ascending;
// outermost axis varies slowest.
std::vector<GridPoint> expand_grid(const RunConfig& config);

// Rows for a single grid point. Throws the underlying solver errors.
std::vector<TableRow> evaluate_point(const RunConfig& config, const GridPoint& point);

struct PointFailure {
  GridPoint point;
  std::string kind;
  std::string message;
  int exit_code = kExitSolver;
};

struct RunOptions {
  int jobs = 0;  // 0: all available cores
  std::ostream* log = nullptr;
};

struct RunResult {
  SweepTable table;
  std::vector<PointFailure> failures;
  double seconds = 0.0;
  int exit_code() const { return failures.empty() ? kExitOk : failures.front().exit_code; }
};

// Evaluates every grid point; completed rows are kept when points fail.
RunResult run(const RunConfig& config, const RunOptions& options = {});

// CSV at config.output_path, metadata sidecar <path>.meta.json and, when any
// point failed, <path>.failures.json.
void write_outputs(const RunConfig& config, const RunResult& result);

// One line per observable at each point, for the terminal.
void print_summary(std::ostream& os, const RunConfig& config, const RunResult& result);

}  // namespace manylaser
