#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manylaser/config.hpp"
#include "manylaser/model.hpp"

namespace manylaser {

inline constexpr int kTableSchemaVersion = 1;

// One value of one observable at one grid point. Optional cells are written
// empty when they do not apply to the row.
struct TableRow {
  SystemParams params;  // n_max is the cutoff actually used (0 for jump rows)
  std::string sweep_axis;
  double sweep_value = 0.0;
  std::string observable;
  int site_a = 0;
  int site_b = 0;
  double value = 0.0;  // NaN when !defined
  double standard_error = 0.0;
  Method method = Method::Exact;
  bool defined = true;
  std::optional<double> energy;             // spectrum rows
  std::optional<int> state_magnetization;   // spectrum rows
  std::optional<bool> bright_state;         // spectrum rows
  std::optional<bool> top3;                 // spectrum rows
  std::optional<double> residual_norm;      // exact rows
  std::optional<double> trace_error;
  std::optional<double> min_eigenvalue;
  std::optional<double> top_fock_population;

  bool operator==(const TableRow&) const = default;
};

struct SweepTable {
  // Written as "# key: value" lines above the header, in key order.
  std::map<std::string, std::string> metadata;
  std::vector<TableRow> rows;

  static const std::vector<std::string>& columns();

  std::string to_csv() const;
  void write_csv(const std::string& path) const;
  // Throws DomainError on schema mismatch.
  static SweepTable from_csv(const std::string& text);
  static SweepTable read_csv(const std::string& path);

  // Rows with the given observable (and sites), in table order.
  std::vector<const TableRow*> select(const std::string& observable, int site_a = -1, int site_b = -1) const;
};

}  // namespace manylaser
