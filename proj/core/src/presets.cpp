#include <cmath>

#include "manylaser/config.hpp"
#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(std::round((lo + i * step) * 1e12) / 1e12);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  return v;
}

std::vector<double> range(int lo, int hi) {
  std::vector<double> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

struct Entry {
  const char* name;
  const char* description;
  RunConfig (*make)();
};

RunConfig base(const char* name, Mode mode, int L, double U) {
  RunConfig c;
  c.name = name;
  c.mode = mode;
  c.params = figure_defaults(L, U);
  c.output_path = std::string(name) + ".csv";
  return c;
}

const Entry kPresets[] = {
    {"fig2", "photon number, g2 and Z_T/L vs pump P in [0.01, 100] (41 log points) for U in {0.1, 0.5, 1, 2, 5}, L=4",
     [] {
       RunConfig c = base("fig2", Mode::Sweep, 4, 1.0);
       c.sweep = {{"U", {0.1, 0.5, 1.0, 2.0, 5.0}}, {"P", logspace(0.01, 100.0, 41)}};
       return c;
     }},
    {"fig3", "photon number and g2 vs U in [0.1, 5] (step 0.1) for L = 2..6, P=J", [] {
       RunConfig c = base("fig3", Mode::Sweep, 2, 1.0);
       c.sweep = {{"L", range(2, 6)}, {"U", grid(0.1, 5.0, 0.1)}};
       return c;
     }},
    {"fig4", "cooperativities C_f and C_XXZ vs U in [0.1, 5] (step 0.1) for L = 2..5", [] {
       RunConfig c = base("fig4", Mode::Cooperativity, 2, 1.0);
       c.sweep = {{"L", range(2, 5)}, {"U", grid(0.1, 5.0, 0.1)}};
       return c;
     }},
    {"fig5", "NESS weights on XXZ eigenstates vs U in [0.1, 5] (step 0.1), L=3", [] {
       RunConfig c = base("fig5", Mode::Spectrum, 3, 1.0);
       c.sweep = {{"U", grid(0.1, 5.0, 0.1)}};
       return c;
     }},
    {"fig6", "NESS weights on XXZ eigenstates at the Heisenberg point, L=6", [] {
       return base("fig6", Mode::Spectrum, 6, 1.0);
     }},
    {"fig7a", "exact Z-Z correlations from site floor(L/2) vs U in [0.5, 1.5] (step 0.05), L=5", [] {
       RunConfig c = base("fig7a", Mode::Correlations, 5, 1.0);
       c.sweep = {{"U", grid(0.5, 1.5, 0.05)}};
       return c;
     }},
    {"fig7b", "jump-ensemble Z-Z correlations for U in {0.8, 1} vs L = 3..11 (100 trajectories)", [] {
       RunConfig c = base("fig7b", Mode::Correlations, 3, 1.0);
       c.method = Method::Jump;
       c.ensemble.num_trajectories = 100;
       c.sweep = {{"U", {0.8, 1.0}}, {"L", range(3, 11)}};
       return c;
     }},
    {"fig7c", "jump-ensemble Z-Z correlations vs distance, L=11, U in {0.8, 1, 1.2} (100 trajectories)", [] {
       RunConfig c = base("fig7c", Mode::Correlations, 11, 1.0);
       c.method = Method::Jump;
       c.ensemble.num_trajectories = 100;
       c.sweep = {{"U", {0.8, 1.0, 1.2}}};
       return c;
     }},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> v;
  for (const auto& e : kPresets) v.emplace_back(e.name);
  return v;
}

std::string preset_description(const std::string& name) {
  for (const auto& e : kPresets)
    if (name == e.name) return e.description;
  return preset(name).description;  // throws
}

RunConfig preset(const std::string& name) {
  for (const auto& e : kPresets) {
    if (name == e.name) {
      RunConfig c = e.make();
      c.description = e.description;
      c.validate();
      return c;
    }
  }
  std::string valid;
  for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("--preset", "unknown preset '" + name + "'; valid presets: " + valid);
}

}  // namespace manylaser
