#include "manylaser/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>

#include "json.hpp"
#include "manylaser/errors.hpp"
#include "manylaser/ness.hpp"
#include "manylaser/observables.hpp"
#include "manylaser/spectrum.hpp"
#include "manylaser/trajectories.hpp"

#ifndef MANYLASER_VERSION
#define MANYLASER_VERSION "unknown"
#endif

namespace manylaser {

namespace {

struct Failure {
  std::string kind;
  int code;
};

Failure classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {"config", kExitConfig};
  if (dynamic_cast<const BudgetError*>(&e)) return {"budget", kExitBudget};
  if (dynamic_cast<const ConvergenceError*>(&e)) return {"convergence", kExitSolver};
  if (dynamic_cast<const DegeneracyError*>(&e)) return {"degeneracy", kExitSolver};
  if (dynamic_cast<const StepSizeError*>(&e)) return {"step_size", kExitSolver};
  if (dynamic_cast<const ConsistencyError*>(&e)) return {"consistency", kExitSolver};
  if (dynamic_cast<const UndefinedStatistic*>(&e)) return {"undefined_statistic", kExitSolver};
  if (dynamic_cast<const DomainError*>(&e)) return {"domain", kExitConfig};
  return {"internal", kExitSolver};
}

struct Point {
  const RunConfig& config;
  const GridPoint& grid;

  TableRow row(const std::string& observable, double value, double se = 0.0, int a = 0, int b = 0) const {
    TableRow r;
    r.params = grid.params;
    r.sweep_axis = grid.axis;
    r.sweep_value = grid.value;
    r.observable = observable;
    r.site_a = a;
    r.site_b = b;
    r.value = value;
    r.standard_error = se;
    r.method = config.method;
    r.defined = std::isfinite(value);
    if (!r.defined) r.value = r.standard_error = std::nan("");
    return r;
  }
};

void attach(TableRow& r, const AdaptiveNessResult& n) {
  r.params.n_max = n.chosen_n_max;
  r.residual_norm = n.diagnostics.residual_norm;
  r.trace_error = n.diagnostics.trace_error;
  r.min_eigenvalue = n.diagnostics.min_eigenvalue;
  r.top_fock_population = n.diagnostics.top_fock_population;
}

AdaptiveNessResult solve(const RunConfig& config, const SystemParams& params) {
  AdaptiveOptions opt;
  opt.max_n_max = config.solver.max_n_max;
  opt.solver.memory_budget_bytes = config.solver.memory_budget_mib << 20;
  try {
    return exact_ness(params, opt);
  } catch (const BudgetError& e) {
    throw BudgetError(std::string(e.what()) + "; use mode=trajectory (method jump) for this size");
  }
}

double g2_or_nan(double f, double n) {
  try {
    return g2_from_moments(f, n);
  } catch (const UndefinedStatistic&) {
    return std::nan("");
  }
}

Schedule resolve_schedule(const Schedule& s, const SystemParams& p) {
  const Schedule d = Schedule::defaults(p);
  Schedule r = s;
  if (r.t_burn <= 0) r.t_burn = d.t_burn;
  if (r.t_total <= 0) r.t_total = d.t_total;
  if (r.sample_every <= 0) r.sample_every = d.sample_every;
  r.validate();
  return r;
}

EnsembleResult ensemble(const RunConfig& c, const SystemParams& p, std::size_t index) {
  const Schedule s = resolve_schedule(c.ensemble.schedule, p);
  TrajectoryOptions opt;
  opt.record_events = !c.ensemble.event_log.empty();
  // distinct, deterministic seed blocks per grid point
  const std::uint64_t seed = c.ensemble.base_seed + static_cast<std::uint64_t>(index) * 1000003ULL;
  auto r = estimate_ensemble(p, c.ensemble.num_trajectories, seed, s,
                             c.method == Method::Jump ? Unraveling::Jump : Unraveling::Diffusive, opt);
  if (opt.record_events) {
    write_event_log(c.ensemble.event_log + "." + std::to_string(index) + ".csv", r.diagnostics);
  }
  return r;
}

std::vector<TableRow> scalar_rows(const Point& pt) {
  std::vector<TableRow> rows;
  const SystemParams& p = pt.grid.params;
  if (pt.config.method == Method::Exact) {
    const auto n = solve(pt.config, p);
    const double photons = photon_number(n.rho), fm = photon_factorial_moment(n.rho);
    const double zt = total_magnetization(n.rho);
    rows.push_back(pt.row("photon_number", photons));
    rows.push_back(pt.row("photon_factorial_moment", fm));
    rows.push_back(pt.row("g2", g2_or_nan(fm, photons)));
    rows.push_back(pt.row("magnetization", zt));
    rows.push_back(pt.row("magnetization_per_site", zt / p.L));
    for (auto& r : rows) attach(r, n);
    return rows;
  }
  const auto e = ensemble(pt.config, p, pt.grid.index);
  for (const char* name : {"photon_number", "photon_factorial_moment", "g2", "magnetization"}) {
    const auto& est = e.get(name);
    rows.push_back(pt.row(name, est.defined ? est.mean : std::nan(""), est.defined ? est.standard_error : std::nan("")));
  }
  const auto& zt = e.get("magnetization");
  rows.push_back(pt.row("magnetization_per_site", zt.mean / p.L, zt.standard_error / p.L));
  for (auto& r : rows) r.params.n_max = pt.config.method == Method::Diffusive ? p.n_max : 0;
  return rows;
}

std::vector<TableRow> correlation_rows(const Point& pt) {
  std::vector<TableRow> rows;
  const SystemParams& p = pt.grid.params;
  const int m = correlation_reference_site(p.L);
  if (pt.config.method == Method::Exact) {
    const auto n = solve(pt.config, p);
    for (int i = 1; i <= p.L; ++i) rows.push_back(pt.row("z", site_magnetization(n.rho, i), 0.0, i));
    for (int b = m + 1; b <= p.L; ++b) {
      const auto c = zz_correlation(n.rho, m, b);
      rows.push_back(pt.row("zz", c.raw, 0.0, m, b));
      rows.push_back(pt.row("o_zz", c.ratio ? *c.ratio : std::nan(""), 0.0, m, b));
    }
    for (auto& r : rows) attach(r, n);
    return rows;
  }
  const auto e = ensemble(pt.config, p, pt.grid.index);
  for (int i = 1; i <= p.L; ++i) {
    const auto& z = e.get("z", i);
    rows.push_back(pt.row("z", z.mean, z.standard_error, i));
  }
  for (int b = m + 1; b <= p.L; ++b) {
    const auto& zz = e.get("zz", m, b);
    rows.push_back(pt.row("zz", zz.mean, zz.standard_error, m, b));
    const auto& o = e.get("o_zz", m, b);
    rows.push_back(pt.row("o_zz", o.defined ? o.mean : std::nan(""), o.defined ? o.standard_error : std::nan(""), m, b));
  }
  for (auto& r : rows) r.params.n_max = pt.config.method == Method::Diffusive ? p.n_max : 0;
  return rows;
}

std::vector<TableRow> spectrum_rows(const Point& pt) {
  const SystemParams& p = pt.grid.params;
  const auto n = solve(pt.config, p);
  const auto basis = diagonalize_xxz(p);
  const auto records = spectral_decomposition(partial_trace_cavity(n.rho), basis);
  std::vector<TableRow> rows;
  for (const auto& rec : records) {
    TableRow r = pt.row("eigen_probability", rec.probability, 0.0, rec.eigen_index);
    r.energy = rec.energy;
    r.state_magnetization = rec.magnetization;
    r.bright_state = rec.bright;
    r.top3 = rec.top3;
    attach(r, n);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TableRow> cooperativity_rows(const Point& pt) {
  const SystemParams& p = pt.grid.params;
  SystemParams single = p, free = p;
  single.L = 1;
  single.n_max = 0;
  free.J = 0.0;
  free.U = 0.0;
  free.n_max = 0;
  const auto many = solve(pt.config, p);
  const double n_many = photon_number(many.rho);
  const double n_single = photon_number(solve(pt.config, single).rho);
  const double n_free = photon_number(solve(pt.config, free).rho);
  auto or_nan = [](auto f) {
    try {
      return f();
    } catch (const UndefinedStatistic&) {
      return std::nan("");
    }
  };
  std::vector<TableRow> rows;
  rows.push_back(pt.row("photon_number", n_many));
  rows.push_back(pt.row("photon_number_single", n_single));
  rows.push_back(pt.row("photon_number_free", n_free));
  rows.push_back(pt.row("c_f", or_nan([&] { return cooperativity_fraction(n_many, n_single, p.L); })));
  rows.push_back(pt.row("c_xxz", or_nan([&] { return cooperativity_xxz(n_many, n_free); })));
  for (auto& r : rows) attach(r, many);
  return rows;
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

nlohmann::json point_json(const GridPoint& g) {
  const auto& p = g.params;
  return {{"index", g.index}, {"L", p.L},         {"J", p.J},         {"U", p.U},
          {"g", p.g},         {"P", p.P},         {"kappa", p.kappa}, {"n_max", p.n_max}};
}

}  // namespace

int exit_code_for(const std::exception& e) { return classify(e).code; }

std::vector<GridPoint> expand_grid(const RunConfig& config) {
  std::vector<GridPoint> out;
  std::vector<std::vector<double>> axes;
  for (const auto& a : config.sweep) {
    auto v = a.values;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    axes.push_back(std::move(v));
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    GridPoint g;
    g.index = out.size();
    g.params = config.params;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const double v = axes[k][idx[k]];
      const auto& name = config.sweep[k].name;
      if (name == "L") g.params.L = static_cast<int>(v);
      if (name == "U") g.params.U = v;
      if (name == "P") g.params.P = v;
      g.axis = name;
      g.value = v;
    }
    out.push_back(std::move(g));
    int k = static_cast<int>(axes.size()) - 1;
    for (; k >= 0; --k) {
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

std::vector<TableRow> evaluate_point(const RunConfig& config, const GridPoint& point) {
  const Point pt{config, point};
  switch (config.mode) {
    case Mode::Ness:
    case Mode::Sweep:
    case Mode::Trajectory:
      return scalar_rows(pt);
    case Mode::Correlations:
      return correlation_rows(pt);
    case Mode::Spectrum:
      return spectrum_rows(pt);
    case Mode::Cooperativity:
      return cooperativity_rows(pt);
  }
  return {};
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto grid = expand_grid(config);
  const int jobs = options.jobs > 0 ? options.jobs : omp_get_max_threads();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(jobs);

  std::vector<std::vector<TableRow>> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  // Several points: parallel over points. One point: leave the threads to
  // the trajectory ensemble inside it.
  const int outer = grid.size() > 1 ? jobs : 1;
#pragma omp parallel for schedule(dynamic, 1) num_threads(outer)
  for (std::size_t k = 0; k < grid.size(); ++k) {
    try {
      rows[k] = evaluate_point(config, grid[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
    if (options.log) {
#pragma omp critical(manylaser_log)
      *options.log << "  point " << k + 1 << "/" << grid.size() << (errors[k] ? " failed" : " done") << std::endl;
    }
  }
  omp_set_num_threads(saved);

  RunResult result;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!errors[k]) {
      for (auto& r : rows[k]) result.table.rows.push_back(std::move(r));
      continue;
    }
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      const auto f = classify(e);
      result.failures.push_back({grid[k], f.kind, e.what(), f.code});
    }
  }
  auto& md = result.table.metadata;
  md["schema_version"] = std::to_string(kTableSchemaVersion);
  md["code_version"] = MANYLASER_VERSION;
  md["config_hash"] = hex(config_hash(config));
  md["config_name"] = config.name.empty() ? "-" : config.name;
  md["mode"] = to_string(config.mode);
  md["units"] = "energies and rates (J U g P kappa energy) in units of J; times in units of 1/J";
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_outputs(const RunConfig& config, const RunResult& result) {
  result.table.write_csv(config.output_path);

  nlohmann::json meta;
  meta["config"] = nlohmann::json::parse(dump_config(config));
  meta["config_hash"] = result.table.metadata.at("config_hash");
  meta["code_version"] = MANYLASER_VERSION;
  meta["schema_version"] = kTableSchemaVersion;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["written_at"] = stamp;
  meta["wall_seconds"] = result.seconds;
  meta["rows"] = result.table.rows.size();
  meta["failed_points"] = result.failures.size();
  std::ofstream(config.output_path + ".meta.json") << meta.dump(2) << '\n';

  const std::string manifest = config.output_path + ".failures.json";
  if (result.failures.empty()) {
    std::remove(manifest.c_str());
    return;
  }
  nlohmann::json f = nlohmann::json::array();
  for (const auto& x : result.failures) {
    f.push_back({{"point", point_json(x.point)}, {"kind", x.kind}, {"message", x.message}, {"exit_code", x.exit_code}});
  }
  std::ofstream(manifest) << f.dump(2) << '\n';
}

void print_summary(std::ostream& os, const RunConfig& config, const RunResult& result) {
  os << "mode " << to_string(config.mode) << ", method " << to_string(config.method) << ": "
     << result.table.rows.size() << " rows, " << result.failures.size() << " failed points, " << std::fixed
     << std::setprecision(1) << result.seconds << " s\n";
  os << std::defaultfloat << std::setprecision(6);
  std::size_t shown = 0;
  for (const auto& r : result.table.rows) {
    if (r.observable == "eigen_probability" && !(r.top3 && *r.top3)) continue;
    if (++shown > 40) {
      os << "  ... (see " << config.output_path << ")\n";
      break;
    }
    os << "  L=" << r.params.L << " U=" << r.params.U << " P=" << r.params.P << "  " << r.observable;
    if (r.site_a || r.site_b) os << "(" << r.site_a << (r.site_b ? "," + std::to_string(r.site_b) : "") << ")";
    os << " = ";
    if (r.defined) {
      os << r.value;
      if (r.standard_error > 0) os << " +- " << r.standard_error;
    } else {
      os << "undefined";
    }
    os << '\n';
  }
  for (const auto& f : result.failures) {
    os << "  FAILED point " << f.point.index << " (L=" << f.point.params.L << " U=" << f.point.params.U
       << " P=" << f.point.params.P << "): " << f.kind << ": " << f.message << '\n';
  }
}

}  // namespace manylaser
