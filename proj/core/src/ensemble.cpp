#include <cmath>
#include <exception>
#include <fstream>
#include <functional>

#include "manylaser/errors.hpp"
#include "manylaser/ness.hpp"
#include "manylaser/observables.hpp"
#include "manylaser/trajectories.hpp"

namespace manylaser {

namespace {

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats mean_se(const std::vector<double>& x) {
  Stats s;
  const double m = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= m;
  if (x.size() > 1) {
    double var = 0.0;
    for (double v : x) var += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(var / (m - 1.0) / m);
  }
  return s;
}

// Rethrow with the trajectory index prepended, keeping the concrete type.
[[noreturn]] void rethrow_indexed(std::exception_ptr ep, int k) {
  const std::string pre = "trajectory " + std::to_string(k) + ": ";
  try {
    std::rethrow_exception(ep);
  } catch (const StepSizeError& e) {
    throw StepSizeError(pre + e.what());
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(pre + e.what());
  } catch (const DomainError& e) {
    throw DomainError(pre + e.what());
  } catch (const BudgetError& e) {
    throw BudgetError(pre + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(pre + e.what(), e.achieved_residual());
  }
}

}  // namespace

const EnsembleEstimate& EnsembleResult::get(const std::string& name, int site_a, int site_b) const {
  for (const auto& e : estimates) {
    if (e.observable_name == name && e.site_a == site_a && e.site_b == site_b) return e;
  }
  throw DomainError("no ensemble estimate named " + name);
}

std::optional<DenseMat> EnsembleResult::mean_state() const {
  std::optional<DenseMat> out;
  for (const auto& a : per_trajectory) {
    if (!a.mean_state) return std::nullopt;
    if (!out) out = DenseMat::Zero(a.mean_state->rows(), a.mean_state->cols());
    *out += *a.mean_state;
  }
  if (out) *out /= static_cast<double>(per_trajectory.size());
  return out;
}

EnsembleResult estimate_ensemble(const SystemParams& params_in, int num_trajectories, std::uint64_t base_seed,
                                 const Schedule& schedule, Unraveling unraveling, const TrajectoryOptions& options) {
  params_in.validate();
  schedule.validate();
  if (num_trajectories < 2) throw DomainError("num_trajectories must be >= 2");
  SystemParams params = params_in;
  if (unraveling == Unraveling::Diffusive && params.n_max <= 0) {
    params.n_max = adaptive_cutoff_ness(params).chosen_n_max;
  }

  const int M = num_trajectories;
  std::vector<TrajectoryResult> runs(M);
  std::vector<std::exception_ptr> errors(M);
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < M; ++k) {
    try {
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
      runs[k] = unraveling == Unraveling::Jump ? run_jump_trajectory(params, seed, schedule, options)
                                               : run_diffusive_trajectory(params, seed, schedule, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (int k = 0; k < M; ++k) {
    if (errors[k]) rethrow_indexed(errors[k], k);
  }

  EnsembleResult out;
  for (auto& r : runs) {
    out.per_trajectory.push_back(std::move(r.averages));
    out.diagnostics.push_back(std::move(r.diagnostics));
  }
  const auto& per = out.per_trajectory;
  auto column = [&](const std::function<double(const TrajectoryAverages&)>& f) {
    std::vector<double> v;
    v.reserve(M);
    for (const auto& a : per) v.push_back(f(a));
    return v;
  };
  auto add = [&](const std::string& name, int a, int b, double mean, double se, bool defined = true) {
    EnsembleEstimate e;
    e.observable_name = name;
    e.site_a = a;
    e.site_b = b;
    e.mean = mean;
    e.standard_error = se;
    e.defined = defined;
    e.num_trajectories = M;
    e.burn_in = schedule.t_burn;
    e.total_time = schedule.t_total;
    out.estimates.push_back(e);
  };

  const auto n = column([](const TrajectoryAverages& a) { return a.photons; });
  const auto f = column([](const TrajectoryAverages& a) { return a.factorial_moment; });
  const auto zt = column([](const TrajectoryAverages& a) { return a.magnetization; });
  const Stats sn = mean_se(n), sf = mean_se(f), sz = mean_se(zt);
  add("photon_number", 0, 0, sn.mean, sn.se);
  add("photon_factorial_moment", 0, 0, sf.mean, sf.se);
  add("magnetization", 0, 0, sz.mean, sz.se);

  // Ratio of means with delta-method errors: each trajectory contributes the
  // linearized influence of its averages on the ratio.
  if (sn.mean > kPhotonFloor) {
    const double g2 = sf.mean / (sn.mean * sn.mean);
    std::vector<double> infl(M);
    for (int k = 0; k < M; ++k) infl[k] = f[k] / (sn.mean * sn.mean) - 2.0 * sf.mean * n[k] / std::pow(sn.mean, 3);
    add("g2", 0, 0, g2, mean_se(infl).se);
  } else {
    add("g2", 0, 0, std::nan(""), std::nan(""), false);
  }

  const int L = params.L;
  std::vector<Stats> z(L);
  for (int i = 0; i < L; ++i) {
    z[i] = mean_se(column([i](const TrajectoryAverages& a) { return a.z[i]; }));
    add("z", i + 1, 0, z[i].mean, z[i].se);
  }
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const auto c = column([i, j](const TrajectoryAverages& a) { return a.zz(i, j); });
      const Stats sc = mean_se(c);
      add("zz", i + 1, j + 1, sc.mean, sc.se);
      const double den = z[i].mean * z[j].mean;
      if (std::abs(den) < kCorrelationFloor) {
        add("o_zz", i + 1, j + 1, std::nan(""), std::nan(""), false);
        continue;
      }
      std::vector<double> infl(M);
      for (int k = 0; k < M; ++k) {
        infl[k] = c[k] / den - sc.mean * per[k].z[i] / (den * z[i].mean) - sc.mean * per[k].z[j] / (den * z[j].mean);
      }
      add("o_zz", i + 1, j + 1, sc.mean / den, mean_se(infl).se);
    }
  }
  return out;
}

void write_event_log(const std::string& path, const std::vector<TrajectoryDiagnostics>& runs) {
  std::ofstream os(path);
  if (!os) throw DomainError("cannot open event log " + path);
  os << "trajectory,time,channel,site\n";
  os.precision(17);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (const auto& e : runs[k].events) {
      os << k << ',' << e.time << ',' << (e.channel == CollapseOperator::Channel::Pump ? "pump" : "loss") << ','
         << e.site << '\n';
    }
  }
}

}  // namespace manylaser
