#include "manylaser/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "manylaser/errors.hpp"
#include "manylaser/ness.hpp"
#include "manylaser/rng.hpp"

namespace manylaser {

namespace {

constexpr cplx kI{0.0, 1.0};

// Spin-space pieces shared by both unravelings. States are 2^L x W matrices,
// column w holding photon number base + w.
struct Engine {
  const SystemParams& p;
  int L;
  std::size_t spin_dim;
  SparseMat hs;
  SparseMat raise_sum;  // sum_i s_i^+
  std::vector<SparseMat> raise;  // per site
  Eigen::VectorXd down_count;
  Eigen::MatrixXd z;  // z(s, i) = <s|Z_i|s>
  struct Entry {
    Eigen::Index row, col;
    double value;
  };
  std::vector<Entry> h_entries, raise_entries;  // H_XXZ is real in this basis
  mutable DenseMat k1, k2, k3, k4, tmp;

  explicit Engine(const SystemParams& params)
      : p(params), L(params.L), spin_dim(std::size_t{1} << params.L) {
    hs = build_hxxz_spins(L, p.J, p.U).matrix();
    raise_sum = SparseMat(spin_dim, spin_dim);
    down_count = Eigen::VectorXd::Zero(spin_dim);
    z.resize(spin_dim, L);
    SpaceDescriptor d(L, 1);
    for (int i = 1; i <= L; ++i) {
      raise.push_back(spin_only_operator(L, i, SpinKind::Raise).matrix());
      raise_sum += raise.back();
      for (std::size_t s = 0; s < spin_dim; ++s) {
        const bool dn = d.is_down(s, i);
        down_count[s] += dn ? 1.0 : 0.0;
        z(s, i - 1) = dn ? -1.0 : 1.0;
      }
    }
    auto entries = [](const SparseMat& m) {
      std::vector<Entry> out;
      for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(m, k); it; ++it) {
          if (it.value().imag() != 0.0) throw ConsistencyError("spin operator has a complex entry");
          out.push_back({it.row(), it.col(), it.value().real()});
        }
      }
      return out;
    };
    h_entries = entries(hs);
    raise_entries = entries(raise_sum);
  }

  // Upper bound on ||H_eff|| for a window reaching photon number n_top.
  double heff_bound(int n_top) const {
    const double bonds = std::max(0, L - 1);
    return (2.0 * std::abs(p.J) + std::abs(p.U)) * bonds + p.g * L * std::sqrt(n_top + 1.0) +
           0.5 * (p.P * L + p.kappa * n_top);
  }

  double step(int n_top, double requested) const {
    const double rates = std::max({std::abs(p.J), std::abs(p.U), p.P, p.kappa, p.g * std::sqrt(n_top + 1.0)});
    const double stable = 1.0 / heff_bound(n_top);
    if (requested > 0.0) return std::min(requested, stable);
    return std::min(0.05 / rates, stable);
  }

  // out = -i H_eff psi. Hand-rolled over entry lists: the operators are tiny
  // and very sparse, and generic sparse products cost more in overhead.
  void deriv(const DenseMat& psi, int base, DenseMat& out) const {
    const Eigen::Index S = psi.rows();
    const int W = static_cast<int>(psi.cols());
    out.resize(S, W);
    for (int w = 0; w < W; ++w) {
      const cplx* x = psi.col(w).data();
      cplx* y = out.col(w).data();
      const double loss = p.kappa * (base + w);
      for (Eigen::Index s = 0; s < S; ++s) y[s] = cplx{0.0, 0.0};
      for (const auto& e : h_entries) y[e.row] += e.value * x[e.col];
      if (p.g != 0.0) {
        if (w + 1 < W) {  // a s^+ brings n+1 down to n
          const double c = p.g * std::sqrt(static_cast<double>(base + w + 1));
          const cplx* xs = psi.col(w + 1).data();
          for (const auto& e : raise_entries) y[e.row] += (c * e.value) * xs[e.col];
        }
        if (w >= 1) {  // a^dag s^- brings n-1 up to n
          const double c = p.g * std::sqrt(static_cast<double>(base + w));
          const cplx* xs = psi.col(w - 1).data();
          for (const auto& e : raise_entries) y[e.col] += (c * e.value) * xs[e.row];
        }
      }
      for (Eigen::Index s = 0; s < S; ++s) {
        y[s] = cplx{y[s].imag(), -y[s].real()} - (0.5 * (p.P * down_count[s] + loss)) * x[s];
      }
    }
  }

  void rk4(const DenseMat& psi, int base, double h, DenseMat& result) const {
    deriv(psi, base, k1);
    tmp = psi + (0.5 * h) * k1;
    deriv(tmp, base, k2);
    tmp = psi + (0.5 * h) * k2;
    deriv(tmp, base, k3);
    tmp = psi + h * k3;
    deriv(tmp, base, k4);
    result = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // d/dt <psi|psi> = -<psi|Gamma|psi>
  double decay_rate(const DenseMat& psi, int base) const {
    double r = 0.0;
    for (int w = 0; w < psi.cols(); ++w) {
      const Eigen::VectorXd pw = psi.col(w).cwiseAbs2();
      r += p.P * pw.dot(down_count) + p.kappa * (base + w) * pw.sum();
    }
    return r;
  }
};

struct Accumulator {
  TrajectoryAverages avg;
  explicit Accumulator(int L) {
    avg.z = Eigen::VectorXd::Zero(L);
    avg.zz = Eigen::MatrixXd::Zero(L, L);
  }

  void sample(const Engine& e, const DenseMat& psi, int base, bool keep_state) {
    const double nrm = psi.squaredNorm();
    const Eigen::MatrixXd w = psi.cwiseAbs2() / nrm;
    const Eigen::VectorXd spin_w = w.rowwise().sum();
    const Eigen::VectorXd fock_w = w.colwise().sum().transpose();
    double n1 = 0.0, n2 = 0.0;
    for (int k = 0; k < fock_w.size(); ++k) {
      const double n = base + k;
      n1 += n * fock_w[k];
      n2 += n * (n - 1.0) * fock_w[k];
    }
    avg.photons += n1;
    avg.factorial_moment += n2;
    const Eigen::VectorXd zi = e.z.transpose() * spin_w;
    avg.z += zi;
    avg.magnetization += zi.sum();
    avg.zz += e.z.transpose() * spin_w.asDiagonal() * e.z;
    if (keep_state) {
      // basis order is spin-major: index = s * fock_dim + n
      const DenseMat t = psi.transpose();
      const Eigen::Map<const DenseVec> v(t.data(), t.size());
      if (!avg.mean_state) avg.mean_state = DenseMat::Zero(v.size(), v.size());
      *avg.mean_state += (v * v.adjoint()) / nrm;
    }
    ++avg.samples;
  }

  TrajectoryAverages finish() {
    if (avg.samples > 0) {
      const double s = avg.samples;
      avg.photons /= s;
      avg.factorial_moment /= s;
      avg.magnetization /= s;
      avg.z /= s;
      avg.zz /= s;
      if (avg.mean_state) *avg.mean_state /= s;
    }
    return avg;
  }
};

// Smallest root in (0, h] of the cubic Hermite interpolant of the squared norm.
double jump_time(double n0, double n1, double d0, double d1, double h, double target) {
  auto f = [&](double t) {
    const double s = t / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * n0 + h10 * h * d0 + h01 * n1 + h11 * h * d1 - target;
  };
  double lo = 0.0, hi = h;
  for (int it = 0; it < 60 && hi - lo > 1e-14 * h; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

double window_leakage(const Engine& e, const DenseMat& psi, int base) {
  // Weight that H_eff would move past either edge of the window.
  const int W = static_cast<int>(psi.cols());
  double leak = 0.0;
  for (std::size_t s = 0; s < e.spin_dim; ++s) {
    if (e.down_count[s] < e.L) leak += std::norm(psi(s, W - 1));   // a^dag s^- leaves the top
    if (base > 0 && e.down_count[s] > 0) leak += std::norm(psi(s, 0));  // a s^+ leaves the bottom
  }
  return leak / psi.squaredNorm();
}

void check_schedule(const Schedule& s) { s.validate(); }

}  // namespace

Schedule Schedule::defaults(const SystemParams& params) {
  Schedule s;
  s.t_burn = 50.0 / params.kappa;
  s.t_total = 550.0 / params.kappa;
  s.sample_every = 1.0 / params.kappa;
  return s;
}

void Schedule::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw DomainError("schedule.dt must be >= 0");
  if (!(t_burn >= 0.0)) throw DomainError("schedule.t_burn must be >= 0");
  if (!(t_total > t_burn)) throw DomainError("schedule.t_total must exceed t_burn");
  if (!(sample_every > 0.0)) throw DomainError("schedule.sample_every must be > 0");
}

TrajectoryResult run_jump_trajectory(const SystemParams& params, std::uint64_t seed, const Schedule& schedule,
                                     const TrajectoryOptions& options) {
  params.validate();
  check_schedule(schedule);
  const Engine e(params);
  const int L = params.L;
  const int W = L + 1;
  if (schedule.dt > 0.0) {
    const double rates = std::max({std::abs(params.J), std::abs(params.U), params.P, params.kappa, params.g});
    if (schedule.dt > 0.05 / rates * (1 + 1e-12)) throw DomainError("schedule.dt exceeds 0.05 / max rate");
  }

  CounterRng rng(seed);
  TrajectoryState st;
  st.seed = seed;
  st.amplitudes = DenseMat::Zero(e.spin_dim, W);
  st.amplitudes(e.spin_dim - 1, 0) = 1.0;  // all down, vacuum
  st.fock_base = 0;
  st.excitations = 0;

  Accumulator acc(L);
  TrajectoryDiagnostics diag;
  diag.min_window_width = diag.max_window_width = W;

  double threshold = rng.uniform();
  double t = 0.0;
  long sample_index = 0;
  auto next_sample = [&] { return schedule.t_burn + schedule.sample_every * static_cast<double>(sample_index); };
  DenseMat trial;
  const double t_end = schedule.t_total * (1.0 + 1e-12);

  while (true) {
    if (next_sample() <= t_end && t >= next_sample() - 1e-9 * schedule.sample_every) {
      acc.sample(e, st.amplitudes, st.fock_base, false);
      ++sample_index;
      continue;
    }
    if (t >= schedule.t_total - 1e-12 * schedule.t_total) break;
    const double h0 = e.step(st.fock_base + W - 1, schedule.dt);
    const double h = std::min({h0, next_sample() - t, schedule.t_total - t});
    const double n0 = st.amplitudes.squaredNorm();
    e.rk4(st.amplitudes, st.fock_base, h, trial);
    const double n1 = trial.squaredNorm();
    ++diag.steps;
    if (!std::isfinite(n1) || n1 < 1e-3 * n0) {
      throw StepSizeError("norm underflow within one step (dt = " + std::to_string(h) + ")");
    }
    if (n1 > threshold) {
      st.amplitudes.swap(trial);
      t += h;
    } else {
      const double tau = jump_time(n0, n1, -e.decay_rate(st.amplitudes, st.fock_base),
                                   -e.decay_rate(trial, st.fock_base), h, threshold);
      e.rk4(st.amplitudes, st.fock_base, tau, trial);
      st.amplitudes.swap(trial);
      t += tau;

      // channel weights <c^dag c>
      const DenseMat& psi = st.amplitudes;
      std::vector<double> weights(L + 1, 0.0);
      const Eigen::VectorXd spin_w = psi.cwiseAbs2().rowwise().sum();
      for (int i = 0; i < L; ++i) {
        double wsum = 0.0;
        for (std::size_t s = 0; s < e.spin_dim; ++s) wsum += (e.z(s, i) < 0 ? spin_w[s] : 0.0);
        weights[i] = params.P * wsum;
      }
      const Eigen::VectorXd fock_w = psi.cwiseAbs2().colwise().sum().transpose();
      for (int k = 0; k < W; ++k) weights[L] += params.kappa * (st.fock_base + k) * fock_w[k];
      double total = 0.0;
      for (double w : weights) total += w;
      if (!(total > 0.0)) throw ConsistencyError("jump requested with zero total rate");
      double u = rng.uniform() * total;
      int channel = 0;
      while (channel < L && u >= weights[channel]) u -= weights[channel++];

      DenseMat next = DenseMat::Zero(e.spin_dim, W);
      JumpEvent ev{t, CollapseOperator::Channel::Pump, channel + 1};
      if (channel < L) {
        next.noalias() = e.raise[channel] * psi;
        ++st.excitations;
        const int new_base = std::max(0, st.excitations - L);
        if (new_base != st.fock_base) {
          const double dropped = next.col(0).squaredNorm() / next.squaredNorm();
          if (dropped >= 1e-12) throw ConsistencyError("pump jump would drop populated Fock state");
          DenseMat shifted = DenseMat::Zero(e.spin_dim, W);
          shifted.leftCols(W - 1) = next.rightCols(W - 1);
          next.swap(shifted);
          st.fock_base = new_base;
        }
      } else {
        ev.channel = CollapseOperator::Channel::Loss;
        ev.site = 0;
        --st.excitations;
        if (st.fock_base > 0) {
          // a|base + w> = sqrt(base + w)|base + w - 1> lands in slot w
          for (int k = 0; k < W; ++k) next.col(k) = std::sqrt(double(st.fock_base + k)) * psi.col(k);
          --st.fock_base;
        } else {
          for (int k = 1; k < W; ++k) next.col(k - 1) = std::sqrt(double(k)) * psi.col(k);
        }
      }
      const double nn = next.norm();
      if (!(nn > 0.0)) throw ConsistencyError("jump produced a null state");
      st.amplitudes = next / nn;
      threshold = rng.uniform();
      ++diag.jumps;
      if (options.record_events) diag.events.push_back(ev);
    }
    const double leak = window_leakage(e, st.amplitudes, st.fock_base);
    diag.max_window_leakage = std::max(diag.max_window_leakage, leak);
    if (leak > options.leakage_tolerance) {
      throw ConsistencyError("amplitude at the Fock window edge " + std::to_string(leak) + " exceeds tolerance");
    }
  }
  st.time = t;
  st.norm = st.amplitudes.squaredNorm();
  return {acc.finish(), std::move(diag), std::move(st)};
}

TrajectoryResult run_diffusive_trajectory(const SystemParams& params_in, std::uint64_t seed,
                                          const Schedule& schedule, const TrajectoryOptions& options) {
  params_in.validate();
  check_schedule(schedule);
  SystemParams params = params_in;
  if (params.n_max <= 0) params.n_max = adaptive_cutoff_ness(params).chosen_n_max;
  const Engine e(params);
  const int L = params.L;
  const int F = params.n_max;

  CounterRng rng(seed, 1);
  TrajectoryState st;
  st.seed = seed;
  st.excitations = -1;
  st.amplitudes = DenseMat::Zero(e.spin_dim, F);
  st.amplitudes(e.spin_dim - 1, 0) = 1.0;

  Accumulator acc(L);
  TrajectoryDiagnostics diag;
  diag.min_window_width = diag.max_window_width = F;

  const double sqP = std::sqrt(params.P), sqK = std::sqrt(params.kappa);
  auto apply_channel = [&](int k, const DenseMat& psi) -> DenseMat {
    if (k < L) return sqP * (e.raise[k] * psi);
    DenseMat out = DenseMat::Zero(e.spin_dim, F);
    for (int w = 1; w < F; ++w) out.col(w - 1) = (sqK * std::sqrt(double(w))) * psi.col(w);
    return out;
  };

  double t = 0.0;
  long sample_index = 0;
  auto next_sample = [&] { return schedule.t_burn + schedule.sample_every * static_cast<double>(sample_index); };
  const double t_end = schedule.t_total * (1.0 + 1e-12);
  DenseMat drift;
  while (true) {
    if (next_sample() <= t_end && t >= next_sample() - 1e-9 * schedule.sample_every) {
      acc.sample(e, st.amplitudes, 0, options.accumulate_state);
      ++sample_index;
      continue;
    }
    if (t >= schedule.t_total - 1e-12 * schedule.t_total) break;
    const double h = std::min({e.step(F - 1, schedule.dt), next_sample() - t, schedule.t_total - t});
    const DenseMat& psi = st.amplitudes;
    e.deriv(psi, 0, drift);
    DenseMat incr = drift * h;
    const double sq = std::sqrt(h);
    for (int k = 0; k <= L; ++k) {
      const DenseMat cpsi = apply_channel(k, psi);
      const double x = 2.0 * std::real(psi.conjugate().cwiseProduct(cpsi).sum());
      const double dW = sq * rng.normal();
      incr += (0.5 * x * h + dW) * cpsi - (x * x * h / 8.0 + 0.5 * x * dW) * psi;
    }
    DenseMat next = psi + incr;
    const double nn = next.norm();
    ++diag.steps;
    if (!std::isfinite(nn) || nn < 1e-3) throw StepSizeError("diffusive step lost the state norm");
    st.amplitudes = next / nn;
    t += h;
  }
  st.time = t;
  st.norm = 1.0;
  return {acc.finish(), std::move(diag), std::move(st)};
}

}  // namespace manylaser
