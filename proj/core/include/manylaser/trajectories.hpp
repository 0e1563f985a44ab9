#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manylaser/hilbert.hpp"
#include "manylaser/model.hpp"

namespace manylaser {

struct Schedule {
  // Integration step; 0 picks min(0.05 / max(J, |U|, P, kappa, g sqrt(n)),
  // 1 / ||H_eff||) and follows the photon number as it grows.
  double dt = 0.0;
  double t_burn = 0.0;
  double t_total = 0.0;
  double sample_every = 0.0;

  // t_burn = 50/kappa, t_total = 550/kappa, sample_every = 1/kappa.
  static Schedule defaults(const SystemParams& params);
  void validate() const;
};

// Pure state on spins (x) Fock window. amplitudes(s, w) multiplies
// |s> (x) |fock_base + w>; the window always holds L + 1 Fock states for jump
// trajectories.
struct TrajectoryState {
  DenseMat amplitudes;
  int fock_base = 0;
  int excitations = 0;  // conserved between jumps; -1 for diffusive states
  double time = 0.0;
  std::uint64_t seed = 0;
  double norm = 1.0;  // squared norm
};

struct JumpEvent {
  double time = 0.0;
  CollapseOperator::Channel channel = CollapseOperator::Channel::Pump;
  int site = 0;
};

// Time averages over the samples taken at t_burn, t_burn + sample_every, ...
struct TrajectoryAverages {
  int samples = 0;
  double photons = 0.0;
  double factorial_moment = 0.0;  // <a^dag a^dag a a>
  double magnetization = 0.0;     // Z_T
  Eigen::VectorXd z;              // <Z_i>
  Eigen::MatrixXd zz;             // <Z_i Z_j>
  std::optional<DenseMat> mean_state;  // time-averaged |psi><psi| (diffusive, on request)
};

struct TrajectoryDiagnostics {
  long jumps = 0;
  long steps = 0;
  double max_window_leakage = 0.0;
  int min_window_width = 0;
  int max_window_width = 0;
  std::vector<JumpEvent> events;
};

struct TrajectoryOptions {
  bool record_events = false;
  bool accumulate_state = false;
  double leakage_tolerance = 1e-10;
};

struct TrajectoryResult {
  TrajectoryAverages averages;
  TrajectoryDiagnostics diagnostics;
  TrajectoryState final_state;
};

// Quantum-jump unraveling from |down...down> (x) |0> with a sliding (L+1)-state
// Fock window.
TrajectoryResult run_jump_trajectory(const SystemParams& params, std::uint64_t seed, const Schedule& schedule,
                                     const TrajectoryOptions& options = {});

// Homodyne diffusive unraveling at the fixed cutoff params.n_max (must be set).
TrajectoryResult run_diffusive_trajectory(const SystemParams& params, std::uint64_t seed, const Schedule& schedule,
                                          const TrajectoryOptions& options = {});

enum class Unraveling { Jump, Diffusive };

struct EnsembleEstimate {
  std::string observable_name;
  int site_a = 0;
  int site_b = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  bool defined = true;
  int num_trajectories = 0;
  double burn_in = 0.0;
  double total_time = 0.0;
};

struct EnsembleResult {
  std::vector<EnsembleEstimate> estimates;
  std::vector<TrajectoryAverages> per_trajectory;
  std::vector<TrajectoryDiagnostics> diagnostics;

  // Throws DomainError when absent.
  const EnsembleEstimate& get(const std::string& name, int site_a = 0, int site_b = 0) const;
  std::optional<DenseMat> mean_state() const;
};

// Trajectory k uses seed base_seed + k; aggregation is ordered by k, so the
// result is identical for any thread count.
EnsembleResult estimate_ensemble(const SystemParams& params, int num_trajectories, std::uint64_t base_seed,
                                 const Schedule& schedule, Unraveling unraveling = Unraveling::Jump,
                                 const TrajectoryOptions& options = {});

// CSV with columns trajectory,time,channel,site.
void write_event_log(const std::string& path, const std::vector<TrajectoryDiagnostics>& runs);

}  // namespace manylaser
