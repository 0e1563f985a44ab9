#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "manylaser/density.hpp"
#include "manylaser/model.hpp"
#include "manylaser/sector.hpp"

namespace manylaser {

struct NessDiagnostics {
  double residual_norm = 0.0;        // ||L vec(rho)||_2 before cleanup
  double liouvillian_max_entry = 0.0;
  double trace_error = 0.0;          // |tr(rho) - 1| before renormalization
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  double top_fock_population = 0.0;  // probability of |n_max - 1>
  std::string method;                // "direct" or "iterative"
  int iterations = 0;
  // Second-smallest singular value of L, computed only for small systems
  // (NaN otherwise). Reported, never asserted.
  double uniqueness_probe = 0.0;
};

struct NessResult {
  DensityMatrix rho;
  NessDiagnostics diagnostics;
};

struct NessOptions {
  enum class Method { Auto, Direct, Iterative };
  Method method = Method::Auto;
  // Accept when residual <= residual_factor * max|L_ij|.
  double residual_factor = 1e-9;
  // Auto picks the sparse LU while its estimated factor size stays below this.
  double direct_budget_entries = 4.0e6;
  // Memory ceiling for the Krylov basis of the iterative path.
  std::size_t memory_budget_bytes = std::size_t{3} << 30;
  int gmres_restart = 60;
  int max_iterations = 3000;
  // Compute the singular-value uniqueness probe up to this vectorized size.
  std::size_t probe_max_dim = 600;
};

// Full vectorized Liouvillian: solves (L + b <<I|) x = b, b = |0>>.
NessResult solve_ness(const LiouvillianMatrix& liou, const NessOptions& options = {});

// Same bordered system restricted to the zero excitation-difference sector.
NessResult solve_ness(const SectorLiouvillian& liou, const NessOptions& options = {});

struct CutoffStep {
  int n_max = 0;
  double photon_number = 0.0;
  double top_fock_population = 0.0;
};

struct AdaptiveOptions {
  double top_population_tol = 1e-8;
  double relative_photon_tol = 1e-4;
  double growth = 1.5;
  int confirm_increment = 4;
  // Cutoff search stops with a BudgetError beyond this many Fock states.
  int max_n_max = 400;
  NessOptions solver;
};

struct AdaptiveNessResult {
  DensityMatrix rho;
  NessDiagnostics diagnostics;
  int chosen_n_max = 0;
  std::vector<CutoffStep> trend;
};

// Geometric cutoff schedule starting at L + 2. A cutoff n is accepted when
// its top Fock population is below tolerance and a confirmation solve at
// n + confirm_increment moves <a^dag a> by less than the relative tolerance.
AdaptiveNessResult adaptive_cutoff_ness(const SystemParams& params, const AdaptiveOptions& options = {});

// Convenience: exact NESS at params.n_max if set, else adaptive.
AdaptiveNessResult exact_ness(const SystemParams& params, const AdaptiveOptions& options = {});

// Diagnostics only; never modifies rho. `tol` is reported against but does
// not cause failures.
NessDiagnostics validate_density_matrix(const DensityMatrix& rho, double tol = 1e-10);

}  // namespace manylaser
