#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "manylaser/hilbert.hpp"

namespace manylaser {

class DensityMatrix;

// Model constants, all energies and rates in units of J. The frame rotates at
// the common emitter/cavity frequency, so no bare frequencies appear.
struct SystemParams {
  int L = 4;
  double J = 1.0;
  double U = 1.0;
  double g = 0.1;
  double P = 1.0;
  double kappa = 0.05;
  // Fock states kept (basis |0>..|n_max-1>). 0 means "choose adaptively".
  int n_max = 0;
  // Only the open chain (L-1 bonds) is supported.
  std::string boundary = "open";

  // Throws DomainError naming the offending field.
  void validate() const;
  SpaceDescriptor space() const;
  SystemParams with_n_max(int n) const;
  bool operator==(const SystemParams&) const = default;
};

// Parameters used throughout the figures: g = 0.1J, kappa = 0.5g, P = J.
SystemParams figure_defaults(int L, double U);

// J sum_bonds (X_i X_j + Y_i Y_j) + U sum_bonds Z_i Z_j on an open chain.
SparseOperator build_hxxz(const SystemParams& params, const SpaceDescriptor& desc);
// Spin-only version on the 2^L space.
SparseOperator build_hxxz_spins(int L, double J, double U);
// g sum_i (a s_i^+ + a^dag s_i^-).
SparseOperator build_htc(const SystemParams& params, const SpaceDescriptor& desc);
SparseOperator build_hamiltonian(const SystemParams& params, const SpaceDescriptor& desc);

struct CollapseOperator {
  enum class Channel { Pump, Loss };
  Channel channel;
  int site = 0;  // 1-based for pump channels, 0 for the cavity
  SparseOperator op;  // rate already folded in: sqrt(P) s_i^+ or sqrt(kappa) a
};

std::vector<CollapseOperator> collapse_operators(const SystemParams& params, const SpaceDescriptor& desc);

// D_x(rho) = -1/2 (x^dag x rho + rho x^dag x) + x rho x^dag.
DenseMat apply_dissipator(const SparseOperator& x, const DenseMat& rho);
DensityMatrix apply_dissipator(const SparseOperator& x, const DensityMatrix& rho);

// Right side of the master equation evaluated directly on a dense rho.
DenseMat lindblad_rhs(const SystemParams& params, const SpaceDescriptor& desc, const DenseMat& rho);

struct LiouvillianBudget {
  // Largest accepted dimension of the vectorized Liouvillian, (2^6 * 10)^2.
  std::size_t max_dimension = 409600;
};

// Column-stacked superoperator: vec(A rho B) = (B^T (x) A) vec(rho).
struct LiouvillianMatrix {
  SparseOperator matrix;
  SystemParams params;
  SpaceDescriptor desc;
};

// Requires params.n_max > 0. Throws BudgetError above the budget.
LiouvillianMatrix build_liouvillian(const SystemParams& params, const LiouvillianBudget& budget = {});

// vec(rho) in column-major order and back.
DenseVec vectorize(const DenseMat& rho);
DenseMat unvectorize(const DenseVec& v, std::size_t dim);

}  // namespace manylaser
