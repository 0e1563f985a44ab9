#pragma once

#include <cstddef>
#include <vector>

#include "manylaser/density.hpp"
#include "manylaser/hilbert.hpp"
#include "manylaser/model.hpp"

namespace manylaser {

// The Hamiltonian conserves N = (up spins) + (photons); pump jumps raise N by
// one and cavity loss lowers it by one. The Liouvillian therefore never mixes
// coherences |i><j| with different N_i - N_j, and the steady state lives in
// the block-diagonal subspace N_i = N_j. This class stores the Liouvillian
// restricted to that subspace as a ladder of dense per-N blocks:
//
//   (L rho)_N = A_N rho_N + rho_N A_N^dag
//             + sum_i S_{N,i} rho_{N-1} S_{N,i}^dag + K_N rho_{N+1} K_N^dag
//
// with A_N = -i H_N - Gamma_N / 2, S the pump operators and K the loss
// operator (rates folded in). Vector layout: blocks in increasing N, each
// block column-major.
struct LadderSector {
  int excitations = 0;
  std::vector<std::size_t> states;  // global basis indices, ascending
  DenseMat drift;                   // A_N
  std::vector<SparseMat> pump_in;   // per site, d_N x d_{N-1}
  SparseMat loss_in;                // d_N x d_{N+1}
  std::size_t offset = 0;

  std::size_t size() const noexcept { return states.size(); }
  std::size_t block_len() const noexcept { return states.size() * states.size(); }
};

class SectorLiouvillian {
 public:
  SectorLiouvillian(SystemParams params, SpaceDescriptor desc, std::vector<LadderSector> sectors);

  const SystemParams& params() const noexcept { return params_; }
  const SpaceDescriptor& desc() const noexcept { return desc_; }
  const std::vector<LadderSector>& sectors() const noexcept { return sectors_; }
  std::size_t dim() const noexcept { return dim_; }

  // y = L x without forming the matrix.
  void apply(const DenseVec& x, DenseVec& y) const;
  DenseVec apply(const DenseVec& x) const;

  // Sparse matrix of the restricted Liouvillian (same column-stacking as
  // build_liouvillian, restricted to the kept coherences).
  SparseMat assemble() const;

  // Largest |entry| of the restricted matrix, from the block data.
  double max_abs_entry() const;

  // Position of the coherence |row><col| in the vector, or -1 if outside.
  long position(std::size_t row, std::size_t col) const;

  // <<I| restricted: the trace functional.
  cplx trace(const DenseVec& x) const;

  DensityMatrix to_density(const DenseVec& x) const;
  DenseVec from_density(const DensityMatrix& rho) const;

  // Entries a block-tridiagonal LU of the bordered system would hold.
  double estimated_factor_entries() const;

 private:
  SystemParams params_;
  SpaceDescriptor desc_;
  std::vector<LadderSector> sectors_;
  std::vector<int> sector_of_state_;
  std::vector<int> slot_of_state_;
  std::size_t dim_ = 0;
};

SectorLiouvillian build_sector_liouvillian(const SystemParams& params);

// Symmetric block Gauss-Seidel sweep along the excitation ladder with exact
// per-block Sylvester solves (A X + X A^dag = C via eigendecomposition of A).
class LadderPreconditioner {
 public:
  LadderPreconditioner() = default;
  explicit LadderPreconditioner(const SectorLiouvillian& liou);

  DenseVec apply(const DenseVec& v) const;
  bool ready() const noexcept { return liou_ != nullptr; }

 private:
  struct Factor {
    DenseMat vecs, inv_vecs, vecs_adj, inv_vecs_adj;
    DenseMat inv_denominator;  // 1 / (lambda_i + conj(lambda_j))
  };
  void sylvester(std::size_t n, const cplx* rhs, cplx* out) const;
  void add_pump(std::size_t n, const cplx* lower, cplx* out, double sign) const;
  void add_loss(std::size_t n, const cplx* upper, cplx* out, double sign) const;

  const SectorLiouvillian* liou_ = nullptr;
  std::vector<Factor> factors_;
};

}  // namespace manylaser
