#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "manylaser/hilbert.hpp"

namespace manylaser {

// A diagonal block of a density matrix: rows and columns are the global basis
// states listed in `states`.
struct DensityBlock {
  std::vector<std::size_t> states;
  DenseMat values;
};

// Density matrix stored as a direct sum of dense blocks over a partition of
// the basis. A generic dense matrix is the single-block case; steady states
// are block diagonal in the excitation number, which keeps large cutoffs
// affordable. Entries between different blocks are exactly zero.
class DensityMatrix {
 public:
  DensityMatrix(SpaceDescriptor desc, DenseMat dense);
  DensityMatrix(SpaceDescriptor desc, std::vector<DensityBlock> blocks);

  static DensityMatrix pure(SpaceDescriptor desc, const DenseVec& psi);

  const SpaceDescriptor& desc() const noexcept { return desc_; }
  std::size_t dim() const noexcept { return desc_.dim(); }
  const std::vector<DensityBlock>& blocks() const noexcept { return blocks_; }

  cplx coeff(std::size_t row, std::size_t col) const;
  cplx trace() const;
  // Throws BudgetError when the dense form would exceed max_dim.
  DenseMat to_dense(std::size_t max_dim = 20000) const;

  // sum_k rho_kk f(k) for observables diagonal in the product basis.
  double diagonal_expectation(const std::function<double(std::size_t)>& f) const;

  // Largest |rho_ij - conj(rho_ji)|.
  double hermiticity_defect() const;
  // Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

  DensityMatrix hermitized() const;
  DensityMatrix normalized() const;

 private:
  void build_lookup();

  SpaceDescriptor desc_;
  std::vector<DensityBlock> blocks_;
  // global index -> (block, position inside block)
  std::vector<std::pair<int, int>> where_;
};

}  // namespace manylaser
