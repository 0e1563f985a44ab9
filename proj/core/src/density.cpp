#include "manylaser/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manylaser/errors.hpp"

namespace manylaser {

DensityMatrix::DensityMatrix(SpaceDescriptor desc, DenseMat dense) : desc_(desc) {
  if (static_cast<std::size_t>(dense.rows()) != desc_.dim() || dense.rows() != dense.cols()) {
    throw DomainError("DensityMatrix: matrix is " + std::to_string(dense.rows()) + "x" +
                      std::to_string(dense.cols()) + ", descriptor wants " + std::to_string(desc_.dim()));
  }
  DensityBlock all;
  all.states.resize(desc_.dim());
  for (std::size_t i = 0; i < all.states.size(); ++i) all.states[i] = i;
  all.values = std::move(dense);
  blocks_.push_back(std::move(all));
  build_lookup();
}

DensityMatrix::DensityMatrix(SpaceDescriptor desc, std::vector<DensityBlock> blocks)
    : desc_(desc), blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (static_cast<std::size_t>(b.values.rows()) != b.states.size() || b.values.rows() != b.values.cols()) {
      throw DomainError("DensityMatrix: block shape does not match its state list");
    }
  }
  build_lookup();
}

DensityMatrix DensityMatrix::pure(SpaceDescriptor desc, const DenseVec& psi) {
  if (static_cast<std::size_t>(psi.size()) != desc.dim()) throw DomainError("DensityMatrix::pure: size mismatch");
  return DensityMatrix(desc, DenseMat(psi * psi.adjoint()));
}

void DensityMatrix::build_lookup() {
  where_.assign(desc_.dim(), {-1, -1});
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& states = blocks_[b].states;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const std::size_t s = states[k];
      if (s >= desc_.dim()) throw DomainError("DensityMatrix: block state index out of range");
      if (where_[s].first != -1) throw DomainError("DensityMatrix: blocks overlap");
      where_[s] = {static_cast<int>(b), static_cast<int>(k)};
    }
  }
}

cplx DensityMatrix::coeff(std::size_t row, std::size_t col) const {
  if (row >= dim() || col >= dim()) throw DomainError("DensityMatrix::coeff: index out of range");
  const auto [br, kr] = where_[row];
  const auto [bc, kc] = where_[col];
  if (br < 0 || br != bc) return cplx{0.0, 0.0};
  return blocks_[static_cast<std::size_t>(br)].values(kr, kc);
}

cplx DensityMatrix::trace() const {
  cplx t{0.0, 0.0};
  for (const auto& b : blocks_) t += b.values.trace();
  return t;
}

DenseMat DensityMatrix::to_dense(std::size_t max_dim) const {
  if (dim() > max_dim) {
    throw BudgetError("DensityMatrix::to_dense: dimension " + std::to_string(dim()) + " above limit " +
                      std::to_string(max_dim));
  }
  DenseMat out = DenseMat::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
  for (const auto& b : blocks_) {
    for (std::size_t c = 0; c < b.states.size(); ++c)
      for (std::size_t r = 0; r < b.states.size(); ++r)
        out(static_cast<Eigen::Index>(b.states[r]), static_cast<Eigen::Index>(b.states[c])) =
            b.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

double DensityMatrix::diagonal_expectation(const std::function<double(std::size_t)>& f) const {
  double acc = 0.0;
  for (const auto& b : blocks_)
    for (std::size_t k = 0; k < b.states.size(); ++k)
      acc += b.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real() * f(b.states[k]);
  return acc;
}

double DensityMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& b : blocks_) {
    if (b.values.size() == 0) continue;
    worst = std::max(worst, (b.values - b.values.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double DensityMatrix::min_eigenvalue() const {
  double lowest = std::numeric_limits<double>::infinity();
  std::size_t covered = 0;
  for (const auto& b : blocks_) {
    covered += b.states.size();
    if (b.values.size() == 0) continue;
    const DenseMat herm = 0.5 * (b.values + b.values.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMat> es(herm, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, es.eigenvalues().minCoeff());
  }
  if (covered < dim()) lowest = std::min(lowest, 0.0);
  return lowest;
}

DensityMatrix DensityMatrix::hermitized() const {
  std::vector<DensityBlock> out = blocks_;
  for (auto& b : out) b.values = 0.5 * (b.values + DenseMat(b.values.adjoint()));
  return DensityMatrix(desc_, std::move(out));
}

DensityMatrix DensityMatrix::normalized() const {
  const cplx t = trace();
  if (std::abs(t) == 0.0) throw DomainError("DensityMatrix::normalized: zero trace");
  std::vector<DensityBlock> out = blocks_;
  for (auto& b : out) b.values /= t;
  return DensityMatrix(desc_, std::move(out));
}

}  // namespace manylaser
