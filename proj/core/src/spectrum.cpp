#include "manylaser/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

int down_count(std::size_t s) { return std::popcount(static_cast<std::uint64_t>(s)); }

bool same_level(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)); }

// Canonical orthonormal basis of span(v): Gram-Schmidt over the columns of
// the projector v v^dag, in basis order.
DenseMat canonical_basis(const DenseMat& v) {
  const Eigen::Index k = v.cols();
  const DenseMat proj = v * v.adjoint();
  DenseMat out(v.rows(), k);
  Eigen::Index found = 0;
  for (Eigen::Index c = 0; c < proj.cols() && found < k; ++c) {
    DenseVec w = proj.col(c);
    for (Eigen::Index j = 0; j < found; ++j) w -= out.col(j) * out.col(j).dot(w);
    const double nrm = w.norm();
    if (nrm < 1e-6) continue;
    w /= nrm;
    Eigen::Index big = 0;
    w.cwiseAbs().maxCoeff(&big);
    w *= std::abs(w(big)) / w(big);
    out.col(found++) = w;
  }
  if (found != k) throw ConsistencyError("diagonalize_xxz: degenerate multiplet lost rank");
  return out;
}

}  // namespace

XxzEigenbasis diagonalize_xxz(const SystemParams& params) {
  if (params.L < 1) throw DomainError("diagonalize_xxz: L must be >= 1");
  if (params.L > 12) throw BudgetError("diagonalize_xxz: L above 12 exceeds the dense diagonalization budget");
  const int L = params.L;
  const std::size_t dim = std::size_t{1} << L;
  const DenseMat h = build_hxxz_spins(L, params.J, params.U).to_dense();

  XxzEigenbasis out;
  out.L = L;
  out.energies.resize(static_cast<Eigen::Index>(dim));
  out.magnetization.reserve(dim);
  out.vectors = DenseMat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::Index col = 0;
  for (int downs = 0; downs <= L; ++downs) {
    std::vector<Eigen::Index> members;
    for (std::size_t s = 0; s < dim; ++s)
      if (down_count(s) == downs) members.push_back(static_cast<Eigen::Index>(s));
    const auto d = static_cast<Eigen::Index>(members.size());
    DenseMat block(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) block(i, j) = h(members[i], members[j]);
    Eigen::SelfAdjointEigenSolver<DenseMat> es(block);
    DenseMat vecs = DenseMat::Zero(static_cast<Eigen::Index>(dim), d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) vecs(members[i], j) = es.eigenvectors()(i, j);
    const Eigen::VectorXd& e = es.eigenvalues();
    for (Eigen::Index start = 0; start < d;) {
      Eigen::Index stop = start + 1;
      while (stop < d && same_level(e(start), e(stop))) ++stop;
      const DenseMat canon = canonical_basis(vecs.middleCols(start, stop - start));
      for (Eigen::Index k = start; k < stop; ++k) {
        out.energies(col) = e(k);
        out.magnetization.push_back(L - 2 * downs);
        out.vectors.col(col) = canon.col(k - start);
        ++col;
      }
      start = stop;
    }
  }
  return out;
}

std::vector<SpectralRecord> spectral_decomposition(const DensityMatrix& rho_spin, const XxzEigenbasis& basis) {
  const auto dim = basis.vectors.rows();
  if (static_cast<Eigen::Index>(rho_spin.dim()) != dim) {
    throw DomainError("spectral_decomposition: rho has dimension " + std::to_string(rho_spin.dim()) +
                      ", eigenbasis " + std::to_string(dim));
  }
  const DenseMat rho = rho_spin.to_dense();
  const auto bright = bright_states(basis.L);

  std::vector<SpectralRecord> records;
  records.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index start = 0; start < dim;) {
    Eigen::Index stop = start + 1;
    while (stop < dim && basis.magnetization[static_cast<std::size_t>(stop)] ==
                             basis.magnetization[static_cast<std::size_t>(start)] &&
           same_level(basis.energies(start), basis.energies(stop)))
      ++stop;
    const DenseMat v = basis.vectors.middleCols(start, stop - start);
    DenseMat projected = v.adjoint() * rho * v;
    projected = 0.5 * (projected + DenseMat(projected.adjoint()));
    Eigen::VectorXd probs;
    DenseMat rotated;
    if (projected.rows() == 1) {
      probs = Eigen::VectorXd::Constant(1, projected(0, 0).real());
      rotated = v;
    } else {
      Eigen::SelfAdjointEigenSolver<DenseMat> es(projected);
      // descending probability inside the multiplet
      probs = es.eigenvalues().reverse();
      rotated = v * es.eigenvectors().rowwise().reverse();
    }
    const int mag = basis.magnetization[static_cast<std::size_t>(start)];
    const DenseVec& sym = bright[static_cast<std::size_t>((basis.L - mag) / 2)].amplitudes;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
      SpectralRecord r;
      r.eigen_index = static_cast<int>(start + k);
      r.energy = basis.energies(start + k);
      r.magnetization = mag;
      r.probability = probs(k);
      r.bright = std::norm(sym.dot(rotated.col(k))) > 1.0 - 1e-6;
      records.push_back(r);
    }
    start = stop;
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].probability > records[b].probability; });
  for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) records[order[k]].top3 = true;
  return records;
}

std::vector<BrightState> bright_states(int L) {
  if (L < 1) throw DomainError("bright_states: L must be >= 1");
  if (L > 24) throw BudgetError("bright_states: L above 24");
  const std::size_t dim = std::size_t{1} << L;
  std::vector<BrightState> out;
  out.reserve(static_cast<std::size_t>(L) + 1);
  for (int n = 0; n <= L; ++n) {
    BrightState b;
    b.n = n;
    b.magnetization = L - 2 * n;
    b.amplitudes = DenseVec::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s)
      if (down_count(s) == n) b.amplitudes(static_cast<Eigen::Index>(s)) = 1.0;
    b.amplitudes.normalize();
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace manylaser
