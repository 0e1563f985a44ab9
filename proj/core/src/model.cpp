#include "manylaser/model.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "manylaser/density.hpp"
#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw DomainError(std::string("SystemParams.") + field + " must be finite");
}

}  // namespace

void SystemParams::validate() const {
  if (L < 1) throw DomainError("SystemParams.L must be >= 1");
  require_finite(J, "J");
  require_finite(U, "U");
  require_finite(g, "g");
  require_finite(P, "P");
  require_finite(kappa, "kappa");
  if (J < 0.0) throw DomainError("SystemParams.J must be >= 0");
  if (g < 0.0) throw DomainError("SystemParams.g must be >= 0");
  if (P < 0.0) throw DomainError("SystemParams.P must be >= 0");
  if (kappa < 0.0) throw DomainError("SystemParams.kappa must be >= 0");
  if (n_max < 0) throw DomainError("SystemParams.n_max must be >= 0 (0 selects the adaptive cutoff)");
  if (boundary != "open") throw DomainError("SystemParams.boundary: only \"open\" is supported");
}

SpaceDescriptor SystemParams::space() const {
  validate();
  if (n_max < 1) throw DomainError("SystemParams.n_max must be set (>= 1) to build operators");
  return SpaceDescriptor(L, n_max);
}

SystemParams SystemParams::with_n_max(int n) const {
  SystemParams p = *this;
  p.n_max = n;
  return p;
}

SystemParams figure_defaults(int L, double U) {
  SystemParams p;
  p.L = L;
  p.J = 1.0;
  p.U = U;
  p.g = 0.1;
  p.kappa = 0.5 * p.g;
  p.P = 1.0;
  return p;
}

SparseOperator build_hxxz_spins(int L, double J, double U) {
  const std::size_t dim = std::size_t{1} << L;
  SparseOperator h = SparseOperator::zero(dim);
  for (int i = 1; i < L; ++i) {
    const auto xx = spin_only_operator(L, i, SpinKind::X) * spin_only_operator(L, i + 1, SpinKind::X);
    const auto yy = spin_only_operator(L, i, SpinKind::Y) * spin_only_operator(L, i + 1, SpinKind::Y);
    const auto zz = spin_only_operator(L, i, SpinKind::Z) * spin_only_operator(L, i + 1, SpinKind::Z);
    h = h + cplx{J} * (xx + yy) + cplx{U} * zz;
  }
  return h;
}

SparseOperator build_hxxz(const SystemParams& params, const SpaceDescriptor& desc) {
  return kron(build_hxxz_spins(desc.num_spins(), params.J, params.U),
              SparseOperator::identity(static_cast<std::size_t>(desc.fock_dim())));
}

SparseOperator build_htc(const SystemParams& params, const SpaceDescriptor& desc) {
  const auto a = boson_operator(desc, BosonKind::Annihilate);
  const auto ad = boson_operator(desc, BosonKind::Create);
  SparseOperator h = SparseOperator::zero(desc.dim());
  for (int i = 1; i <= desc.num_spins(); ++i) {
    h = h + a * spin_operator(desc, i, SpinKind::Raise) + ad * spin_operator(desc, i, SpinKind::Lower);
  }
  return cplx{params.g} * h;
}

SparseOperator build_hamiltonian(const SystemParams& params, const SpaceDescriptor& desc) {
  return build_hxxz(params, desc) + build_htc(params, desc);
}

std::vector<CollapseOperator> collapse_operators(const SystemParams& params, const SpaceDescriptor& desc) {
  std::vector<CollapseOperator> ops;
  ops.reserve(static_cast<std::size_t>(desc.num_spins()) + 1);
  const double sp = std::sqrt(params.P);
  for (int i = 1; i <= desc.num_spins(); ++i) {
    ops.push_back({CollapseOperator::Channel::Pump, i, cplx{sp} * spin_operator(desc, i, SpinKind::Raise)});
  }
  ops.push_back({CollapseOperator::Channel::Loss, 0,
                 cplx{std::sqrt(params.kappa)} * boson_operator(desc, BosonKind::Annihilate)});
  return ops;
}

DenseMat apply_dissipator(const SparseOperator& x, const DenseMat& rho) {
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != x.dim()) {
    throw DomainError("apply_dissipator: dimension mismatch");
  }
  const SparseMat& m = x.matrix();
  const SparseMat xdx = m.adjoint() * m;
  DenseMat out = -0.5 * (xdx * rho + rho * xdx);
  const DenseMat xr = m * rho;
  out += xr * m.adjoint();
  return out;
}

DensityMatrix apply_dissipator(const SparseOperator& x, const DensityMatrix& rho) {
  if (rho.dim() != x.dim()) throw DomainError("apply_dissipator: dimension mismatch");
  return DensityMatrix(rho.desc(), apply_dissipator(x, rho.to_dense()));
}

DenseMat lindblad_rhs(const SystemParams& params, const SpaceDescriptor& desc, const DenseMat& rho) {
  const cplx I{0.0, 1.0};
  const SparseMat h = build_hamiltonian(params, desc).matrix();
  DenseMat out = -I * (h * rho - rho * h);
  for (const auto& c : collapse_operators(params, desc)) out += apply_dissipator(c.op, rho);
  return out;
}

LiouvillianMatrix build_liouvillian(const SystemParams& params, const LiouvillianBudget& budget) {
  const SpaceDescriptor desc = params.space();
  const std::size_t d = desc.dim();
  if (d * d > budget.max_dimension) {
    throw BudgetError("build_liouvillian: vectorized dimension " + std::to_string(d * d) + " exceeds budget " +
                      std::to_string(budget.max_dimension) +
                      "; use the excitation-sector solver or trajectory mode");
  }
  const cplx I{0.0, 1.0};
  const SparseMat id = SparseOperator::identity(d).matrix();
  const SparseMat h = build_hamiltonian(params, desc).matrix();
  const SparseMat ht = h.transpose();

  SparseMat l = SparseMat(Eigen::kroneckerProduct(id, h)) - SparseMat(Eigen::kroneckerProduct(ht, id));
  l = -I * l;
  for (const auto& c : collapse_operators(params, desc)) {
    const SparseMat& m = c.op.matrix();
    const SparseMat cdc = m.adjoint() * m;
    const SparseMat cdct = cdc.transpose();
    const SparseMat mc = m.conjugate();
    l += SparseMat(Eigen::kroneckerProduct(mc, m));
    l -= 0.5 * SparseMat(Eigen::kroneckerProduct(id, cdc));
    l -= 0.5 * SparseMat(Eigen::kroneckerProduct(cdct, id));
  }
  return LiouvillianMatrix{SparseOperator(std::move(l)), params, desc};
}

DenseVec vectorize(const DenseMat& rho) {
  return Eigen::Map<const DenseVec>(rho.data(), rho.size());
}

DenseMat unvectorize(const DenseVec& v, std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != dim * dim) throw DomainError("unvectorize: size mismatch");
  return Eigen::Map<const DenseMat>(v.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

}  // namespace manylaser
