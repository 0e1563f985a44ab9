#include "manylaser/ness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "manylaser/errors.hpp"
#include "manylaser/observables.hpp"

namespace manylaser {
namespace detail {

// Bordered sector operator x -> L x + b <<I|x> for Eigen's matrix-free GMRES.
class BorderedSectorOperator;

}  // namespace detail
}  // namespace manylaser

namespace Eigen::internal {
template <>
struct traits<manylaser::detail::BorderedSectorOperator>
    : public Eigen::internal::traits<Eigen::SparseMatrix<std::complex<double>>> {};
}  // namespace Eigen::internal

namespace manylaser::detail {

class BorderedSectorOperator : public Eigen::EigenBase<BorderedSectorOperator> {
 public:
  using Scalar = cplx;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  BorderedSectorOperator(const SectorLiouvillian& liou, long border) : liou_(&liou), border_(border) {}

  Eigen::Index rows() const { return static_cast<Eigen::Index>(liou_->dim()); }
  Eigen::Index cols() const { return rows(); }

  template <typename Rhs>
  Eigen::Product<BorderedSectorOperator, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<BorderedSectorOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  DenseVec apply(const DenseVec& x) const {
    DenseVec y = liou_->apply(x);
    y(border_) += liou_->trace(x);
    return y;
  }

 private:
  const SectorLiouvillian* liou_;
  long border_;
};

class LadderGmresPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  LadderGmresPreconditioner() = default;
  void set(const LadderPreconditioner* p) { p_ = p; }

  template <typename M>
  LadderGmresPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  LadderGmresPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  LadderGmresPreconditioner& compute(const M&) { return *this; }

  template <typename Rhs>
  DenseVec solve(const Rhs& b) const {
    return p_->apply(DenseVec(b));
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const LadderPreconditioner* p_ = nullptr;
};

}  // namespace manylaser::detail

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<manylaser::detail::BorderedSectorOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<manylaser::detail::BorderedSectorOperator, Rhs,
                                generic_product_impl<manylaser::detail::BorderedSectorOperator, Rhs>> {
  using Scalar = typename Product<manylaser::detail::BorderedSectorOperator, Rhs>::Scalar;

  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const manylaser::detail::BorderedSectorOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(manylaser::DenseVec(rhs));
  }
};
}  // namespace Eigen::internal

namespace manylaser {

namespace {

double top_fock(const DensityMatrix& rho) {
  const int top = rho.desc().fock_dim() - 1;
  return rho.diagonal_expectation(
      [&](std::size_t i) { return rho.desc().photons_of(i) == top ? 1.0 : 0.0; });
}

double uniqueness_probe(const SparseMat& l, std::size_t max_dim) {
  if (static_cast<std::size_t>(l.rows()) > max_dim || l.rows() < 2) return std::numeric_limits<double>::quiet_NaN();
  Eigen::BDCSVD<DenseMat> svd(DenseMat(l), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  return s(s.size() - 2);
}

// Shared post-processing: diagnostics on the raw solution, then cleanup.
NessResult finish(DensityMatrix raw, double residual, double lmax, const std::string& method, int iterations,
                  double probe, const NessOptions& options) {
  NessDiagnostics diag;
  diag.residual_norm = residual;
  diag.liouvillian_max_entry = lmax;
  diag.trace_error = std::abs(raw.trace() - cplx{1.0, 0.0});
  diag.hermiticity_defect = raw.hermiticity_defect();
  diag.method = method;
  diag.iterations = iterations;
  diag.uniqueness_probe = probe;

  if (!std::isfinite(residual)) throw ConvergenceError("solve_ness: non-finite solution", residual);
  if (residual > options.residual_factor * lmax) {
    std::ostringstream msg;
    msg << "solve_ness: residual " << residual << " above target " << options.residual_factor * lmax << " ("
        << method << ")";
    throw ConvergenceError(msg.str(), residual);
  }
  DensityMatrix rho = raw.normalized().hermitized();
  diag.min_eigenvalue = rho.min_eigenvalue();
  diag.top_fock_population = top_fock(rho);
  return NessResult{std::move(rho), diag};
}

DenseVec sparse_lu_solve(const SparseMat& a, const DenseVec& b, const char* where) {
  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw DegeneracyError(std::string(where) + ": bordered Liouvillian is singular (steady state not unique): " +
                          lu.lastErrorMessage());
  }
  DenseVec x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw DegeneracyError(std::string(where) + ": sparse LU solve failed");
  }
  return x;
}

void check_iterative_memory(std::size_t dim, const NessOptions& options) {
  const std::size_t bytes = dim * sizeof(cplx) * (static_cast<std::size_t>(options.gmres_restart) + 8);
  if (bytes > options.memory_budget_bytes) {
    throw BudgetError("solve_ness: iterative solve needs ~" + std::to_string(bytes >> 20) + " MiB, budget is " +
                      std::to_string(options.memory_budget_bytes >> 20) + " MiB; use trajectory mode");
  }
}

}  // namespace

NessResult solve_ness(const LiouvillianMatrix& liou, const NessOptions& options) {
  const SparseMat& l = liou.matrix.matrix();
  const std::size_t d = liou.desc.dim();
  const auto n = static_cast<Eigen::Index>(d * d);
  if (l.rows() != n) throw DomainError("solve_ness: Liouvillian does not match its descriptor");

  // Border: row 0 gains <<I|, the entries at the diagonal positions k*(d+1).
  SparseMat bordered = l;
  {
    std::vector<Eigen::Triplet<cplx, int>> t;
    t.reserve(d);
    for (std::size_t k = 0; k < d; ++k) t.emplace_back(0, static_cast<int>(k * (d + 1)), 1.0);
    SparseMat border(n, n);
    border.setFromTriplets(t.begin(), t.end());
    bordered += border;
    bordered.makeCompressed();
  }
  DenseVec b = DenseVec::Zero(n);
  b(0) = 1.0;

  const double lmax = l.nonZeros() > 0 ? l.coeffs().cwiseAbs().maxCoeff() : 0.0;
  const double probe = uniqueness_probe(l, options.probe_max_dim);

  DenseVec x;
  std::string method = "direct";
  int iterations = 0;
  const double fill = 2.0 * static_cast<double>(bordered.nonZeros()) * static_cast<double>(d);
  const bool direct = options.method == NessOptions::Method::Direct ||
                      (options.method == NessOptions::Method::Auto && fill <= options.direct_budget_entries);
  if (direct) {
    x = sparse_lu_solve(bordered, b, "solve_ness");
  } else {
    check_iterative_memory(static_cast<std::size_t>(n), options);
    Eigen::GMRES<SparseMat, Eigen::IncompleteLUT<cplx>> gmres;
    gmres.preconditioner().setDroptol(1e-6);
    gmres.preconditioner().setFillfactor(20);
    gmres.set_restart(options.gmres_restart);
    gmres.setMaxIterations(options.max_iterations);
    gmres.setTolerance(1e-14);
    gmres.compute(bordered);
    x = gmres.solve(b);
    iterations = static_cast<int>(gmres.iterations());
    method = "iterative";
  }
  const double residual = (l * x).norm();
  return finish(DensityMatrix(liou.desc, unvectorize(x, d)), residual, lmax, method, iterations, probe, options);
}

NessResult solve_ness(const SectorLiouvillian& liou, const NessOptions& options) {
  const long border = liou.position(0, 0);
  if (border < 0) throw DomainError("solve_ness: bordering element missing from the sector");
  const auto n = static_cast<Eigen::Index>(liou.dim());
  DenseVec b = DenseVec::Zero(n);
  b(border) = 1.0;
  const double lmax = liou.max_abs_entry();

  // LU factors plus the assembled matrix, with headroom for fill-in
  const double direct_bytes = 3.0 * sizeof(cplx) * liou.estimated_factor_entries();
  const bool direct_fits = direct_bytes <= static_cast<double>(options.memory_budget_bytes);
  if (options.method == NessOptions::Method::Direct && !direct_fits) {
    throw BudgetError("solve_ness: sparse LU needs ~" + std::to_string(static_cast<long long>(direct_bytes) >> 20) +
                      " MiB, budget is " + std::to_string(options.memory_budget_bytes >> 20) + " MiB");
  }
  const bool direct = options.method == NessOptions::Method::Direct ||
                      (options.method == NessOptions::Method::Auto && direct_fits &&
                       liou.estimated_factor_entries() <= options.direct_budget_entries);
  DenseVec x;
  std::string method;
  int iterations = 0;
  double probe = std::numeric_limits<double>::quiet_NaN();
  if (direct) {
    SparseMat l = liou.assemble();
    probe = uniqueness_probe(l, options.probe_max_dim);
    std::vector<Eigen::Triplet<cplx, int>> t;
    for (const auto& s : liou.sectors())
      for (std::size_t k = 0; k < s.size(); ++k)
        t.emplace_back(static_cast<int>(border), static_cast<int>(s.offset + k * (s.size() + 1)), 1.0);
    SparseMat border_row(n, n);
    border_row.setFromTriplets(t.begin(), t.end());
    SparseMat bordered = l + border_row;
    bordered.makeCompressed();
    x = sparse_lu_solve(bordered, b, "solve_ness");
    method = "direct";
  } else {
    check_iterative_memory(liou.dim(), options);
    LadderPreconditioner precond(liou);
    detail::BorderedSectorOperator op(liou, border);
    Eigen::GMRES<detail::BorderedSectorOperator, detail::LadderGmresPreconditioner> gmres;
    gmres.preconditioner().set(&precond);
    gmres.set_restart(options.gmres_restart);
    gmres.setMaxIterations(options.max_iterations);
    gmres.compute(op);
    const double target = options.residual_factor * lmax;
    x = DenseVec::Zero(n);
    double tol = 1e-12;
    // The Krylov tolerance is on the preconditioned residual; tighten until
    // the true residual meets the target.
    for (int attempt = 0; attempt < 4; ++attempt) {
      gmres.setTolerance(tol);
      x = gmres.solveWithGuess(b, x);
      iterations += static_cast<int>(gmres.iterations());
      if ((liou.apply(x)).norm() <= 0.1 * target) break;
      tol *= 0.01;
    }
    method = "iterative";
  }
  const double residual = liou.apply(x).norm();
  return finish(liou.to_density(x), residual, lmax, method, iterations, probe, options);
}

AdaptiveNessResult adaptive_cutoff_ness(const SystemParams& params, const AdaptiveOptions& options) {
  params.validate();
  std::vector<CutoffStep> trend;
  auto solve_at = [&](int n_max) {
    if (n_max > options.max_n_max) {
      std::ostringstream msg;
      msg << "adaptive_cutoff_ness: cutoff " << n_max << " exceeds max_n_max " << options.max_n_max
          << "; trend (n_max, <n>, top):";
      for (const auto& t : trend) msg << " (" << t.n_max << ", " << t.photon_number << ", " << t.top_fock_population << ")";
      throw BudgetError(msg.str());
    }
    const auto liou = build_sector_liouvillian(params.with_n_max(n_max));
    try {
      auto r = solve_ness(liou, options.solver);
      trend.push_back({n_max, photon_number(r.rho), r.diagnostics.top_fock_population});
      return r;
    } catch (const BudgetError& e) {
      std::ostringstream msg;
      msg << e.what() << "; cutoff trend (n_max, <n>, top):";
      for (const auto& t : trend) msg << " (" << t.n_max << ", " << t.photon_number << ", " << t.top_fock_population << ")";
      throw BudgetError(msg.str());
    }
  };

  int n_max = params.L + 2;
  while (true) {
    auto current = solve_at(n_max);
    const CutoffStep here = trend.back();
    if (here.top_fock_population < options.top_population_tol) {
      auto confirm = solve_at(n_max + options.confirm_increment);
      const double n_next = trend.back().photon_number;
      const double scale = std::max(std::abs(n_next), std::abs(here.photon_number));
      const bool stable = scale < 1e-12 || std::abs(n_next - here.photon_number) < options.relative_photon_tol * scale;
      if (stable) return AdaptiveNessResult{std::move(current.rho), current.diagnostics, n_max, trend};
      n_max += options.confirm_increment;
    }
    n_max = std::max(n_max + 1, static_cast<int>(std::ceil(options.growth * n_max)));
  }
}

AdaptiveNessResult exact_ness(const SystemParams& params, const AdaptiveOptions& options) {
  if (params.n_max > 0) {
    auto r = solve_ness(build_sector_liouvillian(params), options.solver);
    CutoffStep step{params.n_max, photon_number(r.rho), r.diagnostics.top_fock_population};
    return AdaptiveNessResult{std::move(r.rho), r.diagnostics, params.n_max, {step}};
  }
  return adaptive_cutoff_ness(params, options);
}

NessDiagnostics validate_density_matrix(const DensityMatrix& rho, double /*tol*/) {
  NessDiagnostics d;
  d.residual_norm = std::numeric_limits<double>::quiet_NaN();
  d.liouvillian_max_entry = std::numeric_limits<double>::quiet_NaN();
  d.uniqueness_probe = std::numeric_limits<double>::quiet_NaN();
  d.trace_error = std::abs(rho.trace() - cplx{1.0, 0.0});
  d.hermiticity_defect = rho.hermiticity_defect();
  d.min_eigenvalue = rho.min_eigenvalue();
  d.top_fock_population = top_fock(rho);
  d.method = "validate";
  return d;
}

}  // namespace manylaser
