#include "manylaser/hilbert.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

using Triplet = Eigen::Triplet<cplx, int>;

SparseMat from_triplets(std::size_t dim, const std::vector<Triplet>& t) {
  SparseMat m(static_cast<int>(dim), static_cast<int>(dim));
  m.setFromTriplets(t.begin(), t.end());
  m.prune(kDropTolerance, 1.0);
  m.makeCompressed();
  return m;
}

void require_same_dim(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()) + ")");
  }
}

}  // namespace

SpaceDescriptor::SpaceDescriptor(int num_spins, int fock_dim) : num_spins_(num_spins), fock_dim_(fock_dim) {
  if (num_spins < 1) throw DomainError("SpaceDescriptor: num_spins must be >= 1");
  if (num_spins > 24) throw BudgetError("SpaceDescriptor: num_spins above 24 is not representable");
  if (fock_dim < 1) throw DomainError("SpaceDescriptor: fock_dim must be >= 1");
}

int SpaceDescriptor::num_up(std::size_t spin_state) const noexcept {
  return num_spins_ - std::popcount(static_cast<std::uint64_t>(spin_state));
}

SparseOperator::SparseOperator(SparseMat m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw DomainError("SparseOperator: matrix must be square");
  mat_.prune(kDropTolerance, 1.0);
  mat_.makeCompressed();
}

SparseOperator SparseOperator::identity(std::size_t dim) {
  SparseMat m(static_cast<int>(dim), static_cast<int>(dim));
  m.setIdentity();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::zero(std::size_t dim) {
  return SparseOperator(SparseMat(static_cast<int>(dim), static_cast<int>(dim)));
}

SparseOperator SparseOperator::from_dense(const DenseMat& m) { return SparseOperator(SparseMat(m.sparseView())); }

cplx SparseOperator::coeff(std::size_t row, std::size_t col) const {
  return mat_.coeff(static_cast<int>(row), static_cast<int>(col));
}

SparseOperator SparseOperator::adjoint() const { return SparseOperator(SparseMat(mat_.adjoint())); }
SparseOperator SparseOperator::transpose() const { return SparseOperator(SparseMat(mat_.transpose())); }
SparseOperator SparseOperator::conjugate() const { return SparseOperator(SparseMat(mat_.conjugate())); }

bool SparseOperator::is_hermitian(double tol) const {
  SparseMat diff = mat_ - SparseMat(mat_.adjoint());
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMat::InnerIterator it(diff, k); it; ++it)
      if (std::abs(it.value()) > tol) return false;
  return true;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "add");
  return SparseOperator(SparseMat(a.mat_ + b.mat_));
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "subtract");
  return SparseOperator(SparseMat(a.mat_ - b.mat_));
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "multiply");
  return SparseOperator(SparseMat(a.mat_ * b.mat_));
}

SparseOperator operator*(cplx s, const SparseOperator& a) { return SparseOperator(SparseMat(s * a.mat_)); }

SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
  SparseMat out = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return SparseOperator(std::move(out));
}

SparseOperator compose(const SparseOperator& a, const SparseOperator& b, ComposeOp op, cplx scalar) {
  switch (op) {
    case ComposeOp::Add:
      return a + b;
    case ComposeOp::Multiply:
      return a * b;
    case ComposeOp::Scale:
      return scalar * a;
    case ComposeOp::Adjoint:
      return a.adjoint();
    case ComposeOp::Kron:
      return kron(a, b);
  }
  throw DomainError("compose: unknown operation");
}

SparseOperator spin_only_operator(int num_spins, int site, SpinKind kind) {
  if (num_spins < 1) throw DomainError("spin_operator: num_spins must be >= 1");
  if (site < 1 || site > num_spins) {
    throw DomainError("spin_operator: site " + std::to_string(site) + " outside 1.." + std::to_string(num_spins));
  }
  const std::size_t dim = std::size_t{1} << num_spins;
  const std::size_t mask = std::size_t{1} << (num_spins - site);
  const cplx I{0.0, 1.0};
  std::vector<Triplet> t;
  t.reserve(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    const bool down = s & mask;
    const int col = static_cast<int>(s);
    const int flipped = static_cast<int>(s ^ mask);
    switch (kind) {
      case SpinKind::X:
        t.emplace_back(flipped, col, 1.0);
        break;
      case SpinKind::Y:
        // Y|up> = i|down>, Y|down> = -i|up>
        t.emplace_back(flipped, col, down ? -I : I);
        break;
      case SpinKind::Z:
        t.emplace_back(col, col, down ? -1.0 : 1.0);
        break;
      case SpinKind::Raise:
        if (down) t.emplace_back(flipped, col, 1.0);
        break;
      case SpinKind::Lower:
        if (!down) t.emplace_back(flipped, col, 1.0);
        break;
    }
  }
  return SparseOperator(from_triplets(dim, t));
}

SparseOperator spin_operator(const SpaceDescriptor& desc, int site, SpinKind kind) {
  if (site < 1 || site > desc.num_spins()) {
    throw DomainError("spin_operator: site " + std::to_string(site) + " outside 1.." +
                      std::to_string(desc.num_spins()));
  }
  return kron(spin_only_operator(desc.num_spins(), site, kind),
              SparseOperator::identity(static_cast<std::size_t>(desc.fock_dim())));
}

SparseOperator boson_operator(const SpaceDescriptor& desc, BosonKind kind) {
  const int n_max = desc.fock_dim();
  std::vector<Triplet> t;
  for (int n = 0; n < n_max; ++n) {
    switch (kind) {
      case BosonKind::Annihilate:
        if (n > 0) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
        break;
      case BosonKind::Create:
        if (n + 1 < n_max) t.emplace_back(n + 1, n, std::sqrt(static_cast<double>(n + 1)));
        break;
      case BosonKind::Number:
        t.emplace_back(n, n, static_cast<double>(n));
        break;
    }
  }
  SparseOperator mode(from_triplets(static_cast<std::size_t>(n_max), t));
  return kron(SparseOperator::identity(desc.spin_dim()), mode);
}

}  // namespace manylaser
