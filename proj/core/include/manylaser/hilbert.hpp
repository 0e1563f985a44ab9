#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace manylaser {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using DenseMat = Eigen::MatrixXcd;
using DenseVec = Eigen::VectorXcd;

inline constexpr double kDropTolerance = 1e-14;

// Composite space of L two-level emitters followed by one truncated mode.
// Basis index = spin_index * fock_dim + photon_number, and inside spin_index
// site 1 is the most significant bit. Bit value 0 is |up>, 1 is |down>, so
// Z = diag(+1, -1) in the single-site basis {|up>, |down>}.
class SpaceDescriptor {
 public:
  SpaceDescriptor(int num_spins, int fock_dim);

  int num_spins() const noexcept { return num_spins_; }
  int fock_dim() const noexcept { return fock_dim_; }
  std::size_t spin_dim() const noexcept { return std::size_t{1} << num_spins_; }
  std::size_t dim() const noexcept { return spin_dim() * static_cast<std::size_t>(fock_dim_); }

  std::size_t index(std::size_t spin_state, int photons) const noexcept {
    return spin_state * static_cast<std::size_t>(fock_dim_) + static_cast<std::size_t>(photons);
  }
  std::size_t spin_of(std::size_t index) const noexcept { return index / static_cast<std::size_t>(fock_dim_); }
  int photons_of(std::size_t index) const noexcept { return static_cast<int>(index % static_cast<std::size_t>(fock_dim_)); }

  // True when `site` (1-based) is |down> in `spin_state`.
  bool is_down(std::size_t spin_state, int site) const noexcept {
    return (spin_state >> (num_spins_ - site)) & 1u;
  }
  int num_up(std::size_t spin_state) const noexcept;
  // Excitation number: up spins plus photons.
  int excitations(std::size_t index) const noexcept { return num_up(spin_of(index)) + photons_of(index); }

  bool operator==(const SpaceDescriptor&) const = default;

 private:
  int num_spins_;
  int fock_dim_;
};

// Square complex sparse matrix with explicit zeros dropped below kDropTolerance.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(SparseMat m);

  static SparseOperator identity(std::size_t dim);
  static SparseOperator zero(std::size_t dim);
  static SparseOperator from_dense(const DenseMat& m);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mat_.rows()); }
  const SparseMat& matrix() const noexcept { return mat_; }
  DenseMat to_dense() const { return DenseMat(mat_); }
  std::size_t nonzeros() const noexcept { return static_cast<std::size_t>(mat_.nonZeros()); }
  cplx coeff(std::size_t row, std::size_t col) const;

  SparseOperator adjoint() const;
  SparseOperator transpose() const;
  SparseOperator conjugate() const;
  bool is_hermitian(double tol = 1e-12) const;

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(cplx s, const SparseOperator& a);
  friend DenseVec operator*(const SparseOperator& a, const DenseVec& v) { return a.mat_ * v; }

 private:
  SparseMat mat_;
};

enum class SpinKind { X, Y, Z, Raise, Lower };
enum class BosonKind { Annihilate, Create, Number };
enum class ComposeOp { Add, Multiply, Scale, Adjoint, Kron };

// I (x) ... (x) P_site (x) ... (x) I (x) I_cavity, site is 1-based.
SparseOperator spin_operator(const SpaceDescriptor& desc, int site, SpinKind kind);

// I_spins (x) b, with b the truncated mode operator (a^dag|n_max-1> = 0).
SparseOperator boson_operator(const SpaceDescriptor& desc, BosonKind kind);

// Generic composition. `scalar` is used only by Scale; `b` is ignored by
// Scale and Adjoint. Throws DomainError on mismatched dimensions.
SparseOperator compose(const SparseOperator& a, const SparseOperator& b, ComposeOp op,
                       cplx scalar = cplx{1.0, 0.0});

SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

// Spin-only operators on the 2^L space, no cavity factor.
SparseOperator spin_only_operator(int num_spins, int site, SpinKind kind);

}  // namespace manylaser
