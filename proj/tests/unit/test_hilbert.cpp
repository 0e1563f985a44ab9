#include <gtest/gtest.h>

#include "manylaser/errors.hpp"
#include "manylaser/hilbert.hpp"
#include "oracles.hpp"

using namespace manylaser;

TEST(SpaceDescriptor, IndexRoundTrip) {
  SpaceDescriptor d(3, 5);
  EXPECT_EQ(d.dim(), 40u);
  for (std::size_t s = 0; s < d.spin_dim(); ++s)
    for (int n = 0; n < 5; ++n) {
      const auto k = d.index(s, n);
      EXPECT_EQ(d.spin_of(k), s);
      EXPECT_EQ(d.photons_of(k), n);
    }
  // site 1 is the most significant bit; bit 1 means down
  EXPECT_TRUE(d.is_down(0b100, 1));
  EXPECT_FALSE(d.is_down(0b100, 3));
  EXPECT_EQ(d.num_up(0b000), 3);
  EXPECT_EQ(d.excitations(d.index(0b011, 4)), 5);
}

TEST(SparseOperator, MatchesIndependentKroneckerConstruction) {
  const int L = 3, n = 4;
  SpaceDescriptor d(L, n);
  const std::pair<SpinKind, char> kinds[] = {
      {SpinKind::X, 'x'}, {SpinKind::Y, 'y'}, {SpinKind::Z, 'z'}, {SpinKind::Raise, '+'}, {SpinKind::Lower, '-'}};
  for (int s = 1; s <= L; ++s) {
    for (auto [kind, c] : kinds) {
      const DenseMat got = spin_operator(d, s, kind).to_dense();
      EXPECT_LT((got - oracle::site(L, n, s, oracle::pauli(c))).norm(), 1e-14) << "site " << s << " kind " << c;
    }
  }
  const DenseMat a = boson_operator(d, BosonKind::Annihilate).to_dense();
  EXPECT_LT((a - oracle::kron(DenseMat::Identity(8, 8), oracle::destroy(n))).norm(), 1e-14);
  EXPECT_LT((boson_operator(d, BosonKind::Create).to_dense() - a.adjoint()).norm(), 1e-14);
  EXPECT_LT((boson_operator(d, BosonKind::Number).to_dense() - a.adjoint() * a).norm(), 1e-13);
}

TEST(SparseOperator, PauliAlgebra) {
  const int L = 2;
  SpaceDescriptor d(L, 1);
  for (int s = 1; s <= L; ++s) {
    const auto x = spin_operator(d, s, SpinKind::X), y = spin_operator(d, s, SpinKind::Y);
    const auto z = spin_operator(d, s, SpinKind::Z);
    const cplx i{0, 1};
    // XY = iZ
    EXPECT_LT(((x * y).to_dense() - i * z.to_dense()).norm(), 1e-14);
    EXPECT_TRUE(x.is_hermitian());
    EXPECT_TRUE(y.is_hermitian());
    const auto sp = spin_operator(d, s, SpinKind::Raise);
    EXPECT_LT((sp.adjoint().to_dense() - spin_operator(d, s, SpinKind::Lower).to_dense()).norm(), 1e-15);
    // s+ = (X + iY)/2
    EXPECT_LT((sp.to_dense() - 0.5 * (x.to_dense() + i * y.to_dense())).norm(), 1e-15);
  }
}

TEST(SparseOperator, TruncatedCommutator) {
  SpaceDescriptor d(1, 6);
  const auto a = boson_operator(d, BosonKind::Annihilate);
  const DenseMat comm = (a * a.adjoint() - a.adjoint() * a).to_dense();
  for (std::size_t k = 0; k < d.dim(); ++k) {
    const double expect = d.photons_of(k) == 5 ? -5.0 : 1.0;
    EXPECT_NEAR(comm(k, k).real(), expect, 1e-13);
  }
}

TEST(SparseOperator, ComposeAndErrors) {
  const auto a = SparseOperator::identity(4);
  const auto b = SparseOperator::from_dense(DenseMat::Random(2, 2));
  EXPECT_THROW(compose(a, b, ComposeOp::Add), DomainError);
  EXPECT_THROW(compose(a, b, ComposeOp::Multiply), DomainError);
  EXPECT_EQ(compose(a, b, ComposeOp::Kron).dim(), 8u);
  EXPECT_LT((compose(b, b, ComposeOp::Scale, cplx{0, 2}).to_dense() - cplx{0, 2} * b.to_dense()).norm(), 1e-15);
  EXPECT_LT((compose(b, b, ComposeOp::Adjoint).to_dense() - b.to_dense().adjoint()).norm(), 1e-15);
  EXPECT_THROW(spin_operator(SpaceDescriptor(2, 3), 3, SpinKind::X), DomainError);
  EXPECT_THROW(spin_operator(SpaceDescriptor(2, 3), 0, SpinKind::X), DomainError);
}

TEST(SparseOperator, DropsTinyEntries) {
  DenseMat m = DenseMat::Zero(3, 3);
  m(0, 1) = 1e-16;
  m(2, 2) = 1.0;
  EXPECT_EQ(SparseOperator::from_dense(m).nonzeros(), 1u);
}
