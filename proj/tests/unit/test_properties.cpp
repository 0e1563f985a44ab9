// Randomized property checks with a fixed-seed generator.

#include <gtest/gtest.h>

#include <random>

#include "manylaser/ness.hpp"
#include "manylaser/observables.hpp"

using namespace manylaser;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

  SystemParams params() {
    SystemParams p;
    p.L = integer(1, 3);
    p.J = uniform(0.2, 1.5);
    p.U = uniform(-2.0, 3.0);
    p.g = uniform(0.05, 0.6);
    p.P = uniform(0.05, 3.0);
    p.kappa = uniform(0.2, 2.0);
    p.n_max = integer(3, 7);
    return p;
  }

  DenseMat hermitian(int d) {
    DenseMat a = DenseMat::Random(d, d);
    return a + a.adjoint().eval();
  }
};

constexpr int kCases = 25;

}  // namespace

TEST(Properties, SteadyStateIsAPhysicalDensityMatrix) {
  Gen gen(2024);
  for (int k = 0; k < kCases; ++k) {
    const auto p = gen.params();
    SCOPED_TRACE("case " + std::to_string(k) + " L=" + std::to_string(p.L) + " U=" + std::to_string(p.U));
    const auto r = exact_ness(p);
    EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-12);
    EXPECT_LT(r.rho.hermiticity_defect(), 1e-12);
    EXPECT_GT(r.diagnostics.min_eigenvalue, -1e-10);
    EXPECT_LT(r.diagnostics.residual_norm, 1e-9 * r.diagnostics.liouvillian_max_entry);
    const double n = photon_number(r.rho);
    EXPECT_GE(n, 0.0);
    EXPECT_LE(n, p.n_max - 1);
    EXPECT_LE(std::abs(total_magnetization(r.rho)), p.L + 1e-12);
    // stationary under the directly evaluated master equation
    const DenseMat rho = r.rho.to_dense();
    EXPECT_LT(lindblad_rhs(p, p.space(), rho).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Properties, LiouvillianPreservesTraceAndHermiticity) {
  Gen gen(77);
  for (int k = 0; k < kCases; ++k) {
    const auto p = gen.params();
    const auto liou = build_liouvillian(p);
    const int d = static_cast<int>(liou.desc.dim());
    const DenseMat x = gen.hermitian(d);
    const DenseMat lx = unvectorize(liou.matrix * vectorize(x), d);
    EXPECT_NEAR(std::abs(lx.trace()), 0.0, 1e-11);
    EXPECT_LT((lx - lx.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Properties, SteadyStateIsBlockDiagonalInExcitations) {
  Gen gen(5);
  for (int k = 0; k < 10; ++k) {
    const auto p = gen.params();
    const auto full = solve_ness(build_liouvillian(p));
    const DenseMat rho = full.rho.to_dense();
    const auto d = p.space();
    double off = 0.0;
    for (std::size_t i = 0; i < d.dim(); ++i)
      for (std::size_t j = 0; j < d.dim(); ++j)
        if (d.excitations(i) != d.excitations(j)) off = std::max(off, std::abs(rho(i, j)));
    EXPECT_LT(off, 1e-12);
  }
}

TEST(Properties, CooperativityStaysInRange) {
  Gen gen(9);
  for (int k = 0; k < 200; ++k) {
    const double a = gen.uniform(0, 50), b = gen.uniform(1e-6, 50);
    const int L = gen.integer(1, 11);
    EXPECT_LE(std::abs(cooperativity_fraction(a, b, L)), 1.0);
    EXPECT_LE(std::abs(cooperativity_xxz(a, b)), 1.0);
  }
}

TEST(Properties, G2RespectsSubPoissonianBound) {
  // g2 of any diagonal photon distribution is >= 1 - 1/<n> (sub-Poissonian bound)
  Gen gen(31);
  for (int k = 0; k < 50; ++k) {
    const int F = gen.integer(2, 12);
    SpaceDescriptor d(1, F);
    DenseMat rho = DenseMat::Zero(d.dim(), d.dim());
    double tot = 0;
    for (int n = 0; n < F; ++n) tot += (rho(d.index(0, n), d.index(0, n)) = gen.uniform(0, 1)).real();
    rho /= tot;
    const DensityMatrix r(d, rho);
    const double n = photon_number(r);
    EXPECT_GE(g2_zero(r), 1.0 - 1.0 / n - 1e-12);
  }
}
