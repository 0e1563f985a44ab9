#pragma once

// Reference implementations that share no code with the library: dense
// operators from explicit Kronecker products, and brute-force time stepping.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single site, basis {up, down}.
inline Mat pauli(char which) {
  Mat m = Mat::Zero(2, 2);
  const cplx i{0, 1};
  switch (which) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, -i, i, 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    case '+': m << 0, 1, 0, 0; break;  // |up><down|
    case '-': m << 0, 0, 1, 0; break;
  }
  return m;
}

inline Mat destroy(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

struct Model {
  int L, n;
  Mat H;
  std::vector<Mat> c;  // collapse operators with rates folded in
  Mat a;
  std::vector<Mat> z;
};

// site operator on spins (x) cavity, site 1 leftmost
inline Mat site(int L, int n, int s, const Mat& op) {
  Mat m = Mat::Identity(1, 1);
  for (int k = 1; k <= L; ++k) m = kron(m, k == s ? op : Mat(Mat::Identity(2, 2)));
  return kron(m, Mat::Identity(n, n));
}

inline Model build(int L, int n, double J, double U, double g, double P, double kappa) {
  Model m{L, n, {}, {}, {}, {}};
  const int D = (1 << L) * n;
  m.a = kron(Mat::Identity(1 << L, 1 << L), destroy(n));
  m.H = Mat::Zero(D, D);
  for (int i = 1; i < L; ++i) {
    m.H += J * (site(L, n, i, pauli('x')) * site(L, n, i + 1, pauli('x')) +
                site(L, n, i, pauli('y')) * site(L, n, i + 1, pauli('y'))) +
           U * site(L, n, i, pauli('z')) * site(L, n, i + 1, pauli('z'));
  }
  for (int i = 1; i <= L; ++i) {
    const Mat sp = site(L, n, i, pauli('+'));
    m.H += g * (m.a * sp + m.a.adjoint() * sp.adjoint());
    m.c.push_back(std::sqrt(P) * sp);
    m.z.push_back(site(L, n, i, pauli('z')));
  }
  m.c.push_back(std::sqrt(kappa) * m.a);
  return m;
}

inline Mat rhs(const Model& m, const Mat& rho) {
  const cplx i{0, 1};
  Mat out = -i * (m.H * rho - rho * m.H);
  for (const auto& c : m.c) {
    const Mat cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

// RK4 from the maximally mixed state until max|d rho/dt| < tol.
inline Mat steady_state_by_integration(const Model& m, double dt = 0.05, double tol = 1e-12, double t_max = 2e5) {
  const int D = static_cast<int>(m.H.rows());
  Mat rho = Mat::Identity(D, D) / double(D);
  for (double t = 0; t < t_max; t += dt) {
    const Mat k1 = rhs(m, rho);
    if (k1.cwiseAbs().maxCoeff() < tol) break;
    const Mat k2 = rhs(m, rho + 0.5 * dt * k1);
    const Mat k3 = rhs(m, rho + 0.5 * dt * k2);
    const Mat k4 = rhs(m, rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return rho / rho.trace();
}

// Explicit L=2 chain matrix in the basis {uu, ud, du, dd}.
inline Mat xxz_two_sites(double J, double U) {
  Mat h = Mat::Zero(4, 4);
  h(0, 0) = U;
  h(3, 3) = U;
  h(1, 1) = -U;
  h(2, 2) = -U;
  h(1, 2) = h(2, 1) = 2 * J;
  return h;
}

}  // namespace oracle
