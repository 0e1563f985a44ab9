#pragma once

#include <optional>
#include <vector>

#include "manylaser/density.hpp"
#include "manylaser/model.hpp"

namespace manylaser {

// Denominators below this are treated as zero.
inline constexpr double kPhotonFloor = 1e-12;
inline constexpr double kCorrelationFloor = 1e-9;

double photon_number(const DensityMatrix& rho);
// <a^dag a^dag a a>
double photon_factorial_moment(const DensityMatrix& rho);
// <a^dag a^dag a a> / <a^dag a>^2; UndefinedStatistic when <a^dag a> vanishes.
double g2_zero(const DensityMatrix& rho);
double g2_from_moments(double factorial_moment, double photons);

double total_magnetization(const DensityMatrix& rho);
double site_magnetization(const DensityMatrix& rho, int site);
double zz_expectation(const DensityMatrix& rho, int site_a, int site_b);

struct ZzCorrelation {
  std::optional<double> ratio;  // empty when |<Z_a><Z_b>| < kCorrelationFloor
  double raw = 0.0;             // <Z_a Z_b>
  double z_a = 0.0;
  double z_b = 0.0;
};

// <Z_a Z_b> / (<Z_a><Z_b>), sites 1-based.
ZzCorrelation zz_correlation(const DensityMatrix& rho, int site_a, int site_b);
ZzCorrelation zz_from_moments(double raw, double z_a, double z_b);

// Reference site for correlation profiles: floor(L/2), 1-based.
int correlation_reference_site(int L);

// (N_many - L N_single) / (N_many + L N_single)
double cooperativity_fraction(double n_many, double n_single, int L);
// (N_xxz - N_free) / (N_xxz + N_free)
double cooperativity_xxz(double n_xxz, double n_free);

// tr_cavity(rho) on the spin space (descriptor with fock_dim 1).
DensityMatrix partial_trace_cavity(const DensityMatrix& rho);

}  // namespace manylaser
