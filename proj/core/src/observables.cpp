#include "manylaser/observables.hpp"

#include <cmath>
#include <string>

#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

void require_site(const DensityMatrix& rho, int site) {
  if (site < 1 || site > rho.desc().num_spins()) {
    throw DomainError("site " + std::to_string(site) + " outside 1.." + std::to_string(rho.desc().num_spins()));
  }
}

double z_of(const SpaceDescriptor& desc, std::size_t index, int site) {
  return desc.is_down(desc.spin_of(index), site) ? -1.0 : 1.0;
}

}  // namespace

double photon_number(const DensityMatrix& rho) {
  const auto& desc = rho.desc();
  return rho.diagonal_expectation([&](std::size_t i) { return static_cast<double>(desc.photons_of(i)); });
}

double photon_factorial_moment(const DensityMatrix& rho) {
  const auto& desc = rho.desc();
  return rho.diagonal_expectation([&](std::size_t i) {
    const double n = desc.photons_of(i);
    return n * (n - 1.0);
  });
}

double g2_from_moments(double factorial_moment, double photons) {
  if (!(std::abs(photons) > kPhotonFloor)) {
    throw UndefinedStatistic("g2(0) undefined: <a^dag a> = " + std::to_string(photons));
  }
  return factorial_moment / (photons * photons);
}

double g2_zero(const DensityMatrix& rho) { return g2_from_moments(photon_factorial_moment(rho), photon_number(rho)); }

double total_magnetization(const DensityMatrix& rho) {
  const auto& desc = rho.desc();
  return rho.diagonal_expectation([&](std::size_t i) {
    const int up = desc.num_up(desc.spin_of(i));
    return static_cast<double>(2 * up - desc.num_spins());
  });
}

double site_magnetization(const DensityMatrix& rho, int site) {
  require_site(rho, site);
  return rho.diagonal_expectation([&](std::size_t i) { return z_of(rho.desc(), i, site); });
}

double zz_expectation(const DensityMatrix& rho, int site_a, int site_b) {
  require_site(rho, site_a);
  require_site(rho, site_b);
  return rho.diagonal_expectation(
      [&](std::size_t i) { return z_of(rho.desc(), i, site_a) * z_of(rho.desc(), i, site_b); });
}

ZzCorrelation zz_from_moments(double raw, double z_a, double z_b) {
  ZzCorrelation c;
  c.raw = raw;
  c.z_a = z_a;
  c.z_b = z_b;
  const double den = z_a * z_b;
  if (std::abs(den) >= kCorrelationFloor) c.ratio = raw / den;
  return c;
}

ZzCorrelation zz_correlation(const DensityMatrix& rho, int site_a, int site_b) {
  return zz_from_moments(zz_expectation(rho, site_a, site_b), site_magnetization(rho, site_a),
                         site_magnetization(rho, site_b));
}

int correlation_reference_site(int L) { return std::max(1, L / 2); }

double cooperativity_fraction(double n_many, double n_single, int L) {
  if (n_many < 0.0 || n_single < 0.0) throw DomainError("cooperativity_fraction: photon numbers must be >= 0");
  if (L < 1) throw DomainError("cooperativity_fraction: L must be >= 1");
  const double reference = L * n_single;
  const double den = n_many + reference;
  if (!(den > 0.0)) throw UndefinedStatistic("cooperativity_fraction: both photon numbers vanish");
  return (n_many - reference) / den;
}

double cooperativity_xxz(double n_xxz, double n_free) {
  if (n_xxz < 0.0 || n_free < 0.0) throw DomainError("cooperativity_xxz: photon numbers must be >= 0");
  const double den = n_xxz + n_free;
  if (!(den > 0.0)) throw UndefinedStatistic("cooperativity_xxz: both photon numbers vanish");
  return (n_xxz - n_free) / den;
}

DensityMatrix partial_trace_cavity(const DensityMatrix& rho) {
  const auto& desc = rho.desc();
  const SpaceDescriptor spins(desc.num_spins(), 1);
  const auto ds = static_cast<Eigen::Index>(desc.spin_dim());
  DenseMat out = DenseMat::Zero(ds, ds);
  for (const auto& b : rho.blocks()) {
    const std::size_t d = b.states.size();
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t gc = b.states[c];
      const int nc = desc.photons_of(gc);
      const auto sc = static_cast<Eigen::Index>(desc.spin_of(gc));
      for (std::size_t r = 0; r < d; ++r) {
        const std::size_t gr = b.states[r];
        if (desc.photons_of(gr) != nc) continue;
        out(static_cast<Eigen::Index>(desc.spin_of(gr)), sc) +=
            b.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return DensityMatrix(spins, std::move(out));
}

}  // namespace manylaser
