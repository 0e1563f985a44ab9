#pragma once

#include <vector>

#include "manylaser/density.hpp"
#include "manylaser/model.hpp"

namespace manylaser {

// Eigenbasis of the bare spin-chain Hamiltonian, built sector by sector in
// the total magnetization. Columns of `vectors` live on the 2^L spin space.
struct XxzEigenbasis {
  int L = 0;
  Eigen::VectorXd energies;
  std::vector<int> magnetization;  // Z_T of each eigenvector
  DenseMat vectors;
};

// Degenerate multiplets (same Z_T, energies within 1e-9 (1 + |E|)) get a
// canonical basis: Gram-Schmidt of the multiplet projector columns taken in
// basis order, with the largest component of each vector made real positive.
XxzEigenbasis diagonalize_xxz(const SystemParams& params);

struct SpectralRecord {
  int eigen_index = 0;
  double energy = 0.0;
  int magnetization = 0;
  double probability = 0.0;
  bool bright = false;  // coincides with a permutation-symmetric |S, Z_T>
  bool top3 = false;    // among the three most probable records
};

// p_i = <i|rho_spin|i>. Inside a degenerate multiplet the projected rho is
// diagonalized first, so the probabilities do not depend on the basis choice.
std::vector<SpectralRecord> spectral_decomposition(const DensityMatrix& rho_spin, const XxzEigenbasis& basis);

struct BrightState {
  int n = 0;              // number of down spins
  int magnetization = 0;  // L - 2n
  DenseVec amplitudes;
};

// |S, L-2n> for n = 0..L: the normalized uniform superposition of all basis
// states with n down spins.
std::vector<BrightState> bright_states(int L);

}  // namespace manylaser
