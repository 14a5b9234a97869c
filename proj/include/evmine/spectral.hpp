#pragma once

#include <vector>

#include "evmine/mat.hpp"
#include "evmine/patch_grid.hpp"

namespace evmine {

// Probability vector over frequency bands (components >= 0, sum 1).
using BandDistribution = std::vector<double>;

// Assigns every non-DC DCT coefficient (u,v) of a P x P map to one of
// k_bands contiguous ranges of the diagonal index u+v. The DC coefficient
// carries mean brightness, not texture, and is excluded from every band.
struct BandPartition {
  int patch_size = 0;
  int k_bands = 0;
  std::vector<int> band_of;  // u*P+v -> band id in [0, k_bands), -1 for DC

  static BandPartition make(int patch_size, int k_bands);
  int band(int u, int v) const { return band_of[static_cast<size_t>(u) * patch_size + v]; }
};

// Orthonormal (energy preserving) type-II 2D DCT of a square patch.
Mat dct2(const Mat& patch);

// Inverse of dct2.
Mat idct2(const Mat& coeffs);

// e_k = sum of squared coefficients in band k; DC excluded.
std::vector<double> band_energies(const Mat& coeffs, const BandPartition& part);

// Normalizes energies onto the simplex. A zero-energy vector maps to the
// uniform distribution so downstream divergences stay finite.
BandDistribution band_distribution(const std::vector<double>& energies);

// Componentwise arithmetic mean over the grid, in fixed row-major order.
// Throws EmptyGrid.
BandDistribution mean_profile(const std::vector<BandDistribution>& all);

// Jensen-Shannon divergence, log base 2, 0*log0 = 0. Symmetric and bounded
// to [0,1]. Throws LengthMismatch.
double jsd(const BandDistribution& p, const BandDistribution& q);

// Frequency anomaly of one patch: JSD between its band distribution and the
// image-mean profile.
double freq_anomaly(const BandDistribution& patch_dist, const BandDistribution& profile);

// Convenience: per-patch band distributions for a whole grid.
std::vector<BandDistribution> grid_band_distributions(const PatchGrid& grid,
                                                      const BandPartition& part);

// Full frequency scoring pass: distributions, mean profile, then per-patch
// JSD against the profile. Returns a g_h x g_w score grid.
Mat frequency_scores(const PatchGrid& grid, int k_bands);

}  // namespace evmine
