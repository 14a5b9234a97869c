#pragma once

#include <vector>

#include "evmine/mat.hpp"
#include "evmine/patch_grid.hpp"

namespace evmine {

// Per-patch mean absolute high-pass residual energies over the grid.
struct ResidualField {
  int g_h = 0;
  int g_w = 0;
  std::vector<double> energies;  // row-major, all >= 0
};

// Robust-normalized noise anomaly scores. Signed: patches below the median
// residual energy score negative. The normalization inputs are recorded for
// audit.
struct NoiseScores {
  Mat scores;
  double median_used = 0.0;
  double mad_used = 0.0;
  double epsilon = 0.0;
};

// Separable Gaussian blur, kernel radius ceil(3*sigma), kernel normalized to
// sum 1, reflect padding at borders. Throws NonPositiveSigma.
Mat gaussian_blur(const Mat& patch, double sigma);

// Mean of |patch - blurred| over all pixels. Throws DimensionMismatch.
double residual_energy(const Mat& patch, const Mat& blurred);

// Residual energies for every patch of the grid (per-patch blur, so no
// cross-patch context leaks into the residual).
ResidualField residual_field(const PatchGrid& grid, double sigma);

// score = (E - median(E)) / (MAD(E) + epsilon). Median and MAD use the
// lower-median convention for even counts. Throws EmptyGrid.
NoiseScores noise_anomaly(const ResidualField& field, double epsilon);

// Lower-median of a copy of v (v unchanged). Exposed for reuse by tests and
// the robust scoring path.
double lower_median(std::vector<double> v);

}  // namespace evmine
