#include "evmine/residual.hpp"

#include <algorithm>
#include <cmath>

#include "evmine/error.hpp"

namespace evmine {

namespace {

// Reflects an out-of-range index into [0, n), repeating the edge sample
// (… 2 1 0 | 0 1 2 … n-1 | n-1 n-2 …). Folds as often as needed so kernels
// wider than the patch stay well defined.
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    kernel[i + radius] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

}  // namespace

Mat gaussian_blur(const Mat& patch, double sigma) {
  if (sigma <= 0.0) throw Error(ErrorKind::NonPositiveSigma, "blur sigma must be > 0");
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);

  // Horizontal pass.
  Mat tmp(patch.rows, patch.cols);
  for (int y = 0; y < patch.rows; ++y) {
    for (int x = 0; x < patch.cols; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * patch.at(y, reflect_index(x + k, patch.cols));
      }
      tmp.at(y, x) = acc;
    }
  }
  // Vertical pass.
  Mat out(patch.rows, patch.cols);
  for (int y = 0; y < patch.rows; ++y) {
    for (int x = 0; x < patch.cols; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp.at(reflect_index(y + k, patch.rows), x);
      }
      out.at(y, x) = acc;
    }
  }
  return out;
}

double residual_energy(const Mat& patch, const Mat& blurred) {
  if (!patch.same_shape(blurred)) {
    throw Error(ErrorKind::DimensionMismatch, "patch and blurred patch differ in shape");
  }
  double acc = 0.0;
  for (size_t i = 0; i < patch.size(); ++i) {
    acc += std::abs(patch.data[i] - blurred.data[i]);
  }
  return acc / static_cast<double>(patch.size());
}

ResidualField residual_field(const PatchGrid& grid, double sigma) {
  ResidualField field;
  field.g_h = grid.g_h;
  field.g_w = grid.g_w;
  field.energies.reserve(grid.patches.size());
  for (const Mat& patch : grid.patches) {
    field.energies.push_back(residual_energy(patch, gaussian_blur(patch, sigma)));
  }
  return field;
}

double lower_median(std::vector<double> v) {
  // Lower-median convention: element at index (n-1)/2 of the sorted order.
  const size_t idx = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return v[idx];
}

NoiseScores noise_anomaly(const ResidualField& field, double epsilon) {
  if (field.energies.empty()) throw Error(ErrorKind::EmptyGrid, "empty residual field");
  if (epsilon <= 0.0) throw Error(ErrorKind::InvalidConfig, "epsilon must be > 0");

  const double median = lower_median(field.energies);
  std::vector<double> deviations(field.energies.size());
  for (size_t i = 0; i < field.energies.size(); ++i) {
    deviations[i] = std::abs(field.energies[i] - median);
  }
  const double mad = lower_median(std::move(deviations));

  NoiseScores ns;
  ns.median_used = median;
  ns.mad_used = mad;
  ns.epsilon = epsilon;
  ns.scores = Mat(field.g_h, field.g_w);
  const double denom = mad + epsilon;
  for (size_t i = 0; i < field.energies.size(); ++i) {
    ns.scores.data[i] = (field.energies[i] - median) / denom;
  }
  return ns;
}

}  // namespace evmine
