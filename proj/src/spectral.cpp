#include "evmine/spectral.hpp"

#include <cmath>
#include <string>

#include "evmine/error.hpp"

namespace evmine {

namespace {

// Orthonormal DCT-II basis for size n: B(u,x) = s_u * cos(pi*(2x+1)*u/(2n)),
// s_0 = sqrt(1/n), s_u = sqrt(2/n). Rows are orthonormal, so applying B on
// both sides preserves total squared energy.
Mat dct_basis(int n) {
  Mat basis(n, n);
  const double s0 = std::sqrt(1.0 / n);
  const double su = std::sqrt(2.0 / n);
  for (int u = 0; u < n; ++u) {
    const double scale = (u == 0) ? s0 : su;
    for (int x = 0; x < n; ++x) {
      basis.at(u, x) = scale * std::cos(M_PI * (2.0 * x + 1.0) * u / (2.0 * n));
    }
  }
  return basis;
}

// out = a * b
Mat matmul(const Mat& a, const Mat& b) {
  Mat out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) {
        out.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return out;
}

Mat transpose(const Mat& a) {
  Mat out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      out.at(j, i) = a.at(i, j);
    }
  }
  return out;
}

}  // namespace

BandPartition BandPartition::make(int patch_size, int k_bands) {
  if (patch_size < 2) {
    throw Error(ErrorKind::InvalidConfig, "band partition needs patch size >= 2");
  }
  const int diag_count = 2 * (patch_size - 1);  // diagonal index s = u+v in [1, 2P-2]
  if (k_bands < 1 || k_bands > diag_count) {
    throw Error(ErrorKind::InvalidConfig,
                "k_bands must be in [1, " + std::to_string(diag_count) + "] for patch size " +
                    std::to_string(patch_size));
  }
  BandPartition part;
  part.patch_size = patch_size;
  part.k_bands = k_bands;
  part.band_of.assign(static_cast<size_t>(patch_size) * patch_size, -1);
  for (int u = 0; u < patch_size; ++u) {
    for (int v = 0; v < patch_size; ++v) {
      if (u == 0 && v == 0) continue;  // DC stays unassigned
      const int s = u + v;             // in [1, 2P-2]
      int band = static_cast<int>(static_cast<long long>(s - 1) * k_bands / diag_count);
      if (band >= k_bands) band = k_bands - 1;
      part.band_of[static_cast<size_t>(u) * patch_size + v] = band;
    }
  }
  return part;
}

Mat dct2(const Mat& patch) {
  if (patch.rows != patch.cols) {
    throw Error(ErrorKind::DimensionMismatch, "dct2 expects a square patch");
  }
  const Mat basis = dct_basis(patch.rows);
  return matmul(matmul(basis, patch), transpose(basis));
}

Mat idct2(const Mat& coeffs) {
  if (coeffs.rows != coeffs.cols) {
    throw Error(ErrorKind::DimensionMismatch, "idct2 expects a square map");
  }
  const Mat basis = dct_basis(coeffs.rows);
  return matmul(matmul(transpose(basis), coeffs), basis);
}

std::vector<double> band_energies(const Mat& coeffs, const BandPartition& part) {
  if (coeffs.rows != part.patch_size || coeffs.cols != part.patch_size) {
    throw Error(ErrorKind::DimensionMismatch, "partition built for a different patch size");
  }
  std::vector<double> energies(part.k_bands, 0.0);
  for (int u = 0; u < coeffs.rows; ++u) {
    for (int v = 0; v < coeffs.cols; ++v) {
      const int band = part.band(u, v);
      if (band < 0) continue;
      const double f = coeffs.at(u, v);
      energies[band] += f * f;
    }
  }
  return energies;
}

BandDistribution band_distribution(const std::vector<double>& energies) {
  double total = 0.0;
  for (double e : energies) total += e;
  BandDistribution q(energies.size());
  if (total <= 0.0) {
    const double uniform = 1.0 / static_cast<double>(energies.size());
    for (double& v : q) v = uniform;
    return q;
  }
  for (size_t i = 0; i < energies.size(); ++i) q[i] = energies[i] / total;
  return q;
}

BandDistribution mean_profile(const std::vector<BandDistribution>& all) {
  if (all.empty()) throw Error(ErrorKind::EmptyGrid, "mean_profile of an empty grid");
  BandDistribution mean(all.front().size(), 0.0);
  for (const auto& q : all) {
    if (q.size() != mean.size()) {
      throw Error(ErrorKind::LengthMismatch, "inconsistent distribution lengths");
    }
    for (size_t i = 0; i < q.size(); ++i) mean[i] += q[i];
  }
  const double inv = 1.0 / static_cast<double>(all.size());
  for (double& v : mean) v *= inv;
  return mean;
}

double jsd(const BandDistribution& p, const BandDistribution& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::LengthMismatch, "jsd arguments differ in length");
  }
  // 0.5*KL(p||m) + 0.5*KL(q||m) with m = (p+q)/2, log base 2; 0*log0 = 0.
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) acc += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) acc += 0.5 * q[i] * std::log2(q[i] / m);
  }
  // Rounding can leave a tiny negative residue for near-identical inputs.
  if (acc < 0.0) return 0.0;
  if (acc > 1.0) return 1.0;
  return acc;
}

double freq_anomaly(const BandDistribution& patch_dist, const BandDistribution& profile) {
  return jsd(patch_dist, profile);
}

std::vector<BandDistribution> grid_band_distributions(const PatchGrid& grid,
                                                      const BandPartition& part) {
  std::vector<BandDistribution> all;
  all.reserve(grid.patches.size());
  for (const Mat& patch : grid.patches) {
    all.push_back(band_distribution(band_energies(dct2(patch), part)));
  }
  return all;
}

Mat frequency_scores(const PatchGrid& grid, int k_bands) {
  const BandPartition part = BandPartition::make(grid.patch_size, k_bands);
  const auto dists = grid_band_distributions(grid, part);
  const BandDistribution profile = mean_profile(dists);
  Mat scores(grid.g_h, grid.g_w);
  for (int i = 0; i < grid.count(); ++i) {
    scores.data[i] = freq_anomaly(dists[i], profile);
  }
  return scores;
}

}  // namespace evmine
