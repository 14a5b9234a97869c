#include "evmine/bench.hpp"

#include <algorithm>
#include <cmath>

#include "evmine/error.hpp"
#include "evmine/pipeline.hpp"
#include "evmine/residual.hpp"
#include "evmine/rng.hpp"
#include "evmine/spectral.hpp"

namespace evmine {

namespace {

uint8_t to_byte(double v) {
  const double scaled = std::round(v * 255.0);
  return static_cast<uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

uint8_t clamp_byte(double v) {
  return static_cast<uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

void check_region(const ImageBuffer& img, const PixelBox& region) {
  if (region.x < 0 || region.y < 0 || region.w <= 0 || region.h <= 0 ||
      region.x + region.w > img.width || region.y + region.h > img.height) {
    throw Error(ErrorKind::RegionOutOfBounds, "manipulation region outside image bounds");
  }
}

// Orthonormal DCT-II basis for one dimension (same convention as dct2).
Mat dct_basis_1d(int n) {
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

Mat apply_basis(const Mat& rows_basis, const Mat& x, const Mat& cols_basis, bool forward) {
  // forward: B_r * X * B_c^T ; inverse: B_r^T * X * B_c
  Mat tmp(x.rows, x.cols);
  Mat out(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < x.rows; ++k) {
        acc += (forward ? rows_basis.at(i, k) : rows_basis.at(k, i)) * x.at(k, j);
      }
      tmp.at(i, j) = acc;
    }
  }
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < x.cols; ++k) {
        acc += tmp.at(i, k) * (forward ? cols_basis.at(j, k) : cols_basis.at(k, j));
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

Mat channel_region(const ImageBuffer& img, const PixelBox& region, int ch) {
  Mat m(region.h, region.w);
  for (int y = 0; y < region.h; ++y) {
    for (int x = 0; x < region.w; ++x) {
      m.at(y, x) = img.pixel(region.x + x, region.y + y)[ch];
    }
  }
  return m;
}

void write_channel_region(ImageBuffer& img, const PixelBox& region, int ch, const Mat& m) {
  for (int y = 0; y < region.h; ++y) {
    for (int x = 0; x < region.w; ++x) {
      img.pixel(region.x + x, region.y + y)[ch] = clamp_byte(m.at(y, x));
    }
  }
}

}  // namespace

int PatchMask::count() const {
  int n = 0;
  for (uint8_t v : mask) n += v != 0;
  return n;
}

const char* manipulation_kind_name(ManipulationKind kind) {
  switch (kind) {
    case ManipulationKind::SpliceNoise: return "splice_noise";
    case ManipulationKind::SpliceBlur: return "splice_blur";
    case ManipulationKind::SpectralBoost: return "spectral_boost";
    case ManipulationKind::CopyMove: return "copy_move";
  }
  return "splice_noise";
}

ManipulationKind manipulation_kind_from_name(const std::string& name) {
  if (name == "splice_noise") return ManipulationKind::SpliceNoise;
  if (name == "splice_blur") return ManipulationKind::SpliceBlur;
  if (name == "spectral_boost") return ManipulationKind::SpectralBoost;
  if (name == "copy_move") return ManipulationKind::CopyMove;
  throw Error(ErrorKind::InvalidConfig, "unknown manipulation kind '" + name + "'");
}

ImageBuffer synthesize_base(int width, int height, uint64_t seed) {
  if (width < 1 || height < 1) throw Error(ErrorKind::InvalidConfig, "bad base dimensions");

  // Light blur keeps some high-frequency texture so residual energies have a
  // well-conditioned nonzero null; the diagonal gradient spreads patch means
  // so clustering has real semantic structure to work with.
  constexpr double kNoiseStd = 0.10;
  constexpr double kBlurSigma = 0.7;
  constexpr double kGradientAmp = 0.22;

  Rng rng(seed);
  Mat noise(height, width);
  for (double& v : noise.data) v = rng.gaussian();
  const Mat smooth = gaussian_blur(noise, kBlurSigma);

  // Blur shrinks the white-noise variance by the sum of squared kernel
  // weights; renormalize so the texture std stays at kNoiseStd.
  double mean = 0.0;
  for (double v : smooth.data) mean += v;
  mean /= static_cast<double>(smooth.size());
  double var = 0.0;
  for (double v : smooth.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(smooth.size());
  const double gain = var > 0.0 ? kNoiseStd / std::sqrt(var) : 0.0;

  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.data.resize(static_cast<size_t>(width) * height * 3);
  const double span = static_cast<double>(width + height - 2);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = span > 0.0 ? (x + y) / span : 0.5;
      const double luma = 0.5 + kGradientAmp * (2.0 * u - 1.0) + gain * (smooth.at(y, x) - mean);
      const uint8_t b = to_byte(luma);
      uint8_t* p = img.pixel(x, y);
      p[0] = p[1] = p[2] = b;
    }
  }
  return img;
}

std::pair<ImageBuffer, PatchMask> apply_manipulation(const ImageBuffer& img,
                                                     const ManipulationSpec& spec,
                                                     int patch_size) {
  check_region(img, spec.region);
  if (spec.strength <= 0.0) throw Error(ErrorKind::InvalidConfig, "strength must be > 0");
  if (patch_size < 1) throw Error(ErrorKind::InvalidConfig, "patch size must be >= 1");

  ImageBuffer out = img;
  const PixelBox& rg = spec.region;

  switch (spec.kind) {
    case ManipulationKind::SpliceNoise: {
      Rng rng(spec.seed);
      for (int y = 0; y < rg.h; ++y) {
        for (int x = 0; x < rg.w; ++x) {
          // One luma-scale offset applied to all channels.
          const double delta = rng.gaussian() * spec.strength * 255.0;
          uint8_t* p = out.pixel(rg.x + x, rg.y + y);
          for (int ch = 0; ch < 3; ++ch) p[ch] = clamp_byte(p[ch] + delta);
        }
      }
      break;
    }
    case ManipulationKind::SpliceBlur: {
      for (int ch = 0; ch < 3; ++ch) {
        const Mat blurred = gaussian_blur(channel_region(img, rg, ch), spec.strength);
        write_channel_region(out, rg, ch, blurred);
      }
      break;
    }
    case ManipulationKind::SpectralBoost: {
      // The region is transformed as one block; coefficients above the main
      // anti-diagonal (the high-frequency half) are scaled by strength.
      const Mat row_basis = dct_basis_1d(rg.h);
      const Mat col_basis = dct_basis_1d(rg.w);
      for (int ch = 0; ch < 3; ++ch) {
        Mat coeffs = apply_basis(row_basis, channel_region(img, rg, ch), col_basis, true);
        for (int u = 0; u < rg.h; ++u) {
          for (int v = 0; v < rg.w; ++v) {
            const double du = rg.h > 1 ? static_cast<double>(u) / (rg.h - 1) : 0.0;
            const double dv = rg.w > 1 ? static_cast<double>(v) / (rg.w - 1) : 0.0;
            if (du + dv > 1.0) coeffs.at(u, v) *= spec.strength;
          }
        }
        write_channel_region(out, rg, ch, apply_basis(row_basis, coeffs, col_basis, false));
      }
      break;
    }
    case ManipulationKind::CopyMove: {
      const int shift = static_cast<int>(std::llround(spec.strength));
      const int sx = std::clamp(rg.x + shift, 0, img.width - rg.w);
      const int sy = std::clamp(rg.y + shift, 0, img.height - rg.h);
      const ImageBuffer source = img;  // copy first so overlap cannot alias
      for (int y = 0; y < rg.h; ++y) {
        for (int x = 0; x < rg.w; ++x) {
          const uint8_t* s = source.pixel(sx + x, sy + y);
          uint8_t* d = out.pixel(rg.x + x, rg.y + y);
          d[0] = s[0];
          d[1] = s[1];
          d[2] = s[2];
        }
      }
      break;
    }
  }

  PatchMask mask;
  mask.g_h = img.height / patch_size;
  mask.g_w = img.width / patch_size;
  mask.mask.assign(static_cast<size_t>(mask.g_h) * mask.g_w, 0);
  for (int r = 0; r < mask.g_h; ++r) {
    for (int c = 0; c < mask.g_w; ++c) {
      const int px = c * patch_size;
      const int py = r * patch_size;
      const bool overlap = px < rg.x + rg.w && px + patch_size > rg.x && py < rg.y + rg.h &&
                           py + patch_size > rg.y;
      if (overlap) mask.mask[static_cast<size_t>(r) * mask.g_w + c] = 1;
    }
  }
  return {std::move(out), std::move(mask)};
}

LocalizationReport evaluate_localization(int n_seeds, const ManipulationSpec& tmpl,
                                         const RunConfig& cfg, int width, int height) {
  if (n_seeds < 1) throw Error(ErrorKind::InvalidConfig, "n_seeds must be >= 1");
  validate(cfg);

  RunConfig run_cfg = cfg;
  run_cfg.embeddings_path.clear();  // the bench always uses intrinsic descriptors

  LocalizationReport report;
  report.n_seeds = n_seeds;
  report.records.reserve(n_seeds);

  for (int i = 0; i < n_seeds; ++i) {
    const uint64_t seed = tmpl.seed + static_cast<uint64_t>(i);
    ManipulationSpec spec = tmpl;
    spec.seed = seed;

    const ImageBuffer base = synthesize_base(width, height, seed);
    auto [img, mask] = apply_manipulation(base, spec, run_cfg.patch_size);
    const MineResult mined =
        mine_evidence(img, run_cfg, "synth_" + std::to_string(seed));

    int selected_masked = 0;
    for (const EvidenceEntry& entry : mined.pack.entries) {
      if (mask.at(entry.candidate.coord.r, entry.candidate.coord.c)) ++selected_masked;
    }
    SeedRecord rec;
    rec.seed = seed;
    rec.hit = selected_masked > 0;
    rec.recall = mask.count() > 0 ? static_cast<double>(selected_masked) / mask.count() : 0.0;
    rec.pack_size = static_cast<int>(mined.pack.entries.size());
    report.records.push_back(rec);
  }

  double hit_sum = 0.0;
  double recall_sum = 0.0;
  for (const SeedRecord& rec : report.records) {
    hit_sum += rec.hit ? 1.0 : 0.0;
    recall_sum += rec.recall;
  }
  report.hit_at_k = hit_sum / n_seeds;
  report.mask_recall = recall_sum / n_seeds;
  double hit_var = 0.0;
  double recall_var = 0.0;
  for (const SeedRecord& rec : report.records) {
    const double h = (rec.hit ? 1.0 : 0.0) - report.hit_at_k;
    const double r = rec.recall - report.mask_recall;
    hit_var += h * h;
    recall_var += r * r;
  }
  report.hit_std = std::sqrt(hit_var / n_seeds);
  report.recall_std = std::sqrt(recall_var / n_seeds);
  return report;
}

}  // namespace evmine
