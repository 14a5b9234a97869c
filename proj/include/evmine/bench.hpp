#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evmine/config.hpp"
#include "evmine/image.hpp"

namespace evmine {

enum class ManipulationKind { SpliceNoise, SpliceBlur, SpectralBoost, CopyMove };

// A localized synthetic edit with a known footprint.
//   splice_noise:   additive Gaussian noise, std = strength (luma units)
//   splice_blur:    Gaussian blur inside the region, sigma = strength
//   spectral_boost: high-band DCT amplification by factor strength
//   copy_move:      copy of the region translated by round(strength) px
struct ManipulationSpec {
  ManipulationKind kind = ManipulationKind::SpliceNoise;
  PixelBox region;
  double strength = 0.2;
  uint64_t seed = 1;
};

// Patch-granular ground truth: true where the patch box intersects the
// manipulated region.
struct PatchMask {
  int g_h = 0;
  int g_w = 0;
  std::vector<uint8_t> mask;  // row-major 0/1

  bool at(int r, int c) const { return mask[static_cast<size_t>(r - 1) * g_w + (c - 1)] != 0; }
  int count() const;
};

struct SeedRecord {
  uint64_t seed = 0;
  bool hit = false;        // any selected evidence patch inside the mask
  double recall = 0.0;     // masked patches selected / masked patches
  int pack_size = 0;
};

// hit_at_k: fraction of seeds whose evidence pack intersects the mask.
// mask_recall: mean fraction of manipulated patches that were selected.
struct LocalizationReport {
  double hit_at_k = 0.0;
  double hit_std = 0.0;
  double mask_recall = 0.0;
  double recall_std = 0.0;
  int n_seeds = 0;
  std::vector<SeedRecord> records;
};

// Deterministic textured base image: band-limited noise over a smooth
// diagonal luma gradient. Unmanipulated patches share the same noise
// statistics, giving the anomaly scores a clean null distribution.
ImageBuffer synthesize_base(int width, int height, uint64_t seed);

// Applies the edit and returns the patch-level ground-truth mask for the
// given patch size. Throws RegionOutOfBounds.
std::pair<ImageBuffer, PatchMask> apply_manipulation(const ImageBuffer& img,
                                                     const ManipulationSpec& spec,
                                                     int patch_size);

// Runs the full mining pipeline (intrinsic embeddings) over n_seeds
// independently seeded images and aggregates localization metrics.
LocalizationReport evaluate_localization(int n_seeds, const ManipulationSpec& tmpl,
                                         const RunConfig& cfg, int width = 224,
                                         int height = 224);

const char* manipulation_kind_name(ManipulationKind kind);
ManipulationKind manipulation_kind_from_name(const std::string& name);

}  // namespace evmine
