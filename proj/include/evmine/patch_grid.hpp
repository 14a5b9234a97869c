#pragma once

#include <vector>

#include "evmine/image.hpp"
#include "evmine/mat.hpp"

namespace evmine {

// 1-based grid coordinate; r in [1, g_h], c in [1, g_w].
struct PatchCoord {
  int r = 0;
  int c = 0;

  bool operator==(const PatchCoord&) const = default;
  // Row-major ordering, used as the universal tie-breaker.
  bool operator<(const PatchCoord& o) const {
    return r != o.r ? r < o.r : c < o.c;
  }
};

// Non-overlapping P x P tiling of the top-left g_h*P x g_w*P region.
// Trailing pixels beyond the grid are discarded.
struct PatchGrid {
  int patch_size = 0;
  int g_h = 0;
  int g_w = 0;
  std::vector<Mat> patches;      // row-major, g_h*g_w entries of P x P luma
  std::vector<PixelBox> boxes;   // source pixel rectangle per patch

  int count() const { return g_h * g_w; }
  int index(PatchCoord rc) const { return (rc.r - 1) * g_w + (rc.c - 1); }
  PatchCoord coord(int idx) const { return {idx / g_w + 1, idx % g_w + 1}; }

  const Mat& patch(PatchCoord rc) const { return patches[index(rc)]; }
  const PixelBox& box(PatchCoord rc) const { return boxes[index(rc)]; }
};

// Floor-divided tiling; throws ImageTooSmall if either dimension < patch_size.
PatchGrid decompose(const LumaPlane& plane, int patch_size);

}  // namespace evmine
