#include "evmine/patch_grid.hpp"

#include <string>

#include "evmine/error.hpp"

namespace evmine {

PatchGrid decompose(const LumaPlane& plane, int patch_size) {
  if (patch_size < 1) {
    throw Error(ErrorKind::InvalidConfig, "patch size must be >= 1");
  }
  if (plane.width < patch_size || plane.height < patch_size) {
    throw Error(ErrorKind::ImageTooSmall,
                std::to_string(plane.width) + "x" + std::to_string(plane.height) +
                    " cannot hold a single " + std::to_string(patch_size) + "px patch");
  }
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.g_h = plane.height / patch_size;
  grid.g_w = plane.width / patch_size;
  grid.patches.reserve(static_cast<size_t>(grid.g_h) * grid.g_w);
  grid.boxes.reserve(grid.patches.capacity());

  for (int r = 0; r < grid.g_h; ++r) {
    for (int c = 0; c < grid.g_w; ++c) {
      Mat patch(patch_size, patch_size);
      const int px = c * patch_size;
      const int py = r * patch_size;
      for (int y = 0; y < patch_size; ++y) {
        for (int x = 0; x < patch_size; ++x) {
          patch.at(y, x) = plane.at(px + x, py + y);
        }
      }
      grid.patches.push_back(std::move(patch));
      grid.boxes.push_back({px, py, patch_size, patch_size});
    }
  }
  return grid;
}

}  // namespace evmine
