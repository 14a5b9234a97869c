#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evmine/mat.hpp"

namespace evmine {

// 8-bit sRGB image, row-major, 3 channels. Alpha is dropped at decode time.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  static constexpr int channels = 3;
  std::vector<uint8_t> data;  // width*height*3

  uint8_t* pixel(int x, int y) {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  const uint8_t* pixel(int x, int y) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
};

// Scalar working plane in [0,1], same dimensions as its source image.
struct LumaPlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // row-major

  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

// Pixel rectangle, top-left anchored, 0-based.
struct PixelBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

// Decodes a PNG or JPEG file (detected by magic bytes, not extension).
// Throws FileNotFound, DecodeError, or ImageTooSmall when either dimension
// is below min_dim.
ImageBuffer load_image(const std::string& path, int min_dim = 1);

// Encodes an 8-bit RGB PNG. Fixed encoder settings keep output bytes
// deterministic for identical pixels. Throws IoError.
std::vector<uint8_t> encode_png(const ImageBuffer& img);
void save_png(const ImageBuffer& img, const std::string& path);

// BT.601 luma: (0.299 R + 0.587 G + 0.114 B) / 255.
LumaPlane to_luma(const ImageBuffer& img);

// Returns box expanded by margin on all sides, clamped to image bounds.
// Throws BoxOutOfBounds if the box itself is not fully inside the image.
ImageBuffer crop_with_margin(const ImageBuffer& img, const PixelBox& box, int margin);

}  // namespace evmine
