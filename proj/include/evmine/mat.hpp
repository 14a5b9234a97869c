#pragma once

#include <cstddef>
#include <vector>

namespace evmine {

// Row-major dense matrix of doubles. Used for luma patches, DCT coefficient
// maps and per-patch score grids alike.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Mat& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

}  // namespace evmine
