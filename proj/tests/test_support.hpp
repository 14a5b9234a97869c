#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "evmine/image.hpp"
#include "evmine/rng.hpp"

namespace evtest {

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("evmine_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::filesystem::path path() const { return dir_; }
  std::string str(const std::string& name = "") const {
    return name.empty() ? dir_.string() : (dir_ / name).string();
  }

 private:
  std::filesystem::path dir_;
};

inline evmine::ImageBuffer solid_image(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
  evmine::ImageBuffer img;
  img.width = w;
  img.height = h;
  img.data.resize(static_cast<size_t>(w) * h * 3);
  for (size_t i = 0; i < img.data.size(); i += 3) {
    img.data[i] = r;
    img.data[i + 1] = g;
    img.data[i + 2] = b;
  }
  return img;
}

inline evmine::ImageBuffer noise_image(int w, int h, uint64_t seed) {
  evmine::Rng rng(seed);
  evmine::ImageBuffer img;
  img.width = w;
  img.height = h;
  img.data.resize(static_cast<size_t>(w) * h * 3);
  for (auto& byte : img.data) byte = static_cast<uint8_t>(rng.index(256));
  return img;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace evtest
