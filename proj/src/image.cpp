#include "evmine/image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "evmine/error.hpp"

namespace evmine {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

bool is_png(const unsigned char* magic, size_t n) {
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  return n >= 8 && std::memcmp(magic, sig, 8) == 0;
}

bool is_jpeg(const unsigned char* magic, size_t n) {
  return n >= 3 && magic[0] == 0xff && magic[1] == 0xd8 && magic[2] == 0xff;
}

ImageBuffer decode_png(FILE* f, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::DecodeError, "png reader allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::DecodeError, "png info allocation failed");
  }
  std::vector<png_bytep> row_ptrs;
  ImageBuffer img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::DecodeError, "corrupt PNG: " + path);
  }
  png_init_io(png, f);
  png_read_info(png, info);

  // Normalize every PNG flavor to 8-bit RGB.
  png_set_expand(png);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
      png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.data.resize(static_cast<size_t>(img.width) * img.height * 3);
  row_ptrs.resize(img.height);
  for (int y = 0; y < img.height; ++y) {
    row_ptrs[y] = img.data.data() + static_cast<size_t>(y) * img.width * 3;
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  longjmp(mgr->jump, 1);
}

ImageBuffer decode_jpeg(FILE* f, const std::string& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorKind::DecodeError, "corrupt JPEG: " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  ImageBuffer img;
  img.width = static_cast<int>(cinfo.output_width);
  img.height = static_cast<int>(cinfo.output_height);
  img.data.resize(static_cast<size_t>(img.width) * img.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.data.data() + static_cast<size_t>(cinfo.output_scanline) * img.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace

ImageBuffer load_image(const std::string& path, int min_dim) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorKind::FileNotFound, "cannot open " + path);

  unsigned char magic[8] = {0};
  size_t n = std::fread(magic, 1, sizeof(magic), f.get());
  std::rewind(f.get());

  ImageBuffer img;
  if (is_png(magic, n)) {
    img = decode_png(f.get(), path);
  } else if (is_jpeg(magic, n)) {
    img = decode_jpeg(f.get(), path);
  } else {
    throw Error(ErrorKind::DecodeError, "not a PNG or JPEG file: " + path);
  }
  if (img.width < min_dim || img.height < min_dim) {
    throw Error(ErrorKind::ImageTooSmall,
                path + ": " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " below minimum dimension " + std::to_string(min_dim));
  }
  return img;
}

std::vector<uint8_t> encode_png(const ImageBuffer& img) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::IoError, "png writer allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::IoError, "png info allocation failed");
  }
  std::vector<uint8_t> bytes;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoError, "png encode failed");
  }
  png_set_write_fn(
      png, &bytes,
      [](png_structp p, png_bytep data, png_size_t n) {
        auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(p));
        out->insert(out->end(), data, data + n);
      },
      [](png_structp) {});
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.data.data() + static_cast<size_t>(y) * img.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return bytes;
}

void save_png(const ImageBuffer& img, const std::string& path) {
  const std::vector<uint8_t> bytes = encode_png(img);
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
  if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
    throw Error(ErrorKind::IoError, "short write: " + path);
  }
}

LumaPlane to_luma(const ImageBuffer& img) {
  LumaPlane plane;
  plane.width = img.width;
  plane.height = img.height;
  plane.data.resize(static_cast<size_t>(img.width) * img.height);
  const uint8_t* p = img.data.data();
  for (size_t i = 0; i < plane.data.size(); ++i, p += 3) {
    plane.data[i] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
  }
  return plane;
}

ImageBuffer crop_with_margin(const ImageBuffer& img, const PixelBox& box, int margin) {
  if (box.x < 0 || box.y < 0 || box.w <= 0 || box.h <= 0 ||
      box.x + box.w > img.width || box.y + box.h > img.height) {
    throw Error(ErrorKind::BoxOutOfBounds, "crop box outside image bounds");
  }
  const int x0 = std::max(0, box.x - margin);
  const int y0 = std::max(0, box.y - margin);
  const int x1 = std::min(img.width, box.x + box.w + margin);
  const int y1 = std::min(img.height, box.y + box.h + margin);

  ImageBuffer out;
  out.width = x1 - x0;
  out.height = y1 - y0;
  out.data.resize(static_cast<size_t>(out.width) * out.height * 3);
  for (int y = y0; y < y1; ++y) {
    std::memcpy(out.data.data() + static_cast<size_t>(y - y0) * out.width * 3,
                img.data.data() + (static_cast<size_t>(y) * img.width + x0) * 3,
                static_cast<size_t>(out.width) * 3);
  }
  return out;
}

}  // namespace evmine
