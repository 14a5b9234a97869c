#include <doctest.h>

#include "evmine/error.hpp"
#include "evmine/image.hpp"
#include "test_support.hpp"

using namespace evmine;
using evtest::TempDir;

TEST_SUITE("image") {

TEST_CASE("png round-trips pixels exactly") {
  TempDir tmp("img");
  const ImageBuffer img = evtest::noise_image(224, 224, 7);
  save_png(img, tmp.str("a.png"));
  const ImageBuffer back = load_image(tmp.str("a.png"));
  CHECK(back.width == 224);
  CHECK(back.height == 224);
  CHECK(back.data == img.data);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS_MESSAGE(load_image("/nonexistent/x.png"), Error, "cannot open");
  try {
    load_image("/nonexistent/x.png");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FileNotFound);
  }
}

TEST_CASE("garbage and truncated bytes decode-fail") {
  TempDir tmp("img");
  evtest::write_file(tmp.str("junk.png"), "this is not an image");
  CHECK_THROWS_AS(load_image(tmp.str("junk.png")), Error);

  // A real PNG cut off mid-stream.
  const ImageBuffer img = evtest::noise_image(64, 64, 3);
  save_png(img, tmp.str("full.png"));
  const std::string bytes = evtest::read_file(tmp.str("full.png"));
  evtest::write_file(tmp.str("trunc.png"), bytes.substr(0, bytes.size() / 2));
  try {
    load_image(tmp.str("trunc.png"));
    FAIL("expected DecodeError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DecodeError);
  }
}

TEST_CASE("too small for the configured patch size") {
  TempDir tmp("img");
  save_png(evtest::solid_image(8, 8, 10, 10, 10), tmp.str("tiny.png"));
  try {
    load_image(tmp.str("tiny.png"), 16);
    FAIL("expected ImageTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ImageTooSmall);
  }
}

TEST_CASE("luma uses BT.601 weights") {
  const ImageBuffer white = evtest::solid_image(2, 2, 255, 255, 255);
  CHECK(to_luma(white).at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  const ImageBuffer black = evtest::solid_image(2, 2, 0, 0, 0);
  CHECK(to_luma(black).at(0, 0) == doctest::Approx(0.0));
  const ImageBuffer red = evtest::solid_image(2, 2, 255, 0, 0);
  CHECK(to_luma(red).at(0, 0) == doctest::Approx(0.299).epsilon(1e-12));
}

TEST_CASE("luma is bounded and channel-monotone") {
  for (int v = 0; v <= 255; v += 17) {
    const LumaPlane lo = to_luma(evtest::solid_image(1, 1, (uint8_t)v, 0, 0));
    const LumaPlane hi = to_luma(evtest::solid_image(1, 1, (uint8_t)v, 0, 128));
    CHECK(lo.at(0, 0) >= 0.0);
    CHECK(hi.at(0, 0) <= 1.0);
    CHECK(hi.at(0, 0) > lo.at(0, 0));
  }
}

TEST_CASE("crop margins clamp at the border") {
  const ImageBuffer img = evtest::noise_image(224, 224, 5);

  SUBCASE("zero margin is the exact box") {
    const ImageBuffer c = crop_with_margin(img, {32, 48, 16, 16}, 0);
    CHECK(c.width == 16);
    CHECK(c.height == 16);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        CHECK(c.pixel(x, y)[0] == img.pixel(32 + x, 48 + y)[0]);
      }
    }
  }
  SUBCASE("interior margin expands symmetrically") {
    const ImageBuffer c = crop_with_margin(img, {104, 104, 16, 16}, 8);
    CHECK(c.width == 32);
    CHECK(c.height == 32);
  }
  SUBCASE("corner crop clamps without padding") {
    const ImageBuffer c = crop_with_margin(img, {0, 0, 16, 16}, 8);
    CHECK(c.width == 24);
    CHECK(c.height == 24);
  }
  SUBCASE("out-of-bounds box") {
    try {
      crop_with_margin(img, {220, 0, 16, 16}, 0);
      FAIL("expected BoxOutOfBounds");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BoxOutOfBounds);
    }
  }
}

}  // TEST_SUITE
