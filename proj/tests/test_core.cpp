#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hcot/core.hpp"
#include "hcot/error.hpp"

using namespace hcot;

namespace {

HsiCube random_cube(int C, int H, int W, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  HsiCube c(C, H, W);
  for (float& v : c.data()) v = u(rng);
  return c;
}

}  // namespace

TEST_CASE("bbox centre and intersection with the frame") {
  const BBox b{2, 3, 4, 6};
  CHECK(b.center_x() == 4.0);
  CHECK(b.center_y() == 6.0);
  CHECK(BBox::from_center(4, 6, 4, 6) == b);
  CHECK(intersects_frame(b, 10, 10));
  CHECK_FALSE(intersects_frame({10, 0, 2, 2}, 10, 10));
  CHECK_FALSE(intersects_frame({-2, 0, 2, 2}, 10, 10));
  CHECK(intersects_frame({-1, -1, 2, 2}, 10, 10));
}

TEST_CASE("cube rejects bad sizes and values") {
  CHECK_THROWS_AS(HsiCube(2, 2, 2, std::vector<float>(7, 0.0f)), Error);
  CHECK_THROWS_AS(HsiCube(1, 1, 2, std::vector<float>{0.0f, -1.0f}), Error);
  CHECK_THROWS_AS(HsiCube(1, 1, 1, std::vector<float>{NAN}), Error);
  CHECK_THROWS_AS(HsiCube(1, 1, 1, std::vector<float>{INFINITY}), Error);
  const HsiCube ok(2, 1, 1, std::vector<float>{0.5f, 0.25f});
  CHECK(ok.at(1, 0, 0) == 0.25f);
}

TEST_CASE("false color picks bands unchanged") {
  const HsiCube cube = random_cube(25, 6, 7, 1);
  const HsiCube fc = false_color(cube, kDefaultFalseColorBands);
  REQUIRE(fc.bands() == 3);
  for (int k = 0; k < 3; ++k) {
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 7; ++c) CHECK(fc.at(k, r, c) == cube.at(kDefaultFalseColorBands[k], r, c));
    }
  }
  // Bands 1, 9 and 15 counted from one.
  CHECK(kDefaultFalseColorBands == BandTriplet{0, 8, 14});

  const HsiCube same = false_color(cube, {0, 0, 0});
  CHECK(same.band(0)[5] == same.band(1)[5]);
  CHECK(same.band(1)[5] == same.band(2)[5]);

  CHECK_THROWS_AS(false_color(cube, {0, 8, 25}), Error);
  CHECK_THROWS_AS(false_color(cube, {-1, 8, 14}), Error);
}

TEST_CASE("crop equal to the frame is an identity copy") {
  const HsiCube cube = random_cube(3, 8, 10, 2);
  const HsiCube out = crop_patch(cube, {0, 0, 10, 8}, 10, 8);
  CHECK(out == cube);
}

TEST_CASE("crop rejects empty and off-frame boxes") {
  const HsiCube cube = random_cube(1, 8, 8, 3);
  CHECK_THROWS_AS(crop_patch(cube, {1, 1, 0, 4}, 4), Error);
  CHECK_THROWS_AS(crop_patch(cube, {20, 20, 4, 4}, 4), Error);
  try {
    crop_patch(cube, {-10, 0, 5, 5}, 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Geometry);
  }
}

TEST_CASE("crop of a constant field stays constant") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HsiCube cube(2, 12, 16);
  for (int b = 0; b < 2; ++b) {
    for (float& v : cube.band(b)) v = 0.25f + 0.5f * b;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const double w = 0.5 + 15.0 * u(rng), h = 0.5 + 11.0 * u(rng);
    const BBox box{u(rng) * (16 - w), u(rng) * (12 - h), w, h};
    const int out = 1 + static_cast<int>(u(rng) * 40);
    const HsiCube p = crop_patch(cube, box, out, out + 3);
    for (int b = 0; b < 2; ++b) {
      for (float v : p.band(b)) REQUIRE(v == doctest::Approx(0.25 + 0.5 * b).epsilon(1e-6));
    }
  }
  // 2x upscale of a constant region.
  const HsiCube up = crop_patch(cube, {4, 4, 4, 4}, 8);
  for (float v : up.band(1)) CHECK(v == doctest::Approx(0.75));
}

TEST_CASE("crop zero-pads beyond the frame") {
  HsiCube cube(1, 4, 4);
  for (float& v : cube.data()) v = 1.0f;
  const HsiCube p = crop_patch(cube, {-4, 0, 8, 4}, 8, 4);
  CHECK(p.at(0, 0, 0) == 0.0f);
  CHECK(p.at(0, 0, 7) == 1.0f);
}

TEST_CASE("crop interpolates bilinearly") {
  HsiCube cube(1, 1, 2, std::vector<float>{0.0f, 1.0f});
  // Samples at x = -0.25 and 0.25 along a 0 -> 1 ramp, clamped at the left edge.
  const HsiCube p = crop_patch(cube, {0, 0, 1, 1}, 2, 1);
  CHECK(p.at(0, 0, 0) == doctest::Approx(0.0));
  CHECK(p.at(0, 0, 1) == doctest::Approx(0.25));
  const HsiCube mid = crop_patch(cube, {0.5, 0, 1, 1}, 1, 1);
  CHECK(mid.at(0, 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("response maps validate their range") {
  ResponseMaps m(2, 3);
  CHECK(m.cells() == 6);
  m.cm(1, 2) = 1.0;
  m.offset(1, 0, 0) = 0.5;
  m.size(0, 1, 1) = 0.3;
  CHECK_NOTHROW(m.validate());
  m.cm(0, 0) = 1.5;
  CHECK_THROWS_AS(m.validate(), Error);
  m.cm(0, 0) = 0.0;
  m.size(0, 1, 1) = NAN;
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(ResponseMaps(0, 3), Error);
}

TEST_CASE("attribute names round trip") {
  for (Attribute a : kAllAttributes) CHECK(parse_attribute(to_string(a)) == a);
  CHECK_FALSE(parse_attribute("XYZ").has_value());
}

TEST_CASE("sequence validation") {
  SequenceRecord seq;
  seq.name = "s";
  seq.frames = {HsiCube(3, 4, 4), HsiCube(3, 4, 4)};
  seq.annotations = {{0, 0, 2, 2}, {1, 1, 2, 2}};
  seq.false_color_bands = {0, 1, 2};
  CHECK_NOTHROW(seq.validate());
  seq.annotations.pop_back();
  CHECK_THROWS_AS(seq.validate(), Error);
  seq.annotations.push_back({1, 1, 2, 2});
  seq.frames[1] = HsiCube(3, 4, 5);
  CHECK_THROWS_AS(seq.validate(), Error);
  seq.frames[1] = HsiCube(3, 4, 4);
  seq.false_color_bands = {0, 1, 3};
  CHECK_THROWS_AS(seq.validate(), Error);
}
