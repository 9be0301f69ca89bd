#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hcot/error.hpp"
#include "hcot/synthgen.hpp"

using namespace hcot;

namespace {

ScenarioSpec tiny(int W = 20, int H = 16, int C = 4) {
  ScenarioSpec s;
  s.name = "tiny";
  s.frames = 3;
  s.width = W;
  s.height = H;
  s.bands = C;
  s.false_color_bands = {0, 1, 2};
  s.background.base.values.assign(static_cast<std::size_t>(C), 0.2);
  s.background.grad_x.assign(static_cast<std::size_t>(C), 0.0);
  s.background.grad_y.assign(static_cast<std::size_t>(C), 0.0);
  s.object.w = 4;
  s.object.h = 4;
  s.object.signature.values.assign(static_cast<std::size_t>(C), 0.8);
  s.object.path.cx = 6;
  s.object.path.cy = 6;
  return s;
}

bool has(const std::vector<Attribute>& v, Attribute a) {
  return std::find(v.begin(), v.end(), a) != v.end();
}

}  // namespace

TEST_CASE("signature is a clamped sum of Gaussians") {
  const GaussianBump b[] = {{2.0, 1.0, 0.5}};
  const SpectralSignature s = make_signature(5, 0.1, b);
  CHECK(s.values[2] == doctest::Approx(0.6));
  CHECK(s.values[1] == doctest::Approx(0.1 + 0.5 * std::exp(-0.5)));
  const GaussianBump big[] = {{0.0, 1.0, 5.0}};
  CHECK(make_signature(3, 0.0, big).values[0] == 1.0);
  const GaussianBump neg[] = {{0.0, 1.0, -5.0}};
  CHECK(make_signature(3, 0.0, neg).values[0] == 0.0);
}

TEST_CASE("rectangle on pixel boundaries paints exact values") {
  const ScenarioSpec s = tiny();
  const HsiCube f = generate_frame(s, 0);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 20; ++c) {
      const bool inside = r >= 4 && r < 8 && c >= 4 && c < 8;
      CHECK(f.at(1, r, c) == doctest::Approx(inside ? 0.8 : 0.2));
    }
}

TEST_CASE("fractional rectangle edges blend by coverage") {
  ScenarioSpec s = tiny();
  s.object.path.cx = 6.5;  // box x from 4.5 to 8.5
  const HsiCube f = generate_frame(s, 0);
  CHECK(f.at(0, 5, 4) == doctest::Approx(0.5 * 0.2 + 0.5 * 0.8));
  CHECK(f.at(0, 5, 5) == doctest::Approx(0.8));
  CHECK(f.at(0, 5, 8) == doctest::Approx(0.5 * 0.2 + 0.5 * 0.8));
  CHECK(f.at(0, 5, 9) == doctest::Approx(0.2));
}

TEST_CASE("ellipse covers its centre and not its corners") {
  ScenarioSpec s = tiny();
  s.object.w = 10;
  s.object.h = 8;
  s.object.path.cx = 10;
  s.object.path.cy = 8;
  s.object.shape = Shape::Ellipse;
  const HsiCube f = generate_frame(s, 0);
  CHECK(f.at(0, 8, 10) == doctest::Approx(0.8));
  CHECK(f.at(0, 4, 5) == doctest::Approx(0.2));
  double area = 0.0;
  for (float v : f.band(0)) area += (v - 0.2) / 0.6;
  CHECK(area == doctest::Approx(M_PI * 5 * 4).epsilon(0.03));
}

TEST_CASE("path reflects off the walls and turns on schedule") {
  ObjectSpec o;
  o.w = 4;
  o.h = 4;
  o.path.cx = 4;
  o.path.cy = 10;
  o.path.vx = -3;
  const BBox b1 = object_box(o, 1, 20, 20);
  CHECK(b1.center_x() == doctest::Approx(3.0));  // 4 - 3 = 1, reflected about 2
  CHECK(b1.x >= 0.0);
  o.path = MotionPath{};
  o.path.cx = 10;
  o.path.cy = 10;
  o.path.vx = 1;
  o.path.turn_frame = 3;
  o.path.turn_vy = 2;
  CHECK(object_box(o, 2, 40, 40).center_x() == doctest::Approx(12));
  CHECK(object_box(o, 3, 40, 40).center_x() == doctest::Approx(12));
  CHECK(object_box(o, 3, 40, 40).center_y() == doctest::Approx(12));
  CHECK(object_box(o, 5, 40, 40).center_y() == doctest::Approx(16));
}

TEST_CASE("occluder hides the object while active") {
  ScenarioSpec s = tiny();
  OcclusionEvent occ;
  occ.start = 1;
  occ.duration = 1;
  occ.box = {2, 2, 10, 10};
  occ.signature.values.assign(4, 0.5);
  s.occlusions.push_back(occ);
  CHECK(generate_frame(s, 0).at(0, 5, 5) == doctest::Approx(0.8));
  CHECK(generate_frame(s, 1).at(0, 5, 5) == doctest::Approx(0.5));
  CHECK(generate_frame(s, 2).at(0, 5, 5) == doctest::Approx(0.8));
  CHECK(has(derive_attributes(s), Attribute::OCC));
}

TEST_CASE("noise is seeded per frame and never negative") {
  ScenarioSpec s = tiny();
  s.background.base.values.assign(4, 0.01);
  s.noise_sigma = 0.2;
  s.seed = 5;
  const HsiCube a = generate_frame(s, 1);
  CHECK(a == generate_frame(s, 1));
  CHECK_FALSE(a == generate_frame(s, 2));
  for (float v : a.data()) CHECK(v >= 0.0f);
  s.seed = 6;
  CHECK_FALSE(a == generate_frame(s, 1));
}

TEST_CASE("spec validation catches inconsistencies") {
  ScenarioSpec s = tiny();
  CHECK_NOTHROW(s.validate());
  ScenarioSpec bad = s;
  bad.object.signature.values.pop_back();
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = s;
  bad.object.path.vx = 5;
  bad.max_step = 4;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = s;
  bad.decoy = s.object;
  bad.decoy->signature.values[1] = 0.3;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.decoy->signature.values[1] = 0.8;
  bad.decoy->signature.values[3] = 0.3;
  CHECK_NOTHROW(bad.validate());
  bad = s;
  OcclusionEvent occ;
  occ.start = 2;
  occ.duration = 5;
  occ.box = {0, 0, 2, 2};
  occ.signature.values.assign(4, 0.5);
  bad.occlusions.push_back(occ);
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(generate_frame(s, 3), Error);
}

TEST_CASE("standard suite layout") {
  const auto suite = standard_suite(7);
  REQUIRE(suite.size() == 12);
  std::set<std::string> names;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const ScenarioSpec& s = suite[i];
    names.insert(s.name);
    CHECK_NOTHROW(s.validate());
    CHECK(s.width == 128);
    CHECK(s.height == 96);
    CHECK(s.bands == 25);
    CHECK(s.object.w == 18.0);
    CHECK(s.object.h == 14.0);
    CHECK(s.false_color_bands == kDefaultFalseColorBands);
    CHECK(s.object.shape == (i % 2 == 0 ? Shape::Rectangle : Shape::Ellipse));
    const bool occ = s.name.find("occ") != std::string::npos;
    const bool camo = s.name.rfind("camo", 0) == 0;
    CHECK(occ == !s.occlusions.empty());
    CHECK(camo == s.decoy.has_value());
    for (const auto& o : s.occlusions) {
      CHECK(o.start == 25);
      CHECK(o.duration == 14);
    }
  }
  CHECK(names.size() == 12);
}

TEST_CASE("standard suite is seed-deterministic with jittered starts") {
  const auto a = standard_suite(7), b = standard_suite(7), c = standard_suite(8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].object.path.cx == b[i].object.path.cx);
    CHECK(std::abs(a[i].object.path.cx - c[i].object.path.cx) <= 4.0);
  }
  CHECK(generate_frame(a[2], 5) == generate_frame(b[2], 5));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a[i].object.path.cx != c[i].object.path.cx;
  CHECK(any_diff);
}

TEST_CASE("standard suite covers the desk-scale attributes") {
  std::set<Attribute> seen;
  for (const auto& s : standard_suite(7)) {
    const auto attrs = derive_attributes(s);
    seen.insert(attrs.begin(), attrs.end());
    if (!s.occlusions.empty()) CHECK(has(attrs, Attribute::OCC));
    if (s.name == "plain_turn_fast") CHECK(has(attrs, Attribute::FM));
    if (s.name == "camo_turn_clutter") CHECK(has(attrs, Attribute::BC));
    if (s.name == "plain_linear_clean") CHECK_FALSE(has(attrs, Attribute::FM));
  }
  for (Attribute a : {Attribute::BC, Attribute::FM, Attribute::OCC, Attribute::SC, Attribute::SV})
    CHECK(seen.count(a) == 1);
}

TEST_CASE("annotations stay in frame and within the step bound") {
  for (const auto& s : standard_suite(3)) {
    BBox prev = object_box(s.object, 0, s.width, s.height);
    for (int t = 0; t < s.frames; ++t) {
      const BBox b = object_box(s.object, t, s.width, s.height);
      CHECK(b.x >= 0.0);
      CHECK(b.y >= 0.0);
      CHECK(b.x + b.w <= s.width);
      CHECK(b.y + b.h <= s.height);
      CHECK(std::hypot(b.center_x() - prev.center_x(), b.center_y() - prev.center_y()) <= s.max_step);
      prev = b;
    }
  }
}

TEST_CASE("generated sequence validates") {
  ScenarioSpec s = standard_suite(1)[3];
  s.frames = 4;
  s.occlusions.clear();
  const SequenceRecord seq = generate(s);
  CHECK_NOTHROW(seq.validate());
  CHECK(seq.frames.size() == 4);
  CHECK(seq.annotations[2] == object_box(s.object, 2, s.width, s.height));
}

TEST_CASE("decoy is separable only with the full spectrum") {
  for (const auto& s : standard_suite(7)) {
    if (!s.decoy) continue;
    const CamouflageErrors e = camouflage_errors(s);
    CHECK(e.samples > 100);
    CHECK(e.false_color >= 0.3);
    CHECK(e.full_spectrum <= 0.05);
  }
  CHECK_THROWS_AS(camouflage_errors(standard_suite(7)[0]), Error);
}

TEST_CASE("crossing decoy passes through the object's row") {
  const ScenarioSpec s = crossing_decoy_scenario(7);
  CHECK_NOTHROW(s.validate());
  CHECK(s.frames == 70);
  REQUIRE(s.decoy.has_value());
  bool above = false, below = false;
  for (int t = 0; t < s.frames; ++t) {
    const double dy = object_box(*s.decoy, t, s.width, s.height).center_y() -
                      object_box(s.object, t, s.width, s.height).center_y();
    above |= dy < -10;
    below |= dy > 10;
  }
  CHECK(above);
  CHECK(below);
  CHECK(has(derive_attributes(s), Attribute::SV));
}
