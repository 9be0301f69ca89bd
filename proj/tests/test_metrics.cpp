#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hcot/error.hpp"
#include "hcot/metrics.hpp"

using namespace hcot;

namespace {

double naive_auc(const std::vector<double>& ious) {
  double sum = 0.0;
  for (int k = 0; k <= 20; ++k) {
    int hit = 0;
    for (double v : ious) hit += v >= k * 0.05 - 1e-12 ? 1 : 0;
    sum += static_cast<double>(hit) / static_cast<double>(ious.size());
  }
  return sum / 21.0;
}

double naive_dp(const std::vector<double>& cles, double th) {
  int hit = 0;
  for (double v : cles) hit += v <= th ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(cles.size());
}

}  // namespace

TEST_CASE("iou and centre error examples") {
  const BBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
  CHECK(iou(a, {20, 20, 5, 5}) == 0.0);
  CHECK(iou(a, {10, 0, 10, 10}) == 0.0);
  CHECK(iou(a, {0, 0, 0, 0}) == 0.0);
  CHECK(cle(a, {3, 4, 10, 10}) == doctest::Approx(5.0));
}

TEST_CASE("iou is symmetric and in [0, 1]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int t = 0; t < 500; ++t) {
    const BBox a{u(rng), u(rng), 1 + u(rng), 1 + u(rng)};
    const BBox b{u(rng), u(rng), 1 + u(rng), 1 + u(rng)};
    const double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == iou(b, a));
  }
}

TEST_CASE("perfect tracking scores one") {
  const std::vector<double> ious(30, 1.0), cles(30, 0.0);
  CHECK(success_auc(ious).auc == doctest::Approx(1.0));
  CHECK(precision_dp(cles).dp20 == 1.0);
}

TEST_CASE("total failure scores the threshold-zero sample only") {
  const std::vector<double> ious(10, 0.0), cles(10, 100.0);
  CHECK(success_auc(ious).auc == doctest::Approx(1.0 / 21.0));
  CHECK(precision_dp(cles).dp20 == 0.0);
}

TEST_CASE("curves match a naive count") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> ious(1 + static_cast<std::size_t>(u(rng) * 80)), cles(ious.size());
    for (double& v : ious) v = u(rng);
    for (double& v : cles) v = 60.0 * u(rng);
    const SuccessResult s = success_auc(ious);
    REQUIRE(s.curve.size() == 21);
    CHECK(s.auc == doctest::Approx(naive_auc(ious)));
    const PrecisionResult p = precision_dp(cles);
    REQUIRE(p.curve.size() == 51);
    CHECK(p.dp20 == doctest::Approx(naive_dp(cles, 20.0)));
    for (const CurvePoint& c : p.curve) CHECK(c.rate == doctest::Approx(naive_dp(cles, c.threshold)));
    for (std::size_t k = 1; k < s.curve.size(); ++k) CHECK(s.curve[k].rate <= s.curve[k - 1].rate);
    for (std::size_t k = 1; k < p.curve.size(); ++k) CHECK(p.curve[k].rate >= p.curve[k - 1].rate);
  }
}

TEST_CASE("threshold boundaries are inclusive") {
  const std::vector<double> ious{0.5}, cles{20.0};
  CHECK(success_auc(ious).curve[10].rate == 1.0);
  CHECK(success_auc(ious).curve[11].rate == 0.0);
  CHECK(precision_dp(cles).dp20 == 1.0);
  CHECK(precision_dp(std::vector<double>{20.000001}).dp20 == 0.0);
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(success_auc(std::vector<double>{}), Error);
  CHECK_THROWS_AS(precision_dp(std::vector<double>{}), Error);
}

TEST_CASE("aggregate pools frames across sequences") {
  SequenceScores a{"a", {Attribute::OCC}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}};
  SequenceScores b{"b", {Attribute::OCC, Attribute::BC}, {0.0}, {100.0}};
  const std::vector<SequenceScores> both{a, b};
  const Aggregate agg = aggregate(both);
  CHECK(agg.frames == 4);
  CHECK(agg.dp20 == doctest::Approx(0.75));
  CHECK(agg.auc == doctest::Approx(naive_auc({1.0, 1.0, 1.0, 0.0})));

  const auto report = attribute_report(both);
  CHECK(report.size() == 2);
  CHECK(report.at(Attribute::OCC).frames == 4);
  CHECK(report.at(Attribute::BC).frames == 1);
  CHECK(report.at(Attribute::BC).dp20 == 0.0);
  CHECK(report.count(Attribute::SV) == 0);
}

TEST_CASE("score_sequence pairs boxes frame by frame") {
  const std::vector<BBox> pred{{0, 0, 10, 10}, {5, 0, 10, 10}};
  const std::vector<BBox> gt{{0, 0, 10, 10}, {0, 0, 10, 10}};
  const SequenceScores s = score_sequence("s", {}, pred, gt);
  CHECK(s.ious[0] == 1.0);
  CHECK(s.cles[1] == doctest::Approx(5.0));
  CHECK_THROWS_AS(score_sequence("s", {}, pred, std::vector<BBox>{gt[0]}), Error);
}
