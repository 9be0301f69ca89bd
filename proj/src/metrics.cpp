#include "hcot/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hcot/error.hpp"

namespace hcot {
namespace {

constexpr double kThresholdSlack = 1e-12;

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double cle(const BBox& a, const BBox& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

SuccessResult success_auc(std::span<const double> ious) {
  require(!ious.empty(), ErrorKind::InvalidArgument, "success plot needs at least one frame");
  std::vector<double> sorted(ious.begin(), ious.end());
  std::sort(sorted.begin(), sorted.end());
  SuccessResult r;
  double sum = 0.0;
  for (int k = 0; k < kSuccessSamples; ++k) {
    const double t = k / static_cast<double>(kSuccessSamples - 1);
    // Identical boxes can score 1 - 1e-16 through rounding; do not let that
    // miss the t = 1 sample.
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), t - kThresholdSlack);
    const double rate =
        static_cast<double>(sorted.end() - first) / static_cast<double>(sorted.size());
    r.curve.push_back({t, rate});
    sum += rate;
  }
  r.auc = sum / kSuccessSamples;
  return r;
}

PrecisionResult precision_dp(std::span<const double> cles, double ref_threshold) {
  require(!cles.empty(), ErrorKind::InvalidArgument, "precision plot needs at least one frame");
  std::vector<double> sorted(cles.begin(), cles.end());
  std::sort(sorted.begin(), sorted.end());
  auto rate_at = [&](double th) {
    const auto last = std::upper_bound(sorted.begin(), sorted.end(), th);
    return static_cast<double>(last - sorted.begin()) / static_cast<double>(sorted.size());
  };
  PrecisionResult r;
  for (int px = 0; px <= kPrecisionMaxPx; ++px) r.curve.push_back({double(px), rate_at(px)});
  r.dp20 = rate_at(ref_threshold);
  return r;
}

Aggregate aggregate(std::span<const SequenceScores> seqs) {
  std::vector<double> ious, cles;
  for (const auto& s : seqs) {
    ious.insert(ious.end(), s.ious.begin(), s.ious.end());
    cles.insert(cles.end(), s.cles.begin(), s.cles.end());
  }
  Aggregate a;
  a.frames = ious.size();
  if (ious.empty()) return a;
  a.auc = success_auc(ious).auc;
  a.dp20 = precision_dp(cles).dp20;
  return a;
}

std::map<Attribute, Aggregate> attribute_report(std::span<const SequenceScores> seqs) {
  std::map<Attribute, Aggregate> out;
  for (Attribute attr : kAllAttributes) {
    std::vector<SequenceScores> members;
    for (const auto& s : seqs) {
      if (std::find(s.attributes.begin(), s.attributes.end(), attr) != s.attributes.end()) {
        members.push_back(s);
      }
    }
    if (!members.empty()) out[attr] = aggregate(members);
  }
  return out;
}

SequenceScores score_sequence(const std::string& name, const std::vector<Attribute>& attributes,
                              std::span<const BBox> predicted, std::span<const BBox> truth) {
  require(predicted.size() == truth.size(), ErrorKind::ShapeMismatch,
          "prediction count differs from annotation count for '" + name + "'");
  SequenceScores s{name, attributes, {}, {}};
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    s.ious.push_back(iou(predicted[i], truth[i]));
    s.cles.push_back(cle(predicted[i], truth[i]));
  }
  return s;
}

}  // namespace hcot
