#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hcot/core.hpp"

namespace hcot {

double iou(const BBox& a, const BBox& b);
/// Centre location error, pixels.
double cle(const BBox& a, const BBox& b);

struct CurvePoint {
  double threshold = 0.0;
  double rate = 0.0;
};

struct SuccessResult {
  std::vector<CurvePoint> curve;  // 21 thresholds 0, 0.05, ..., 1
  double auc = 0.0;               // mean over the 21 samples
};

struct PrecisionResult {
  std::vector<CurvePoint> curve;  // thresholds 0, 1, ..., 50 px
  double dp20 = 0.0;
};

inline constexpr int kSuccessSamples = 21;
inline constexpr int kPrecisionMaxPx = 50;
inline constexpr double kPrecisionRefPx = 20.0;

/// success(t) = fraction of IoU >= t. Throws on empty input.
SuccessResult success_auc(std::span<const double> ious);
/// precision(th) = fraction of CLE <= th. Throws on empty input.
PrecisionResult precision_dp(std::span<const double> cles, double ref_threshold = kPrecisionRefPx);

struct SequenceScores {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<double> ious;
  std::vector<double> cles;
};

struct Aggregate {
  std::size_t frames = 0;
  double auc = 0.0;
  double dp20 = 0.0;
};

/// Frame-weighted AUC / DP_20 pooled over the listed sequences.
Aggregate aggregate(std::span<const SequenceScores> seqs);

/// Per-attribute aggregates; a sequence counts toward every attribute it
/// carries. Attributes no sequence carries are absent.
std::map<Attribute, Aggregate> attribute_report(std::span<const SequenceScores> seqs);

/// Per-frame IoU and CLE of predictions against annotations.
SequenceScores score_sequence(const std::string& name, const std::vector<Attribute>& attributes,
                              std::span<const BBox> predicted, std::span<const BBox> truth);

}  // namespace hcot
