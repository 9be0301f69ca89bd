#include "hcot/dam.hpp"

#include <algorithm>
#include <cmath>

#include "hcot/error.hpp"

namespace hcot {
namespace {

constexpr double kMinPositive = 1e-6;

void keep_positive(MotionState& st) {
  st.s[2] = std::max(st.s[2], kMinPositive);
  st.s[3] = std::max(st.s[3], kMinPositive);
}

}  // namespace

double decision_confidence(std::span<const double> cm, bool mean_denominator) {
  require(!cm.empty(), ErrorKind::InvalidArgument, "decision confidence of an empty map");
  const auto [lo, hi] = std::minmax_element(cm.begin(), cm.end());
  const double mn = *lo;
  const double range = *hi - mn;
  double energy = 0.0;
  for (double v : cm) energy += (v - mn) * (v - mn);
  if (mean_denominator) energy /= static_cast<double>(cm.size());
  if (energy <= 0.0) return 0.0;
  return range * range / energy;
}

Matrix KalmanParams::transition() {
  Matrix F = Matrix::identity(kStateDim);
  F(0, 4) = 1.0;
  F(1, 5) = 1.0;
  F(2, 6) = 1.0;
  return F;
}

Matrix KalmanParams::observation() {
  Matrix H(kObsDim, kStateDim);
  for (std::size_t i = 0; i < kObsDim; ++i) H(i, i) = 1.0;
  return H;
}

KalmanParams KalmanParams::from_config(const TrackerConfig& cfg) {
  KalmanParams p;
  p.F = transition();
  p.H = observation();
  p.Q = Matrix::diagonal(cfg.process_noise);
  p.R = Matrix::diagonal(cfg.observation_noise);
  p.G = Matrix::identity(kStateDim);
  return p;
}

MotionState kalman_predict(const MotionState& state, const KalmanParams& p) {
  MotionState out;
  const auto fs = p.F * std::span<const double>(state.s);
  const auto gw = p.G * std::span<const double>(p.w);
  for (std::size_t i = 0; i < kStateDim; ++i) out.s[i] = fs[i] + gw[i];
  out.E = p.F * state.E * p.F.transpose() + p.Q;
  return out;
}

MotionState kalman_update(const MotionState& state, std::span<const double> z,
                          const KalmanParams& p) {
  require(z.size() == kObsDim, ErrorKind::ShapeMismatch, "observation must have 4 components");
  for (double v : z) require(std::isfinite(v), ErrorKind::InvalidArgument, "observation not finite");

  const Matrix Ht = p.H.transpose();
  const Matrix S = p.H * state.E * Ht + p.R;
  const Matrix K = state.E * Ht * S.inverse();

  const auto hs = p.H * std::span<const double>(state.s);
  std::array<double, kObsDim> innovation{};
  for (std::size_t i = 0; i < kObsDim; ++i) innovation[i] = z[i] - hs[i];
  const auto correction = K * std::span<const double>(innovation);

  MotionState out;
  for (std::size_t i = 0; i < kStateDim; ++i) out.s[i] = state.s[i] + correction[i];
  const Matrix E = (Matrix::identity(kStateDim) - K * p.H) * state.E;
  out.E = 0.5 * (E + E.transpose());
  return out;
}

std::array<double, kObsDim> box_to_obs(const BBox& box) {
  require(box.valid(), ErrorKind::InvalidArgument, "box must have positive width and height");
  return {box.center_x(), box.center_y(), box.w * box.h, box.w / box.h};
}

BBox obs_to_box(std::span<const double> z) {
  require(z.size() >= kObsDim, ErrorKind::ShapeMismatch, "observation must have 4 components");
  require(z[2] > 0.0 && z[3] > 0.0, ErrorKind::InvalidArgument,
          "area and aspect ratio must be positive");
  const double w = std::sqrt(z[2] * z[3]);
  const double h = std::sqrt(z[2] / z[3]);
  return BBox::from_center(z[0], z[1], w, h);
}

void DcHistory::push(int frame, double dc) {
  require(entries_.empty() || frame > entries_.back().first, ErrorKind::InvalidArgument,
          "DC history frame indices must increase");
  entries_.emplace_back(frame, dc);
  while (entries_.size() > capacity_) entries_.pop_front();
}

std::optional<double> DcHistory::window_mean(std::size_t window, std::size_t skip) const {
  if (window == 0 || entries_.size() < window + skip) return std::nullopt;
  double sum = 0.0;
  const std::size_t end = entries_.size() - skip;
  for (std::size_t i = end - window; i < end; ++i) sum += entries_[i].second;
  return sum / static_cast<double>(window);
}

bool DcHistory::falling(std::size_t window) const {
  const auto current = window_mean(window, 0);
  const auto previous = window_mean(window, window);
  return current && previous && *current < *previous;
}

std::string_view to_string(BoxSource s) {
  return s == BoxSource::Model ? "model" : "kalman";
}

std::string_view to_string(DamBranch b) {
  switch (b) {
    case DamBranch::Accept: return "accept";
    case DamBranch::LowConfidence: return "low_confidence";
    case DamBranch::ConfidentError: return "confident_error";
    case DamBranch::Disabled: return "disabled";
  }
  return "?";
}

DistractorAwareModule::DistractorAwareModule(const TrackerConfig& cfg)
    : cfg_(cfg),
      params_(KalmanParams::from_config(cfg)),
      history_(2 * static_cast<std::size_t>(std::max(cfg.rectify_window, 1))) {}

void DistractorAwareModule::init(const BBox& first_box) {
  const auto z = box_to_obs(first_box);
  state_ = MotionState{};
  std::copy(z.begin(), z.end(), state_.s.begin());
  state_.E = cfg_.initial_covariance_scale * params_.Q;
  history_ = DcHistory(history_.capacity());
  last_box_ = first_box;
  frame_ = 1;
  initialized_ = true;
}

DamOutput DistractorAwareModule::step(const BBox& raw_box, std::span<const double> cm) {
  require(initialized_, ErrorKind::State, "distractor-aware module used before init");
  ++frame_;
  DamOutput out;
  out.dc = decision_confidence(cm, cfg_.dc_use_mean_denominator);
  history_.push(frame_, out.dc);
  out.offset = std::hypot(raw_box.center_x() - last_box_.center_x(),
                          raw_box.center_y() - last_box_.center_y());

  if (!cfg_.use_dam) {
    out.box = raw_box;
    out.branch = DamBranch::Disabled;
    last_box_ = out.box;
    return out;
  }

  state_ = kalman_predict(state_, params_);
  keep_positive(state_);
  const BBox predicted = obs_to_box(std::span<const double>(state_.s).first(kObsDim));

  if (out.dc < cfg_.dc_threshold) {
    out.box = predicted;
    out.source = BoxSource::Kalman;
    out.branch = DamBranch::LowConfidence;
  } else if (cfg_.use_rectify && out.offset > cfg_.offset_threshold &&
             history_.falling(static_cast<std::size_t>(cfg_.rectify_window))) {
    out.box = predicted;
    out.source = BoxSource::Kalman;
    out.branch = DamBranch::ConfidentError;
  } else {
    state_ = kalman_update(state_, box_to_obs(raw_box), params_);
    keep_positive(state_);
    out.box = raw_box;
  }
  last_box_ = out.box;
  return out;
}

}  // namespace hcot
