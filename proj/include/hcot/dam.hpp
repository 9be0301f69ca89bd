#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hcot/config.hpp"
#include "hcot/core.hpp"
#include "hcot/matrix.hpp"

namespace hcot {

/// |max - min|^2 / sum_i (cm_i - min)^2. A constant map scores 0.
/// With `mean_denominator` the sum becomes a mean (classical APCE).
double decision_confidence(std::span<const double> cm, bool mean_denominator = false);

inline constexpr std::size_t kStateDim = 7;
inline constexpr std::size_t kObsDim = 4;

/// State [x, y, a, r, vx, vy, va]: centre, area, aspect ratio and rates.
struct MotionState {
  std::array<double, kStateDim> s{};
  Matrix E = Matrix(kStateDim, kStateDim);
};

struct KalmanParams {
  Matrix F;  // 7 x 7 constant-velocity transition
  Matrix H;  // 4 x 7 observation
  Matrix Q;  // process noise
  Matrix R;  // observation noise
  Matrix G;  // process-noise injection
  std::array<double, kStateDim> w{};

  static Matrix transition();
  static Matrix observation();
  static KalmanParams from_config(const TrackerConfig& cfg);
};

/// s <- F s + G w;  E <- F E F^T + Q.
MotionState kalman_predict(const MotionState& state, const KalmanParams& p);

/// K = E H^T (H E H^T + R)^-1;  s <- s + K (z - H s);  E <- (I - K H) E,
/// symmetrized. Throws Error(Singular) if the innovation covariance is.
MotionState kalman_update(const MotionState& state, std::span<const double> z,
                          const KalmanParams& p);

/// (cx, cy, w*h, w/h)
std::array<double, kObsDim> box_to_obs(const BBox& box);
BBox obs_to_box(std::span<const double> z);

/// Recent (frame, dc) pairs, oldest first.
class DcHistory {
 public:
  explicit DcHistory(std::size_t capacity) : capacity_(capacity) {}

  void push(int frame, double dc);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Mean DC over the latest `window` entries, skipping the `skip` newest.
  std::optional<double> window_mean(std::size_t window, std::size_t skip = 0) const;
  /// Mean over the latest `window` entries is below the mean over the
  /// `window` entries before them. False until 2 * window entries exist.
  bool falling(std::size_t window) const;

 private:
  std::size_t capacity_;
  std::deque<std::pair<int, double>> entries_;
};

enum class BoxSource { Model, Kalman };
std::string_view to_string(BoxSource s);

enum class DamBranch {
  Accept,          // model box taken, Kalman updated
  LowConfidence,   // dc < tau, Kalman prediction
  ConfidentError,  // offset > psi with falling dc, Kalman prediction
  Disabled,        // module switched off, model box taken
};
std::string_view to_string(DamBranch b);

struct DamOutput {
  BBox box;
  BoxSource source = BoxSource::Model;
  DamBranch branch = DamBranch::Accept;
  double dc = 0.0;
  double offset = 0.0;  // centre distance from the previous output, pixels
};

/// Perceive / respond / rectify over one sequence.
class DistractorAwareModule {
 public:
  explicit DistractorAwareModule(const TrackerConfig& cfg);

  void init(const BBox& first_box);
  bool initialized() const { return initialized_; }

  DamOutput step(const BBox& raw_box, std::span<const double> cm);

  const MotionState& state() const { return state_; }
  const DcHistory& history() const { return history_; }
  const BBox& last_box() const { return last_box_; }

 private:
  TrackerConfig cfg_;
  KalmanParams params_;
  MotionState state_;
  DcHistory history_;
  BBox last_box_;
  int frame_ = 0;
  bool initialized_ = false;
};

}  // namespace hcot
