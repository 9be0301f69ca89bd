#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcot/core.hpp"

namespace hcot {

struct GaussianBump {
  double center = 0.0;  // band index
  double width = 1.0;   // bands
  double amplitude = 0.0;
};

/// Per-band reflectance in [0, 1].
struct SpectralSignature {
  std::vector<double> values;

  int bands() const { return static_cast<int>(values.size()); }
};

/// offset + sum of Gaussians over the band index, clamped to [0, 1].
SpectralSignature make_signature(int bands, double offset, std::span<const GaussianBump> bumps);

enum class Shape { Rectangle, Ellipse };

/// Constant-velocity centre path with an optional velocity change. The centre
/// reflects off the frame walls so the box stays inside.
struct MotionPath {
  double cx = 0.0;  // centre at the first frame
  double cy = 0.0;
  double vx = 0.0;  // px per frame
  double vy = 0.0;
  std::optional<int> turn_frame;  // 0-based frame from which the turn velocity applies
  double turn_vx = 0.0;
  double turn_vy = 0.0;

  bool moving() const { return vx != 0.0 || vy != 0.0 || turn_vx != 0.0 || turn_vy != 0.0; }
};

struct ObjectSpec {
  double w = 16.0;
  double h = 12.0;
  Shape shape = Shape::Rectangle;
  SpectralSignature signature;
  MotionPath path;
};

/// Hard-edged occluder shown over frames [start, start + duration), 0-based.
struct OcclusionEvent {
  int start = 0;
  int duration = 0;
  BBox box;
  SpectralSignature signature;

  bool active(int frame) const { return frame >= start && frame < start + duration; }
};

/// base + grad_x * (col / (W-1) - 1/2) + grad_y * (row / (H-1) - 1/2), per band.
struct BackgroundSpec {
  SpectralSignature base;
  std::vector<double> grad_x;
  std::vector<double> grad_y;
};

struct ScenarioSpec {
  std::string name;
  int frames = 60;
  int width = 128;
  int height = 96;
  int bands = 25;
  ObjectSpec object;
  std::optional<ObjectSpec> decoy;
  std::vector<OcclusionEvent> occlusions;
  BackgroundSpec background;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  BandTriplet false_color_bands = kDefaultFalseColorBands;
  double max_step = 20.0;  // bound on per-frame annotation displacement

  /// Throws Error(InvalidArgument) on an inconsistent spec.
  void validate() const;
};

/// Box of a path-following object at 0-based frame `t`.
BBox object_box(const ObjectSpec& obj, int t, int width, int height);

/// Attribute tags implied by the spec.
std::vector<Attribute> derive_attributes(const ScenarioSpec& spec);

HsiCube generate_frame(const ScenarioSpec& spec, int t);
SequenceRecord generate(const ScenarioSpec& spec);

/// The fixed 12-scenario desk-scale suite.
std::vector<ScenarioSpec> standard_suite(std::uint64_t seed);

/// Decoy that drifts toward the target from above, overtakes its centre line
/// ahead of it and then moves away; used to exercise the confident-error rule.
ScenarioSpec crossing_decoy_scenario(std::uint64_t seed);

struct CamouflageErrors {
  double false_color = 0.0;
  double full_spectrum = 0.0;
  std::size_t samples = 0;
};

/// Leave-one-out 1-NN classification of fully covered, unoccluded object vs
/// decoy pixels over the first `frames_used` frames, on false-color bands and
/// on the full spectrum. Ties go to the lowest sample index.
CamouflageErrors camouflage_errors(const ScenarioSpec& spec, int frames_used = 3,
                                   std::size_t max_per_class = 150);

}  // namespace hcot
