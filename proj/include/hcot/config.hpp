#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace hcot {

enum class GeneratorKind { SpectralCorrelation, SpdanToy };

std::string_view to_string(GeneratorKind g);
GeneratorKind parse_generator(std::string_view s);

struct TrackerConfig {
  // Distractor-aware module.
  double dc_threshold = 0.1;       // tau
  double offset_threshold = 20.0;  // psi, pixels
  int rectify_window = 5;          // W, frames per moving-average window
  bool dc_use_mean_denominator = false;
  bool use_dam = true;
  bool use_rectify = true;
  // Kalman noise, state order [x, y, a, r, vx, vy, va] and observation [x, y, a, r].
  std::array<double, 7> process_noise{1.0, 1.0, 1.0, 1e-4, 10.0, 10.0, 1.0};
  std::array<double, 4> observation_noise{1.0, 1.0, 10.0, 1e-2};
  double initial_covariance_scale = 10.0;

  // Loss weights.
  double lambda1 = 2.0;
  double lambda2 = 5.0;

  // Geometry. Search side in the frame is `search_size / template_size` times
  // the template side sqrt(w*h).
  int template_size = 32;
  int search_size = 128;
  int downsample = 16;  // P

  // Embedding and toy backbone.
  int embed_depth = 16;   // D
  int token_dim = 768;    // dim
  int spectral_kernel = 7;
  int spatial_kernel = 3;
  int backbone_layers = 2;
  int attention_heads = 4;
  int adapter_dim = 8;
  int head_width = 64;
  double param_std = 0.02;
  std::uint64_t param_seed = 2024;

  GeneratorKind response_generator = GeneratorKind::SpectralCorrelation;
  double correlation_sharpness = 4.0;  // spectral-correlation CM = exp(k (cos - 1))
  bool rgb_only = false;

  /// Throws Error(InvalidArgument) naming the first violated constraint.
  void validate() const;

  int map_size() const { return search_size / downsample; }
  double search_factor() const { return static_cast<double>(search_size) / template_size; }
};

}  // namespace hcot
