#pragma once

#include <cstdint>

#include "hcot/core.hpp"
#include "hcot/matrix.hpp"
#include "hcot/numerics.hpp"

namespace hcot {

/// One row per token, `dim` columns.
using TokenSeq = Matrix;

struct SenConfig {
  int bands = 25;          // C
  int depth = 16;          // D, 3-D conv output volumes
  int spectral_kernel = 7; // R
  int spatial_kernel = 3;
  int token_dim = 768;
  int patch = 16;          // P
  double std = 0.02;
  std::uint64_t seed = 0;
};

/// Frozen embedding weights: the spectral 3-D/2-D pair plus the RGB patchify.
struct SenParams {
  SenConfig config;
  Conv3dKernel spectral;  // (D, 1, R, k, k)
  Conv2dKernel spatial;   // (dim, C*D, P, P), stride P
  Conv2dKernel rgb;       // (dim, 3, P, P), stride P
};

SenParams make_sen_params(const SenConfig& cfg);

/// conv3d over the (band, row, col) volume -> ReLU -> fold depth into
/// channels -> stride-P conv2d -> one token per P x P cell, row-major.
TokenSeq embed_spectral(const HsiCube& patch, const SenParams& params);

/// Stride-P patchify of a 3-channel image, same token geometry as
/// embed_spectral.
TokenSeq embed_rgb(const HsiCube& image, const SenParams& params);

}  // namespace hcot
