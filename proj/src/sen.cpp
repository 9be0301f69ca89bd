#include "hcot/sen.hpp"

#include "hcot/error.hpp"

namespace hcot {
namespace {

Tensor to_tensor(const HsiCube& cube, bool with_channel_axis) {
  std::vector<double> data(cube.data().begin(), cube.data().end());
  const auto C = static_cast<std::size_t>(cube.bands());
  const auto H = static_cast<std::size_t>(cube.height());
  const auto W = static_cast<std::size_t>(cube.width());
  if (with_channel_axis) return Tensor({1, C, H, W}, std::move(data));
  return Tensor({C, H, W}, std::move(data));
}

TokenSeq to_tokens(const Tensor& grid) {
  const std::size_t dim = grid.dim(0), rows = grid.dim(1), cols = grid.dim(2);
  TokenSeq tokens(rows * cols, dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t n = 0; n < rows * cols; ++n) tokens(n, c) = grid[c * rows * cols + n];
  return tokens;
}

void check_divisible(const HsiCube& patch, int P) {
  require(patch.height() % P == 0 && patch.width() % P == 0, ErrorKind::InvalidArgument,
          "patch extents " + std::to_string(patch.height()) + "x" + std::to_string(patch.width()) +
              " not divisible by P=" + std::to_string(P));
}

}  // namespace

SenParams make_sen_params(const SenConfig& cfg) {
  require(cfg.bands >= 1 && cfg.depth >= 1 && cfg.token_dim >= 1 && cfg.patch >= 1,
          ErrorKind::InvalidArgument, "SEN extents must be positive");
  require(cfg.spectral_kernel % 2 == 1 && cfg.spatial_kernel % 2 == 1, ErrorKind::InvalidArgument,
          "SEN kernels must have odd extents");
  const auto D = static_cast<std::size_t>(cfg.depth);
  const auto C = static_cast<std::size_t>(cfg.bands);
  const auto R = static_cast<std::size_t>(cfg.spectral_kernel);
  const auto K = static_cast<std::size_t>(cfg.spatial_kernel);
  const auto dim = static_cast<std::size_t>(cfg.token_dim);
  const auto P = static_cast<std::size_t>(cfg.patch);

  SenParams p;
  p.config = cfg;
  p.spectral.weights = Tensor({D, 1, R, K, K}, seeded_normal(D * R * K * K, cfg.std, cfg.seed));
  p.spectral.bias.assign(D, 0.0);
  p.spatial.weights =
      Tensor({dim, C * D, P, P}, seeded_normal(dim * C * D * P * P, cfg.std, cfg.seed + 1));
  p.spatial.bias.assign(dim, 0.0);
  p.rgb.weights = Tensor({dim, 3, P, P}, seeded_normal(dim * 3 * P * P, cfg.std, cfg.seed + 2));
  p.rgb.bias.assign(dim, 0.0);
  return p;
}

TokenSeq embed_spectral(const HsiCube& patch, const SenParams& params) {
  const SenConfig& cfg = params.config;
  require(patch.bands() == cfg.bands, ErrorKind::ShapeMismatch,
          "patch has " + std::to_string(patch.bands()) + " bands, SEN expects " +
              std::to_string(cfg.bands));
  check_divisible(patch, cfg.patch);

  const auto r = static_cast<std::size_t>(cfg.spectral_kernel / 2);
  const auto k = static_cast<std::size_t>(cfg.spatial_kernel / 2);
  Tensor volumes = conv3d(to_tensor(patch, true), params.spectral, {}, {r, k, k});
  relu_inplace(volumes.data());
  // (D, C, H, W) -> (D*C, H, W)
  Tensor folded = volumes.reshaped(
      {volumes.dim(0) * volumes.dim(1), volumes.dim(2), volumes.dim(3)});
  const auto P = static_cast<std::size_t>(cfg.patch);
  return to_tokens(conv2d(folded, params.spatial, {P, P}));
}

TokenSeq embed_rgb(const HsiCube& image, const SenParams& params) {
  require(image.bands() == 3, ErrorKind::ShapeMismatch, "RGB embedding expects 3 channels");
  check_divisible(image, params.config.patch);
  const auto P = static_cast<std::size_t>(params.config.patch);
  return to_tokens(conv2d(to_tensor(image, false), params.rgb, {P, P}));
}

}  // namespace hcot
