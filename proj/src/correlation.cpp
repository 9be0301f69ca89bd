#include <algorithm>
#include <cmath>

#include "hcot/error.hpp"
#include "hcot/spbn.hpp"

namespace hcot {
namespace {

void center(std::span<double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Vertex of the parabola through (-1, l), (0, c), (1, r), in [-0.5, 0.5].
double parabolic_shift(double l, double c, double r) {
  const double denom = l - 2.0 * c + r;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

}  // namespace

std::vector<double> spectral_template_feature(const HsiCube& patch) {
  std::vector<double> f(static_cast<std::size_t>(patch.bands()), 0.0);
  for (int b = 0; b < patch.bands(); ++b) {
    double s = 0.0;
    for (float v : patch.band(b)) s += v;
    f[static_cast<std::size_t>(b)] = s / static_cast<double>(patch.plane_size());
  }
  center(f);
  return f;
}

Matrix spectral_token_grid(const HsiCube& patch, int P, double window_w, double window_h) {
  require(P >= 1 && patch.height() % P == 0 && patch.width() % P == 0, ErrorKind::InvalidArgument,
          "search patch extents not divisible by P");
  require(window_w > 0.0 && window_h > 0.0, ErrorKind::InvalidArgument,
          "pooling window must have positive extent");
  const int H = patch.height(), W = patch.width(), C = patch.bands();
  const int rows = H / P, cols = W / P;

  // Summed-area table per band, (H+1) x (W+1).
  const std::size_t stride = static_cast<std::size_t>(W) + 1;
  std::vector<double> sat(static_cast<std::size_t>(C) * (H + 1) * stride, 0.0);
  for (int b = 0; b < C; ++b) {
    double* s = sat.data() + static_cast<std::size_t>(b) * (H + 1) * stride;
    auto band = patch.band(b);
    for (int y = 0; y < H; ++y) {
      double run = 0.0;
      for (int x = 0; x < W; ++x) {
        run += band[static_cast<std::size_t>(y) * W + x];
        s[(y + 1) * stride + x + 1] = s[y * stride + x + 1] + run;
      }
    }
  }

  const int ww = std::max(1, static_cast<int>(std::lround(window_w)));
  const int wh = std::max(1, static_cast<int>(std::lround(window_h)));
  Matrix tokens(static_cast<std::size_t>(rows) * cols, static_cast<std::size_t>(C));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int x0 = std::clamp(static_cast<int>(std::lround((j + 0.5) * P - 0.5 * ww)), 0, W);
      const int y0 = std::clamp(static_cast<int>(std::lround((i + 0.5) * P - 0.5 * wh)), 0, H);
      const int x1 = std::clamp(static_cast<int>(std::lround((j + 0.5) * P - 0.5 * ww)) + ww, 0, W);
      const int y1 = std::clamp(static_cast<int>(std::lround((i + 0.5) * P - 0.5 * wh)) + wh, 0, H);
      auto row = tokens.row(static_cast<std::size_t>(i) * cols + j);
      const double area = static_cast<double>(x1 - x0) * (y1 - y0);
      if (area <= 0.0) continue;
      for (int b = 0; b < C; ++b) {
        const double* s = sat.data() + static_cast<std::size_t>(b) * (H + 1) * stride;
        const double sum = s[y1 * stride + x1] - s[y0 * stride + x1] - s[y1 * stride + x0] +
                           s[y0 * stride + x0];
        row[b] = sum / area;
      }
      center(row);
    }
  }
  return tokens;
}

ResponseMaps correlate_spectral(std::span<const double> template_feature,
                                const Matrix& search_tokens, int rows, int cols, double size_w,
                                double size_h, double sharpness) {
  require(std::isfinite(sharpness) && sharpness > 0.0, ErrorKind::InvalidArgument,
          "correlation sharpness must be > 0");
  require(search_tokens.rows() == static_cast<std::size_t>(rows) * cols, ErrorKind::ShapeMismatch,
          "token grid does not match the map extent");
  require(search_tokens.cols() == template_feature.size(), ErrorKind::ShapeMismatch,
          "template and search features differ in width");
  const double tn = norm(template_feature);
  require(tn > 0.0, ErrorKind::InvalidArgument, "template feature has zero norm");

  ResponseMaps maps(rows, cols);
  std::size_t zero_tokens = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      auto tok = search_tokens.row(static_cast<std::size_t>(i) * cols + j);
      const double sn = norm(tok);
      double cosine = 0.0;
      if (sn > 0.0) {
        double dot = 0.0;
        for (std::size_t c = 0; c < tok.size(); ++c) dot += tok[c] * template_feature[c];
        cosine = dot / (sn * tn);
      } else {
        ++zero_tokens;
      }
      maps.cm(i, j) = std::min(1.0, std::exp(sharpness * (cosine - 1.0)));
    }
  }
  require(zero_tokens < search_tokens.rows(), ErrorKind::InvalidArgument,
          "every search feature has zero norm");

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double c = maps.cm(i, j);
      const double dx = (j > 0 && j + 1 < cols)
                            ? parabolic_shift(maps.cm(i, j - 1), c, maps.cm(i, j + 1))
                            : 0.0;
      const double dy = (i > 0 && i + 1 < rows)
                            ? parabolic_shift(maps.cm(i - 1, j), c, maps.cm(i + 1, j))
                            : 0.0;
      maps.offset(0, i, j) = 0.5 + dx;
      maps.offset(1, i, j) = 0.5 + dy;
      maps.size(0, i, j) = size_w;
      maps.size(1, i, j) = size_h;
    }
  }
  return maps;
}

void SpectralCorrelationGenerator::set_template(const HsiCube& template_patch, double target_w,
                                                double target_h) {
  require(target_w > 0.0 && target_h > 0.0, ErrorKind::InvalidArgument,
          "target size must be positive");
  feature_ = spectral_template_feature(template_patch);
  require(norm(feature_) > 0.0, ErrorKind::InvalidArgument,
          "template has a flat spectrum; nothing to correlate");
  target_w_ = target_w;
  target_h_ = target_h;
}

ResponseMaps SpectralCorrelationGenerator::respond(const HsiCube& search_patch) const {
  require(!feature_.empty(), ErrorKind::State, "template not set");
  const int rows = search_patch.height() / P_;
  const int cols = search_patch.width() / P_;
  const Matrix tokens = spectral_token_grid(search_patch, P_, target_w_, target_h_);
  return correlate_spectral(feature_, tokens, rows, cols, target_w_ / search_patch.width(),
                            target_h_ / search_patch.height(), sharpness_);
}

}  // namespace hcot
