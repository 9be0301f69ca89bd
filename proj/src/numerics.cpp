#include "hcot/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "hcot/error.hpp"

namespace hcot {
namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t out_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad,
                       const char* axis) {
  require(stride >= 1, ErrorKind::InvalidArgument, "stride must be >= 1");
  require(in + 2 * pad >= k, ErrorKind::ShapeMismatch,
          std::string("kernel larger than padded input along ") + axis);
  return (in + 2 * pad - k) / stride + 1;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  require(data_.size() == product(shape_), ErrorKind::ShapeMismatch,
          "tensor data length does not equal shape product");
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  require(product(shape) == data_.size(), ErrorKind::ShapeMismatch, "reshape changes element count");
  return Tensor(std::move(shape), data_);
}

Tensor conv3d(const Tensor& input, const Conv3dKernel& k, Stride3 stride, Pad3 pad) {
  require(input.rank() == 4, ErrorKind::ShapeMismatch, "conv3d input must be (C, D, H, W)");
  require(k.weights.rank() == 5, ErrorKind::ShapeMismatch, "conv3d kernel must be 5-d");
  require(k.in_channels() == input.dim(0), ErrorKind::ShapeMismatch, "conv3d channel mismatch");
  require(k.bias.size() == k.out_channels(), ErrorKind::ShapeMismatch, "conv3d bias length mismatch");

  const std::size_t C = input.dim(0), D = input.dim(1), H = input.dim(2), W = input.dim(3);
  const std::size_t O = k.out_channels();
  const std::size_t R = k.weights.dim(2), KH = k.weights.dim(3), KW = k.weights.dim(4);
  const std::size_t Do = out_extent(D, R, stride.depth, pad.depth, "depth");
  const std::size_t Ho = out_extent(H, KH, stride.height, pad.height, "height");
  const std::size_t Wo = out_extent(W, KW, stride.width, pad.width, "width");

  Tensor out({O, Do, Ho, Wo});
  const auto& in = input.data();
  const auto& wt = k.weights.data();
  for (std::size_t o = 0; o < O; ++o) {
    for (std::size_t d = 0; d < Do; ++d) {
      for (std::size_t y = 0; y < Ho; ++y) {
        double* orow = out.data().data() + ((o * Do + d) * Ho + y) * Wo;
        std::fill(orow, orow + Wo, k.bias[o]);
        for (std::size_t c = 0; c < C; ++c) {
          for (std::size_t r = 0; r < R; ++r) {
            const long id = static_cast<long>(d * stride.depth + r) - static_cast<long>(pad.depth);
            if (id < 0 || id >= static_cast<long>(D)) continue;
            for (std::size_t kh = 0; kh < KH; ++kh) {
              const long iy = static_cast<long>(y * stride.height + kh) - static_cast<long>(pad.height);
              if (iy < 0 || iy >= static_cast<long>(H)) continue;
              const double* irow = in.data() + ((c * D + id) * H + iy) * W;
              const double* wrow = wt.data() + (((o * C + c) * R + r) * KH + kh) * KW;
              for (std::size_t kw = 0; kw < KW; ++kw) {
                const double wv = wrow[kw];
                if (wv == 0.0) continue;
                for (std::size_t x = 0; x < Wo; ++x) {
                  const long ix = static_cast<long>(x * stride.width + kw) - static_cast<long>(pad.width);
                  if (ix < 0 || ix >= static_cast<long>(W)) continue;
                  orow[x] += wv * irow[ix];
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor conv2d(const Tensor& input, const Conv2dKernel& k, Stride2 stride, Pad2 pad) {
  require(input.rank() == 3, ErrorKind::ShapeMismatch, "conv2d input must be (C, H, W)");
  require(k.weights.rank() == 4, ErrorKind::ShapeMismatch, "conv2d kernel must be 4-d");
  require(k.in_channels() == input.dim(0), ErrorKind::ShapeMismatch, "conv2d channel mismatch");
  require(k.bias.size() == k.out_channels(), ErrorKind::ShapeMismatch, "conv2d bias length mismatch");

  // A 2-D convolution is a 3-D one with a unit depth axis.
  Conv3dKernel k3{k.weights.reshaped({k.weights.dim(0), k.weights.dim(1), 1, k.weights.dim(2),
                                      k.weights.dim(3)}),
                  k.bias};
  Tensor in4 = input.reshaped({input.dim(0), 1, input.dim(1), input.dim(2)});
  Tensor out = conv3d(in4, k3, {1, stride.height, stride.width}, {0, pad.height, pad.width});
  return out.reshaped({out.dim(0), out.dim(2), out.dim(3)});
}

void relu_inplace(std::span<double> v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

void sigmoid_inplace(std::span<double> v) {
  for (double& x : v) x = 1.0 / (1.0 + std::exp(-x));
}

std::vector<double> softmax(std::span<const double> v) {
  require(!v.empty(), ErrorKind::InvalidArgument, "softmax of empty vector");
  for (double x : v) require(std::isfinite(x), ErrorKind::InvalidArgument, "softmax input not finite");
  const double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

std::vector<double> linear(std::span<const double> x, const Matrix& W, std::span<const double> b) {
  require(b.size() == W.rows(), ErrorKind::ShapeMismatch, "linear bias length mismatch");
  std::vector<double> y = W * x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i];
  return y;
}

Matrix linear_rows(const Matrix& tokens, const Matrix& W, std::span<const double> b) {
  require(tokens.cols() == W.cols(), ErrorKind::ShapeMismatch, "linear input width mismatch");
  require(b.size() == W.rows(), ErrorKind::ShapeMismatch, "linear bias length mismatch");
  Matrix out = tokens * W.transpose();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
  }
  return out;
}

Matrix layer_norm(const Matrix& tokens, std::span<const double> gamma, std::span<const double> beta,
                  double eps) {
  const std::size_t d = tokens.cols();
  require(gamma.size() == d && beta.size() == d, ErrorKind::ShapeMismatch,
          "layer_norm parameter length mismatch");
  Matrix out(tokens.rows(), d);
  for (std::size_t r = 0; r < tokens.rows(); ++r) {
    auto in = tokens.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    auto o = out.row(r);
    for (std::size_t c = 0; c < d; ++c) o[c] = (in[c] - mean) * inv * gamma[c] + beta[c];
  }
  return out;
}

Matrix MultiHeadAttention::forward(const Matrix& tokens, std::vector<Matrix>* weights_out) const {
  const std::size_t d = dim();
  require(heads >= 1 && d % heads == 0, ErrorKind::InvalidArgument,
          "token dim must be divisible by the head count");
  require(tokens.cols() == d, ErrorKind::ShapeMismatch, "attention input width mismatch");

  const Matrix q = linear_rows(tokens, wq, bq);
  const Matrix k = linear_rows(tokens, wk, bk);
  const Matrix v = linear_rows(tokens, wv, bv);
  const std::size_t n = tokens.rows();
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix concat(n, d);
  if (weights_out) weights_out->clear();
  std::vector<double> scores(n);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dh;
    Matrix attn(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dh; ++c) s += q(i, off + c) * k(j, off + c);
        scores[j] = s * scale;
      }
      const auto p = softmax(scores);
      for (std::size_t j = 0; j < n; ++j) attn(i, j) = p[j];
      for (std::size_t c = 0; c < dh; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += p[j] * v(j, off + c);
        concat(i, off + c) = acc;
      }
    }
    if (weights_out) weights_out->push_back(std::move(attn));
  }
  return linear_rows(concat, wo, bo);
}

std::vector<double> seeded_normal(std::size_t n, double std, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, std);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

double checksum(std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * static_cast<double>((i % 7919) + 1);
  return acc;
}

}  // namespace hcot
