#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hcot/matrix.hpp"

namespace hcot {

/// N-d array of doubles, row-major over `shape`.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t dim(std::size_t axis) const { return shape_[axis]; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Same data, new extents; the products must agree.
  Tensor reshaped(std::vector<std::size_t> shape) const;

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// weights: (out, in, R, Kh, Kw); R runs along the band/depth axis.
struct Conv3dKernel {
  Tensor weights;
  std::vector<double> bias;

  std::size_t out_channels() const { return weights.dim(0); }
  std::size_t in_channels() const { return weights.dim(1); }
};

/// weights: (out, in, Kh, Kw).
struct Conv2dKernel {
  Tensor weights;
  std::vector<double> bias;

  std::size_t out_channels() const { return weights.dim(0); }
  std::size_t in_channels() const { return weights.dim(1); }
};

struct Stride3 {
  std::size_t depth = 1, height = 1, width = 1;
};
struct Pad3 {
  std::size_t depth = 0, height = 0, width = 0;
};
struct Stride2 {
  std::size_t height = 1, width = 1;
};
struct Pad2 {
  std::size_t height = 0, width = 0;
};

/// input (C_in, D, H, W) -> (C_out, D', H', W'). Sum plus bias; no activation.
Tensor conv3d(const Tensor& input, const Conv3dKernel& k, Stride3 stride = {}, Pad3 padding = {});
/// input (C_in, H, W) -> (C_out, H', W'). Sum plus bias; no activation.
Tensor conv2d(const Tensor& input, const Conv2dKernel& k, Stride2 stride = {}, Pad2 padding = {});

void relu_inplace(std::span<double> v);
void sigmoid_inplace(std::span<double> v);

/// Max-subtracted softmax. Throws on empty input.
std::vector<double> softmax(std::span<const double> v);

/// W x + b with W of shape (out, in).
std::vector<double> linear(std::span<const double> x, const Matrix& W, std::span<const double> b);

/// Affine map applied to each row of `tokens` (N x in) -> N x out.
Matrix linear_rows(const Matrix& tokens, const Matrix& W, std::span<const double> b);

/// Normalizes each row to zero mean / unit variance, then scales and shifts.
Matrix layer_norm(const Matrix& tokens, std::span<const double> gamma, std::span<const double> beta,
                  double eps = 1e-5);

struct MultiHeadAttention {
  std::size_t heads = 1;
  Matrix wq, wk, wv, wo;  // (dim, dim) each
  std::vector<double> bq, bk, bv, bo;

  std::size_t dim() const { return wq.rows(); }

  /// tokens (N, dim) -> (N, dim). When `weights_out` is non-null it receives
  /// one N x N attention matrix per head.
  Matrix forward(const Matrix& tokens, std::vector<Matrix>* weights_out = nullptr) const;
};

/// Deterministic normal(0, std) fill from a seeded engine.
std::vector<double> seeded_normal(std::size_t n, double std, std::uint64_t seed);

/// Sum of all values weighted by position; changes if any parameter changes.
double checksum(std::span<const double> v);

}  // namespace hcot
