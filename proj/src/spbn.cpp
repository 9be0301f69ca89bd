#include "hcot/spbn.hpp"

#include <algorithm>
#include <cmath>

#include "hcot/error.hpp"

namespace hcot {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, double std, std::uint64_t seed) {
  return Matrix(rows, cols, seeded_normal(rows * cols, std, seed));
}

Conv2dKernel random_conv(std::size_t out, std::size_t in, std::size_t k, double std,
                         std::uint64_t seed) {
  return {Tensor({out, in, k, k}, seeded_normal(out * in * k * k, std, seed)),
          std::vector<double>(out, 0.0)};
}

double accumulate_checksum(double acc, std::span<const double> v) { return acc + checksum(v); }

}  // namespace

Matrix spatial_attention(const Matrix& m) {
  const auto weights = softmax(m.data());
  Matrix out = m;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= weights[i];
  return out;
}

TokenSeq CrossModalAdapter::forward(const TokenSeq& features, const TokenSeq& prev_prompt) const {
  require(features.rows() == prev_prompt.rows(), ErrorKind::ShapeMismatch,
          "adapter inputs have different token counts");
  const Matrix a = spatial_attention(linear_rows(features, proj1, b1));
  const Matrix b = linear_rows(prev_prompt, proj2, b2);
  return linear_rows(hstack(a, b), proj3, b3);
}

TokenSeq EncoderLayer::forward(const TokenSeq& x) const {
  TokenSeq h = x + attention.forward(layer_norm(x, ln1_gamma, ln1_beta));
  Matrix hidden = linear_rows(layer_norm(h, ln2_gamma, ln2_beta), ffn_in, ffn_in_bias);
  for (double& v : hidden.data()) v = 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0)));  // GELU
  return h + linear_rows(hidden, ffn_out, ffn_out_bias);
}

ToyBackbone::ToyBackbone(const BackboneConfig& cfg) : cfg_(cfg) {
  require(cfg.token_dim >= 1 && cfg.layers >= 1 && cfg.adapter_dim >= 1,
          ErrorKind::InvalidArgument, "backbone extents must be positive");
  require(cfg.heads >= 1 && cfg.token_dim % cfg.heads == 0, ErrorKind::InvalidArgument,
          "token dim must be divisible by the head count");
  const auto d = static_cast<std::size_t>(cfg.token_dim);
  const auto low = static_cast<std::size_t>(cfg.adapter_dim);
  std::uint64_t seed = cfg.seed * 1000 + 17;

  for (int l = 0; l <= cfg.layers; ++l) {
    CrossModalAdapter ca;
    ca.proj1 = random_matrix(low, d, cfg.std, seed++);
    ca.proj2 = random_matrix(low, d, cfg.std, seed++);
    ca.proj3 = random_matrix(d, 2 * low, cfg.std, seed++);
    ca.b1.assign(low, 0.0);
    ca.b2.assign(low, 0.0);
    ca.b3.assign(d, 0.0);
    adapters_.push_back(std::move(ca));
  }
  for (int l = 0; l < cfg.layers; ++l) {
    EncoderLayer e;
    e.ln1_gamma.assign(d, 1.0);
    e.ln1_beta.assign(d, 0.0);
    e.ln2_gamma.assign(d, 1.0);
    e.ln2_beta.assign(d, 0.0);
    e.attention.heads = static_cast<std::size_t>(cfg.heads);
    e.attention.wq = random_matrix(d, d, cfg.std, seed++);
    e.attention.wk = random_matrix(d, d, cfg.std, seed++);
    e.attention.wv = random_matrix(d, d, cfg.std, seed++);
    e.attention.wo = random_matrix(d, d, cfg.std, seed++);
    e.attention.bq.assign(d, 0.0);
    e.attention.bk.assign(d, 0.0);
    e.attention.bv.assign(d, 0.0);
    e.attention.bo.assign(d, 0.0);
    e.ffn_in = random_matrix(2 * d, d, cfg.std, seed++);
    e.ffn_out = random_matrix(d, 2 * d, cfg.std, seed++);
    e.ffn_in_bias.assign(2 * d, 0.0);
    e.ffn_out_bias.assign(d, 0.0);
    layers_.push_back(std::move(e));
  }
}

TokenSeq ToyBackbone::ca_forward(int l, const TokenSeq& features, const TokenSeq& prev_prompt,
                                 std::size_t n_template) const {
  require(l >= 0 && l <= layers(), ErrorKind::OutOfRange,
          "adapter index " + std::to_string(l) + " outside 0.." + std::to_string(layers()));
  require(features.rows() == prev_prompt.rows() && features.cols() == prev_prompt.cols(),
          ErrorKind::ShapeMismatch, "adapter inputs differ in geometry");
  require(features.cols() == static_cast<std::size_t>(cfg_.token_dim), ErrorKind::ShapeMismatch,
          "adapter input width differs from the backbone token dim");
  require(n_template <= features.rows(), ErrorKind::ShapeMismatch,
          "template token count exceeds the sequence length");

  const CrossModalAdapter& ca = adapters_[static_cast<std::size_t>(l)];
  const std::size_t n_search = features.rows() - n_template;
  if (n_template == 0) return ca.forward(features, prev_prompt);
  if (n_search == 0) return ca.forward(features, prev_prompt);
  TokenSeq pz = ca.forward(features.slice_rows(0, n_template), prev_prompt.slice_rows(0, n_template));
  TokenSeq px = ca.forward(features.slice_rows(n_template, n_search),
                           prev_prompt.slice_rows(n_template, n_search));
  return vstack(pz, px);
}

TokenSeq ToyBackbone::forward(const TokenSeq& z_rgb, const TokenSeq& z_hs, const TokenSeq& x_rgb,
                              const TokenSeq& x_hs) const {
  require(z_rgb.rows() == z_hs.rows() && x_rgb.rows() == x_hs.rows(), ErrorKind::ShapeMismatch,
          "RGB and spectral token counts differ");
  const std::size_t nz = z_rgb.rows();
  TokenSeq te = vstack(z_rgb, x_rgb);
  TokenSeq prompt = ca_forward(0, te, vstack(z_hs, x_hs), nz);
  for (int l = 1; l <= layers(); ++l) {
    prompt = ca_forward(l, te, prompt, nz);
    te = layers_[static_cast<std::size_t>(l - 1)].forward(prompt);
  }
  return te;
}

double ToyBackbone::checksum() const {
  double acc = 0.0;
  for (const auto& ca : adapters_) {
    acc = accumulate_checksum(acc, ca.proj1.data());
    acc = accumulate_checksum(acc, ca.proj2.data());
    acc = accumulate_checksum(acc, ca.proj3.data());
    acc = accumulate_checksum(acc, ca.b1);
    acc = accumulate_checksum(acc, ca.b2);
    acc = accumulate_checksum(acc, ca.b3);
  }
  for (const auto& e : layers_) {
    acc = accumulate_checksum(acc, e.attention.wq.data());
    acc = accumulate_checksum(acc, e.attention.wk.data());
    acc = accumulate_checksum(acc, e.attention.wv.data());
    acc = accumulate_checksum(acc, e.attention.wo.data());
    acc = accumulate_checksum(acc, e.ffn_in.data());
    acc = accumulate_checksum(acc, e.ffn_out.data());
    acc = accumulate_checksum(acc, e.ln1_gamma);
    acc = accumulate_checksum(acc, e.ln2_gamma);
  }
  return acc;
}

HeadNetwork::HeadNetwork(int token_dim, int width, double std, std::uint64_t seed) {
  require(token_dim >= 1 && width >= 1, ErrorKind::InvalidArgument, "head extents must be positive");
  const auto d = static_cast<std::size_t>(token_dim);
  const auto w = static_cast<std::size_t>(width);
  std::uint64_t s = seed * 1000 + 31;
  auto branch = [&](std::size_t out) {
    Branch b;
    b.c1 = random_conv(w, d, 3, std, s++);
    b.c2 = random_conv(w, w, 3, std, s++);
    b.c3 = random_conv(out, w, 3, std, s++);
    return b;
  };
  cls_ = branch(1);
  offset_ = branch(2);
  size_ = branch(2);
}

std::vector<double> HeadNetwork::run(const Branch& b, const Tensor& grid) const {
  Tensor h = conv2d(grid, b.c1, {}, {1, 1});
  relu_inplace(h.data());
  h = conv2d(h, b.c2, {}, {1, 1});
  relu_inplace(h.data());
  h = conv2d(h, b.c3, {}, {1, 1});
  sigmoid_inplace(h.data());
  return h.data();
}

ResponseMaps HeadNetwork::forward(const TokenSeq& search_tokens, int rows, int cols) const {
  require(search_tokens.rows() == static_cast<std::size_t>(rows) * cols, ErrorKind::ShapeMismatch,
          "search token count does not match the map grid");
  const std::size_t d = search_tokens.cols();
  const std::size_t n = search_tokens.rows();
  Tensor grid({d, static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)});
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t c = 0; c < d; ++c) grid[c * n + t] = search_tokens(t, c);

  const auto cls = run(cls_, grid);
  const auto off = run(offset_, grid);
  const auto sz = run(size_, grid);
  ResponseMaps maps(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const std::size_t t = static_cast<std::size_t>(i) * cols + j;
      maps.cm(i, j) = cls[t];
      for (int ch = 0; ch < 2; ++ch) {
        maps.offset(ch, i, j) = off[ch * n + t];
        maps.size(ch, i, j) = sz[ch * n + t];
      }
    }
  }
  return maps;
}

double HeadNetwork::checksum() const {
  double acc = 0.0;
  for (const Branch* b : {&cls_, &offset_, &size_}) {
    acc = accumulate_checksum(acc, b->c1.weights.data());
    acc = accumulate_checksum(acc, b->c2.weights.data());
    acc = accumulate_checksum(acc, b->c3.weights.data());
  }
  return acc;
}

BBox SearchRegion::to_frame(const BBox& b) const {
  const double s = scale();
  return {x + b.x / s, y + b.y / s, b.w / s, b.h / s};
}

BBox SearchRegion::to_patch(const BBox& b) const {
  const double s = scale();
  return {(b.x - x) * s, (b.y - y) * s, b.w * s, b.h * s};
}

BBox decode_box(const ResponseMaps& maps, int P) {
  require(maps.rows() >= 1 && maps.cols() >= 1, ErrorKind::InvalidArgument,
          "cannot decode an empty response map");
  int bi = 0, bj = 0;
  double best = maps.cm(0, 0);
  for (int i = 0; i < maps.rows(); ++i) {
    for (int j = 0; j < maps.cols(); ++j) {
      if (maps.cm(i, j) > best) {
        best = maps.cm(i, j);
        bi = i;
        bj = j;
      }
    }
  }
  const double cx = (bj + maps.offset(0, bi, bj)) * P;
  const double cy = (bi + maps.offset(1, bi, bj)) * P;
  const double w = maps.size(0, bi, bj) * maps.cols() * P;
  const double h = maps.size(1, bi, bj) * maps.rows() * P;
  return BBox::from_center(cx, cy, w, h);
}

BBox decode_box(const ResponseMaps& maps, int P, const SearchRegion& region) {
  return region.to_frame(decode_box(maps, P));
}

ResponseMaps encode_box(const BBox& box, int P, int rows, int cols) {
  require(box.valid(), ErrorKind::InvalidArgument, "cannot encode a zero-area box");
  ResponseMaps maps(rows, cols);
  const double gx = box.center_x() / P;
  const double gy = box.center_y() / P;
  const int j = std::clamp(static_cast<int>(std::floor(gx)), 0, cols - 1);
  const int i = std::clamp(static_cast<int>(std::floor(gy)), 0, rows - 1);
  maps.cm(i, j) = 1.0;
  maps.offset(0, i, j) = gx - j;
  maps.offset(1, i, j) = gy - i;
  maps.size(0, i, j) = box.w / (static_cast<double>(cols) * P);
  maps.size(1, i, j) = box.h / (static_cast<double>(rows) * P);
  return maps;
}

double giou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  const double cw = std::max(a.x + a.w, b.x + b.w) - std::min(a.x, b.x);
  const double ch = std::max(a.y + a.h, b.y + b.h) - std::min(a.y, b.y);
  const double hull = cw * ch;
  const double iou = uni > 0.0 ? inter / uni : 0.0;
  return hull > 0.0 ? iou - (hull - uni) / hull : iou;
}

LossTerms loss_total(const ResponseMaps& pred, const BBox& gt, int P, double lambda1,
                     double lambda2) {
  require(gt.valid(), ErrorKind::InvalidArgument, "ground-truth box is degenerate");
  const double W = static_cast<double>(pred.cols()) * P;
  const double H = static_cast<double>(pred.rows()) * P;
  require(gt.center_x() >= 0.0 && gt.center_x() <= W && gt.center_y() >= 0.0 && gt.center_y() <= H,
          ErrorKind::Geometry, "ground-truth centre lies outside the search window");

  const int gj = std::clamp(static_cast<int>(std::floor(gt.center_x() / P)), 0, pred.cols() - 1);
  const int gi = std::clamp(static_cast<int>(std::floor(gt.center_y() / P)), 0, pred.rows() - 1);

  // CornerNet-style focal loss, alpha = 2, beta = 4.
  constexpr double kEps = 1e-6;
  double cls = 0.0;
  for (int i = 0; i < pred.rows(); ++i) {
    for (int j = 0; j < pred.cols(); ++j) {
      const double p = std::clamp(pred.cm(i, j), kEps, 1.0 - kEps);
      if (i == gi && j == gj) {
        cls -= (1.0 - p) * (1.0 - p) * std::log(p);
      } else {
        const double d2 = (i - gi) * (i - gi) + (j - gj) * (j - gj);
        const double y = std::exp(-0.5 * d2);
        cls -= std::pow(1.0 - y, 4.0) * p * p * std::log(1.0 - p);
      }
    }
  }

  const BBox box = decode_box(pred, P);
  LossTerms t;
  t.cls = cls;
  t.iou = box == gt ? 0.0 : 1.0 - giou(box, gt);
  t.l1 = std::abs(box.center_x() - gt.center_x()) / W + std::abs(box.center_y() - gt.center_y()) / H +
         std::abs(box.w - gt.w) / W + std::abs(box.h - gt.h) / H;
  t.total = t.cls + lambda1 * t.iou + lambda2 * t.l1;
  return t;
}

std::unique_ptr<ResponseGenerator> make_generator(const TrackerConfig& cfg, int bands,
                                                  const BandTriplet& false_color_bands) {
  switch (cfg.response_generator) {
    case GeneratorKind::SpectralCorrelation:
      return std::make_unique<SpectralCorrelationGenerator>(cfg.downsample,
                                                            cfg.correlation_sharpness);
    case GeneratorKind::SpdanToy:
      return std::make_unique<SpdanToyGenerator>(cfg, bands, false_color_bands);
  }
  fail(ErrorKind::InvalidArgument, "unknown response generator");
}

SpdanToyGenerator::SpdanToyGenerator(const TrackerConfig& cfg, int bands,
                                     const BandTriplet& false_color_bands)
    : fc_(false_color_bands),
      sen_(make_sen_params({bands, cfg.embed_depth, cfg.spectral_kernel, cfg.spatial_kernel,
                            cfg.token_dim, cfg.downsample, cfg.param_std, cfg.param_seed})),
      backbone_({cfg.token_dim, cfg.backbone_layers, cfg.attention_heads, cfg.adapter_dim,
                 cfg.param_std, cfg.param_seed + 10}),
      head_(cfg.token_dim, cfg.head_width, cfg.param_std, cfg.param_seed + 20) {}

void SpdanToyGenerator::set_template(const HsiCube& template_patch, double, double) {
  z_hs_ = embed_spectral(template_patch, sen_);
  z_rgb_ = embed_rgb(false_color(template_patch, fc_), sen_);
}

ResponseMaps SpdanToyGenerator::respond(const HsiCube& search_patch) const {
  require(z_hs_.rows() > 0, ErrorKind::State, "template not set");
  const TokenSeq x_hs = embed_spectral(search_patch, sen_);
  const TokenSeq x_rgb = embed_rgb(false_color(search_patch, fc_), sen_);
  const TokenSeq te = backbone_.forward(z_rgb_, z_hs_, x_rgb, x_hs);
  const int P = sen_.config.patch;
  return head_.forward(te.slice_rows(z_hs_.rows(), x_hs.rows()), search_patch.height() / P,
                       search_patch.width() / P);
}

double SpdanToyGenerator::checksum() const {
  double acc = backbone_.checksum() + head_.checksum();
  acc += hcot::checksum(sen_.spectral.weights.data());
  acc += hcot::checksum(sen_.spatial.weights.data());
  acc += hcot::checksum(sen_.rgb.weights.data());
  return acc;
}

}  // namespace hcot
