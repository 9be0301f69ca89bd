#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hcot/config.hpp"
#include "hcot/core.hpp"
#include "hcot/matrix.hpp"
#include "hcot/numerics.hpp"
#include "hcot/sen.hpp"

namespace hcot {

/// m ⊙ softmax(flatten(m)), softmax taken over every entry of the grid.
Matrix spatial_attention(const Matrix& m);

/// Prompt generator between encoder layers: two down-projections, spatial
/// attention on the feature branch, concatenation, then an up-projection.
struct CrossModalAdapter {
  Matrix proj1, proj2, proj3;  // (low, dim), (low, dim), (dim, 2*low)
  std::vector<double> b1, b2, b3;

  /// proj3([SA(proj1(features)) | proj2(prev_prompt)])
  TokenSeq forward(const TokenSeq& features, const TokenSeq& prev_prompt) const;
};

/// Pre-norm Transformer encoder layer: x + MHSA(LN(x)), then x + FFN(LN(x)).
struct EncoderLayer {
  std::vector<double> ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
  MultiHeadAttention attention;
  Matrix ffn_in, ffn_out;
  std::vector<double> ffn_in_bias, ffn_out_bias;

  TokenSeq forward(const TokenSeq& x) const;
};

struct BackboneConfig {
  int token_dim = 768;
  int layers = 2;  // L
  int heads = 4;
  int adapter_dim = 8;
  double std = 0.02;
  std::uint64_t seed = 0;
};

/// Frozen encoder stack with one adapter per layer plus the initial adapter.
class ToyBackbone {
 public:
  explicit ToyBackbone(const BackboneConfig& cfg);

  int layers() const { return static_cast<int>(layers_.size()); }
  int token_dim() const { return cfg_.token_dim; }

  /// Applies adapter `l` (0..L) to template and search tokens separately and
  /// concatenates the results, template rows first.
  TokenSeq ca_forward(int l, const TokenSeq& features, const TokenSeq& prev_prompt,
                      std::size_t n_template) const;

  /// p0 = CA0(rgb, hs); for l = 1..L: p_l = CA_l(te_{l-1}, p_{l-1}),
  /// te_l = E_l(p_l), with te_0 the RGB tokens. Returns te_L, template rows
  /// first.
  TokenSeq forward(const TokenSeq& z_rgb, const TokenSeq& z_hs, const TokenSeq& x_rgb,
                   const TokenSeq& x_hs) const;

  double checksum() const;

 private:
  BackboneConfig cfg_;
  std::vector<CrossModalAdapter> adapters_;
  std::vector<EncoderLayer> layers_;
};

/// Three conv branches (classification, offset, size), each
/// conv3x3+ReLU, conv3x3+ReLU, conv3x3, sigmoid.
class HeadNetwork {
 public:
  HeadNetwork(int token_dim, int width, double std, std::uint64_t seed);

  ResponseMaps forward(const TokenSeq& search_tokens, int rows, int cols) const;
  double checksum() const;

 private:
  struct Branch {
    Conv2dKernel c1, c2, c3;
  };
  std::vector<double> run(const Branch& b, const Tensor& grid) const;

  Branch cls_, offset_, size_;
};

/// Square region of the frame resampled onto a `size` x `size` search patch.
struct SearchRegion {
  double x = 0.0;  // top-left, frame pixels
  double y = 0.0;
  double side = 0.0;  // frame pixels
  int size = 0;       // patch pixels

  double scale() const { return size / side; }
  BBox to_frame(const BBox& patch_box) const;
  BBox to_patch(const BBox& frame_box) const;
};

/// Peak of the classification map (ties: smallest row-major index) decoded
/// with its offset and size into a box in search-patch pixels.
BBox decode_box(const ResponseMaps& maps, int P);
/// As above, mapped into frame coordinates through `region`.
BBox decode_box(const ResponseMaps& maps, int P, const SearchRegion& region);

/// Inverse of decode_box: one-hot map at the box centre's cell with the
/// matching offset and size. `box` is in search-patch pixels.
ResponseMaps encode_box(const BBox& box, int P, int rows, int cols);

double giou(const BBox& a, const BBox& b);

struct LossTerms {
  double cls = 0.0;
  double iou = 0.0;  // 1 - GIoU
  double l1 = 0.0;   // normalized centre and size
  double total = 0.0;
};

/// Weighted focal loss against a unit-sigma Gaussian target at the gt cell,
/// plus lambda1 * GIoU loss and lambda2 * L1 on the decoded box.
/// `gt` is in search-patch pixels.
LossTerms loss_total(const ResponseMaps& pred, const BBox& gt, int P, double lambda1,
                     double lambda2);

/// Band profile pooled over the whole patch, centred across bands.
std::vector<double> spectral_template_feature(const HsiCube& template_patch);

/// One feature per P x P cell: the band profile averaged over a
/// window_w x window_h window centred on the cell centre, centred across
/// bands. Rows are cells in row-major order.
Matrix spectral_token_grid(const HsiCube& search_patch, int P, double window_w, double window_h);

/// CM = exp(sharpness * (cos - 1)) between the template feature and each
/// token; offsets by quadratic sub-cell interpolation; size constant.
/// Throws when the template feature or every token has zero norm.
ResponseMaps correlate_spectral(std::span<const double> template_feature,
                                const Matrix& search_tokens, int rows, int cols,
                                double size_w, double size_h, double sharpness);

class ResponseGenerator {
 public:
  virtual ~ResponseGenerator() = default;
  virtual GeneratorKind kind() const = 0;
  /// `template_patch` is the template-size crop of the first-frame box;
  /// the target size is given in search-patch pixels.
  virtual void set_template(const HsiCube& template_patch, double target_w, double target_h) = 0;
  virtual ResponseMaps respond(const HsiCube& search_patch) const = 0;
};

class SpectralCorrelationGenerator final : public ResponseGenerator {
 public:
  SpectralCorrelationGenerator(int downsample, double sharpness)
      : P_(downsample), sharpness_(sharpness) {}

  GeneratorKind kind() const override { return GeneratorKind::SpectralCorrelation; }
  void set_template(const HsiCube& template_patch, double target_w, double target_h) override;
  ResponseMaps respond(const HsiCube& search_patch) const override;

 private:
  int P_;
  double sharpness_;
  std::vector<double> feature_;
  double target_w_ = 0.0;
  double target_h_ = 0.0;
};

class SpdanToyGenerator final : public ResponseGenerator {
 public:
  SpdanToyGenerator(const TrackerConfig& cfg, int bands, const BandTriplet& false_color_bands);

  GeneratorKind kind() const override { return GeneratorKind::SpdanToy; }
  void set_template(const HsiCube& template_patch, double target_w, double target_h) override;
  ResponseMaps respond(const HsiCube& search_patch) const override;

  double checksum() const;

 private:
  BandTriplet fc_;
  SenParams sen_;
  ToyBackbone backbone_;
  HeadNetwork head_;
  TokenSeq z_rgb_, z_hs_;
};

std::unique_ptr<ResponseGenerator> make_generator(const TrackerConfig& cfg, int bands,
                                                  const BandTriplet& false_color_bands);

}  // namespace hcot
