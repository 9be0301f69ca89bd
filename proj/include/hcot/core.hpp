#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hcot {

/// Axis-aligned box in pixels. (x, y) is the top-left corner.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }

  bool operator==(const BBox&) const = default;
};

/// True when the box and the W x H frame share a region of positive area.
bool intersects_frame(const BBox& box, int width, int height);

/// Hyperspectral frame: bands x height x width reflectances, band-major then
/// row-major.
class HsiCube {
 public:
  HsiCube() = default;
  /// Zero-filled cube.
  HsiCube(int bands, int height, int width);
  /// Takes ownership of `data`; throws unless size and values are valid.
  HsiCube(int bands, int height, int width, std::vector<float> data);

  int bands() const { return bands_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const { return data_.empty(); }

  float at(int band, int row, int col) const { return data_[index(band, row, col)]; }
  float& at(int band, int row, int col) { return data_[index(band, row, col)]; }

  std::span<const float> band(int b) const {
    return {data_.data() + static_cast<std::size_t>(b) * plane_size(), plane_size()};
  }
  std::span<float> band(int b) {
    return {data_.data() + static_cast<std::size_t>(b) * plane_size(), plane_size()};
  }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  /// Throws if any value is non-finite or negative.
  void validate() const;

  bool operator==(const HsiCube&) const = default;

 private:
  std::size_t index(int band, int row, int col) const {
    return (static_cast<std::size_t>(band) * height_ + row) * width_ + col;
  }

  int bands_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

using BandTriplet = std::array<int, 3>;

/// 1st, 9th and 15th bands, 0-based.
inline constexpr BandTriplet kDefaultFalseColorBands{0, 8, 14};

/// Three-band projection of `cube`; channel k is band `bands[k]`, unchanged.
HsiCube false_color(const HsiCube& cube, const BandTriplet& bands);

/// Keeps only the listed bands, in order.
HsiCube select_bands(const HsiCube& cube, std::span<const int> bands);

/// Bilinear resample of the `box` region onto an out_w x out_h grid.
/// Samples outside the frame read as zero.
HsiCube crop_patch(const HsiCube& cube, const BBox& box, int out_w, int out_h);
inline HsiCube crop_patch(const HsiCube& cube, const BBox& box, int out_size) {
  return crop_patch(cube, box, out_size, out_size);
}

/// Head-network output over a rows x cols grid of search cells.
class ResponseMaps {
 public:
  ResponseMaps() = default;
  ResponseMaps(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cells() const { return static_cast<std::size_t>(rows_) * cols_; }

  double& cm(int i, int j) { return cm_[cell(i, j)]; }
  double cm(int i, int j) const { return cm_[cell(i, j)]; }
  /// channel 0 is x (column), channel 1 is y (row).
  double& offset(int ch, int i, int j) { return offset_[ch * cells() + cell(i, j)]; }
  double offset(int ch, int i, int j) const { return offset_[ch * cells() + cell(i, j)]; }
  /// channel 0 is width, channel 1 is height, both as fractions of the search extent.
  double& size(int ch, int i, int j) { return size_[ch * cells() + cell(i, j)]; }
  double size(int ch, int i, int j) const { return size_[ch * cells() + cell(i, j)]; }

  std::span<const double> cm_values() const { return cm_; }
  std::span<double> cm_values() { return cm_; }

  /// Throws on non-finite values or cm outside [0, 1].
  void validate() const;

 private:
  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) * cols_ + j; }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> cm_;
  std::vector<double> offset_;
  std::vector<double> size_;
};

enum class Attribute { BC, FM, IPR, IV, LR, OCC, OPR, SC, SV };

inline constexpr std::array<Attribute, 9> kAllAttributes{
    Attribute::BC, Attribute::FM,  Attribute::IPR, Attribute::IV, Attribute::LR,
    Attribute::OCC, Attribute::OPR, Attribute::SC,  Attribute::SV};

std::string_view to_string(Attribute a);
std::optional<Attribute> parse_attribute(std::string_view s);

struct SequenceRecord {
  std::string name;
  std::vector<HsiCube> frames;
  std::vector<BBox> annotations;
  std::vector<Attribute> attributes;
  BandTriplet false_color_bands = kDefaultFalseColorBands;

  bool has(Attribute a) const;
  /// Checks frame/annotation counts, shared geometry and band indices.
  void validate() const;
};

}  // namespace hcot
