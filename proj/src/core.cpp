#include "hcot/core.hpp"

#include <algorithm>
#include <cmath>

#include "hcot/error.hpp"

namespace hcot {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::ShapeMismatch: return "shape_mismatch";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::TruncatedFile: return "truncated_file";
    case ErrorKind::MalformedJson: return "malformed_json";
    case ErrorKind::Io: return "io";
    case ErrorKind::State: return "state";
  }
  return "unknown";
}

bool intersects_frame(const BBox& box, int width, int height) {
  const double ix = std::min(box.x + box.w, static_cast<double>(width)) - std::max(box.x, 0.0);
  const double iy = std::min(box.y + box.h, static_cast<double>(height)) - std::max(box.y, 0.0);
  return ix > 0.0 && iy > 0.0;
}

HsiCube::HsiCube(int bands, int height, int width)
    : bands_(bands), height_(height), width_(width) {
  require(bands >= 1 && height >= 1 && width >= 1, ErrorKind::InvalidArgument,
          "cube extents must be positive");
  data_.assign(static_cast<std::size_t>(bands) * height * width, 0.0f);
}

HsiCube::HsiCube(int bands, int height, int width, std::vector<float> data)
    : bands_(bands), height_(height), width_(width), data_(std::move(data)) {
  require(bands >= 1 && height >= 1 && width >= 1, ErrorKind::InvalidArgument,
          "cube extents must be positive");
  require(data_.size() == static_cast<std::size_t>(bands) * height * width,
          ErrorKind::ShapeMismatch, "cube data length does not equal C*H*W");
  validate();
}

void HsiCube::validate() const {
  for (float v : data_) {
    if (!std::isfinite(v) || v < 0.0f) {
      fail(ErrorKind::InvalidArgument, "cube values must be finite and non-negative");
    }
  }
}

HsiCube false_color(const HsiCube& cube, const BandTriplet& bands) {
  return select_bands(cube, bands);
}

HsiCube select_bands(const HsiCube& cube, std::span<const int> bands) {
  require(!bands.empty(), ErrorKind::InvalidArgument, "no bands selected");
  for (int b : bands) {
    if (b < 0 || b >= cube.bands()) {
      fail(ErrorKind::OutOfRange, "band index " + std::to_string(b) + " out of range for " +
                                      std::to_string(cube.bands()) + " bands");
    }
  }
  HsiCube out(static_cast<int>(bands.size()), cube.height(), cube.width());
  for (std::size_t k = 0; k < bands.size(); ++k) {
    auto src = cube.band(bands[k]);
    std::copy(src.begin(), src.end(), out.band(static_cast<int>(k)).begin());
  }
  return out;
}

HsiCube crop_patch(const HsiCube& cube, const BBox& box, int out_w, int out_h) {
  require(box.valid(), ErrorKind::InvalidArgument, "crop box has zero area");
  require(out_w >= 1 && out_h >= 1, ErrorKind::InvalidArgument, "crop size must be positive");
  require(intersects_frame(box, cube.width(), cube.height()), ErrorKind::Geometry,
          "crop box lies outside the frame");

  const int W = cube.width();
  const int H = cube.height();
  const double sx = box.w / out_w;
  const double sy = box.h / out_h;

  // Per-axis taps shared by all bands. A sample whose centre falls outside the
  // frame area reads zero; inside it, edge pixels are replicated.
  struct Tap {
    int i0, i1;
    double w0, w1;
  };
  auto taps = [](double pos, int extent) {
    if (pos < -0.5 || pos > extent - 0.5) return Tap{0, 0, 0.0, 0.0};
    const double f = std::floor(pos);
    const double t = pos - f;
    const int i0 = static_cast<int>(f);
    return Tap{std::clamp(i0, 0, extent - 1), std::clamp(i0 + 1, 0, extent - 1), 1.0 - t, t};
  };
  std::vector<Tap> xt(out_w), yt(out_h);
  for (int u = 0; u < out_w; ++u) xt[u] = taps(box.x + (u + 0.5) * sx - 0.5, W);
  for (int v = 0; v < out_h; ++v) yt[v] = taps(box.y + (v + 0.5) * sy - 0.5, H);

  HsiCube out(cube.bands(), out_h, out_w);
  for (int b = 0; b < cube.bands(); ++b) {
    auto src = cube.band(b);
    auto dst = out.band(b);
    for (int v = 0; v < out_h; ++v) {
      const Tap& ty = yt[v];
      const float* r0 = src.data() + static_cast<std::size_t>(ty.i0) * W;
      const float* r1 = src.data() + static_cast<std::size_t>(ty.i1) * W;
      for (int u = 0; u < out_w; ++u) {
        const Tap& tx = xt[u];
        const double top = tx.w0 * r0[tx.i0] + tx.w1 * r0[tx.i1];
        const double bottom = tx.w0 * r1[tx.i0] + tx.w1 * r1[tx.i1];
        dst[static_cast<std::size_t>(v) * out_w + u] =
            static_cast<float>(ty.w0 * top + ty.w1 * bottom);
      }
    }
  }
  return out;
}

ResponseMaps::ResponseMaps(int rows, int cols) : rows_(rows), cols_(cols) {
  require(rows >= 1 && cols >= 1, ErrorKind::InvalidArgument, "response map must be non-empty");
  cm_.assign(cells(), 0.0);
  offset_.assign(2 * cells(), 0.0);
  size_.assign(2 * cells(), 0.0);
}

void ResponseMaps::validate() const {
  require(rows_ >= 1 && cols_ >= 1, ErrorKind::InvalidArgument, "response map is empty");
  for (double v : cm_) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorKind::InvalidArgument,
            "classification map value outside [0, 1]");
  }
  for (double v : offset_) {
    require(std::isfinite(v), ErrorKind::InvalidArgument, "offset map not finite");
  }
  for (double v : size_) {
    require(std::isfinite(v), ErrorKind::InvalidArgument, "size map not finite");
  }
}

std::string_view to_string(Attribute a) {
  switch (a) {
    case Attribute::BC: return "BC";
    case Attribute::FM: return "FM";
    case Attribute::IPR: return "IPR";
    case Attribute::IV: return "IV";
    case Attribute::LR: return "LR";
    case Attribute::OCC: return "OCC";
    case Attribute::OPR: return "OPR";
    case Attribute::SC: return "SC";
    case Attribute::SV: return "SV";
  }
  return "?";
}

std::optional<Attribute> parse_attribute(std::string_view s) {
  for (Attribute a : kAllAttributes) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

bool SequenceRecord::has(Attribute a) const {
  return std::find(attributes.begin(), attributes.end(), a) != attributes.end();
}

void SequenceRecord::validate() const {
  require(!frames.empty(), ErrorKind::InvalidArgument, "sequence '" + name + "' has no frames");
  require(annotations.size() == frames.size(), ErrorKind::ShapeMismatch,
          "sequence '" + name + "': annotation count differs from frame count");
  const HsiCube& f0 = frames.front();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const HsiCube& f = frames[t];
    if (f.bands() != f0.bands() || f.height() != f0.height() || f.width() != f0.width()) {
      fail(ErrorKind::Geometry,
           "sequence '" + name + "': frame " + std::to_string(t + 1) + " geometry differs");
    }
    require(annotations[t].valid(), ErrorKind::InvalidArgument,
            "sequence '" + name + "': annotation " + std::to_string(t + 1) + " has zero area");
  }
  for (int b : false_color_bands) {
    require(b >= 0 && b < f0.bands(), ErrorKind::OutOfRange,
            "sequence '" + name + "': false-color band out of range");
  }
}

}  // namespace hcot
