#include "hcot/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hcot/error.hpp"

namespace hcot {
namespace {

constexpr double kBackgroundClutterEps = 0.05;
constexpr double kFalseColorMatchTol = 1e-6;

double rect_coverage_1d(int pixel, double lo, double hi) {
  return std::max(0.0, std::min(pixel + 1.0, hi) - std::max(static_cast<double>(pixel), lo));
}

double coverage(const BBox& box, Shape shape, int row, int col) {
  if (shape == Shape::Rectangle) {
    return rect_coverage_1d(col, box.x, box.x + box.w) * rect_coverage_1d(row, box.y, box.y + box.h);
  }
  const double a = 0.5 * box.w, b = 0.5 * box.h;
  const double dx = (col + 0.5 - box.center_x()) / a;
  const double dy = (row + 0.5 - box.center_y()) / b;
  const double signed_dist = (std::sqrt(dx * dx + dy * dy) - 1.0) * std::min(a, b);
  return std::clamp(0.5 - signed_dist, 0.0, 1.0);
}

// Alpha-blends `sig` into the (bands, H, W) buffer over the box footprint.
void paint(std::vector<double>& buf, int bands, int H, int W, const BBox& box, Shape shape,
           const SpectralSignature& sig) {
  const int r0 = std::max(0, static_cast<int>(std::floor(box.y)));
  const int r1 = std::min(H, static_cast<int>(std::ceil(box.y + box.h)));
  const int c0 = std::max(0, static_cast<int>(std::floor(box.x)));
  const int c1 = std::min(W, static_cast<int>(std::ceil(box.x + box.w)));
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      const double alpha = coverage(box, shape, r, c);
      if (alpha <= 0.0) continue;
      const std::size_t px = static_cast<std::size_t>(r) * W + c;
      for (int b = 0; b < bands; ++b) {
        double& v = buf[b * plane + px];
        v = (1.0 - alpha) * v + alpha * sig.values[static_cast<std::size_t>(b)];
      }
    }
  }
}

std::uint64_t frame_seed(std::uint64_t seed, int t) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(t) * 0xBF58476D1CE4E5B9ULL + 1;
}

double max_displacement(const ObjectSpec& obj, int frames, int W, int H) {
  double m = 0.0;
  BBox prev = object_box(obj, 0, W, H);
  for (int t = 1; t < frames; ++t) {
    const BBox cur = object_box(obj, t, W, H);
    m = std::max(m, std::hypot(cur.center_x() - prev.center_x(), cur.center_y() - prev.center_y()));
    prev = cur;
  }
  return m;
}

void check_signature(const SpectralSignature& s, int bands, const std::string& what) {
  require(s.bands() == bands, ErrorKind::InvalidArgument,
          what + " signature has " + std::to_string(s.bands()) + " bands, expected " +
              std::to_string(bands));
  for (double v : s.values) {
    require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidArgument,
            what + " signature must be finite and non-negative");
  }
}

}  // namespace

SpectralSignature make_signature(int bands, double offset, std::span<const GaussianBump> bumps) {
  require(bands >= 1, ErrorKind::InvalidArgument, "signature needs at least one band");
  SpectralSignature s;
  s.values.resize(static_cast<std::size_t>(bands));
  for (int b = 0; b < bands; ++b) {
    double v = offset;
    for (const auto& g : bumps) {
      const double d = (b - g.center) / g.width;
      v += g.amplitude * std::exp(-0.5 * d * d);
    }
    s.values[static_cast<std::size_t>(b)] = std::clamp(v, 0.0, 1.0);
  }
  return s;
}

BBox object_box(const ObjectSpec& obj, int t, int width, int height) {
  const MotionPath& p = obj.path;
  double cx = p.cx, cy = p.cy, vx = p.vx, vy = p.vy;
  const double lox = 0.5 * obj.w, hix = width - 0.5 * obj.w;
  const double loy = 0.5 * obj.h, hiy = height - 0.5 * obj.h;
  for (int k = 1; k <= t; ++k) {
    if (p.turn_frame && k == *p.turn_frame) {
      vx = p.turn_vx;
      vy = p.turn_vy;
    }
    cx += vx;
    cy += vy;
    if (cx < lox) { cx = 2 * lox - cx; vx = -vx; }
    if (cx > hix) { cx = 2 * hix - cx; vx = -vx; }
    if (cy < loy) { cy = 2 * loy - cy; vy = -vy; }
    if (cy > hiy) { cy = 2 * hiy - cy; vy = -vy; }
  }
  return BBox::from_center(cx, cy, obj.w, obj.h);
}

void ScenarioSpec::validate() const {
  const std::string where = "scenario '" + name + "': ";
  require(frames >= 2, ErrorKind::InvalidArgument, where + "needs at least two frames");
  require(width >= 1 && height >= 1 && bands >= 1, ErrorKind::InvalidArgument,
          where + "frame extents must be positive");
  for (int b : false_color_bands) {
    require(b >= 0 && b < bands, ErrorKind::InvalidArgument, where + "false-color band out of range");
  }
  require(noise_sigma >= 0.0, ErrorKind::InvalidArgument, where + "noise sigma must be >= 0");
  check_signature(background.base, bands, where + "background");
  require(background.grad_x.size() == static_cast<std::size_t>(bands) &&
              background.grad_y.size() == static_cast<std::size_t>(bands),
          ErrorKind::InvalidArgument, where + "background gradients need one value per band");

  auto check_object = [&](const ObjectSpec& o, const std::string& what) {
    require(o.w > 0.0 && o.h > 0.0 && o.w < width && o.h < height, ErrorKind::InvalidArgument,
            where + what + " size must be positive and smaller than the frame");
    check_signature(o.signature, bands, where + what);
    const BBox b0 = object_box(o, 0, width, height);
    require(b0.x >= 0.0 && b0.y >= 0.0 && b0.x + b0.w <= width && b0.y + b0.h <= height,
            ErrorKind::InvalidArgument, where + what + " starts outside the frame");
  };
  check_object(object, "object");
  require(max_displacement(object, frames, width, height) <= max_step, ErrorKind::InvalidArgument,
          where + "object moves further than max_step in one frame");

  if (decoy) {
    check_object(*decoy, "decoy");
    require(decoy->w == object.w && decoy->h == object.h && decoy->shape == object.shape,
            ErrorKind::InvalidArgument, where + "decoy must share the object mask");
    for (int b : false_color_bands) {
      const auto k = static_cast<std::size_t>(b);
      require(std::abs(decoy->signature.values[k] - object.signature.values[k]) <= kFalseColorMatchTol,
              ErrorKind::InvalidArgument,
              where + "decoy must match the object on the false-color bands");
    }
  }
  for (const auto& o : occlusions) {
    require(o.start >= 0 && o.duration >= 1 && o.start + o.duration <= frames,
            ErrorKind::InvalidArgument, where + "occlusion event outside the sequence");
    require(o.box.valid(), ErrorKind::InvalidArgument, where + "occluder box has zero area");
    check_signature(o.signature, bands, where + "occluder");
  }
}

std::vector<Attribute> derive_attributes(const ScenarioSpec& spec) {
  std::vector<Attribute> out;
  bool clutter = true;
  for (int b : spec.false_color_bands) {
    const auto k = static_cast<std::size_t>(b);
    if (std::abs(spec.background.base.values[k] - spec.object.signature.values[k]) >
        kBackgroundClutterEps) {
      clutter = false;
    }
  }
  const bool moving_decoy = spec.decoy && spec.decoy->path.moving();
  if (clutter) out.push_back(Attribute::BC);
  if (max_displacement(spec.object, spec.frames, spec.width, spec.height) > spec.width / 8.0) {
    out.push_back(Attribute::FM);
  }
  if (!spec.occlusions.empty()) out.push_back(Attribute::OCC);
  if (!moving_decoy && spec.object.path.moving()) out.push_back(Attribute::SC);
  if (moving_decoy) out.push_back(Attribute::SV);
  return out;
}

HsiCube generate_frame(const ScenarioSpec& spec, int t) {
  require(t >= 0 && t < spec.frames, ErrorKind::OutOfRange, "frame index out of range");
  const int C = spec.bands, H = spec.height, W = spec.width;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  std::vector<double> buf(static_cast<std::size_t>(C) * plane);

  for (int b = 0; b < C; ++b) {
    const auto k = static_cast<std::size_t>(b);
    const double base = spec.background.base.values[k];
    const double gx = spec.background.grad_x[k];
    const double gy = spec.background.grad_y[k];
    for (int r = 0; r < H; ++r) {
      const double row_term = gy * (H > 1 ? r / double(H - 1) - 0.5 : 0.0);
      for (int c = 0; c < W; ++c) {
        buf[k * plane + static_cast<std::size_t>(r) * W + c] =
            base + row_term + gx * (W > 1 ? c / double(W - 1) - 0.5 : 0.0);
      }
    }
  }
  if (spec.decoy) {
    paint(buf, C, H, W, object_box(*spec.decoy, t, W, H), spec.decoy->shape, spec.decoy->signature);
  }
  paint(buf, C, H, W, object_box(spec.object, t, W, H), spec.object.shape, spec.object.signature);
  for (const auto& occ : spec.occlusions) {
    if (occ.active(t)) paint(buf, C, H, W, occ.box, Shape::Rectangle, occ.signature);
  }

  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(frame_seed(spec.seed, t));
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (double& v : buf) v += noise(rng);
  }
  std::vector<float> data(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) data[i] = static_cast<float>(std::max(0.0, buf[i]));
  return HsiCube(C, H, W, std::move(data));
}

SequenceRecord generate(const ScenarioSpec& spec) {
  spec.validate();
  SequenceRecord seq;
  seq.name = spec.name;
  seq.false_color_bands = spec.false_color_bands;
  seq.attributes = derive_attributes(spec);
  seq.frames.reserve(static_cast<std::size_t>(spec.frames));
  for (int t = 0; t < spec.frames; ++t) {
    seq.frames.push_back(generate_frame(spec, t));
    seq.annotations.push_back(object_box(spec.object, t, spec.width, spec.height));
  }
  return seq;
}

namespace {

constexpr int kBands = 25;

SpectralSignature object_signature() {
  const GaussianBump bumps[] = {{6.0, 3.0, 0.5}, {18.0, 3.5, 0.3}};
  return make_signature(kBands, 0.15, bumps);
}

// Different profile away from the false-color bands, copied onto them.
SpectralSignature decoy_signature(const SpectralSignature& obj, const BandTriplet& fc) {
  const GaussianBump bumps[] = {{21.0, 2.5, 0.55}, {3.0, 1.5, 0.3}, {11.0, 1.5, 0.35}};
  SpectralSignature s = make_signature(kBands, 0.1, bumps);
  for (int b : fc) s.values[static_cast<std::size_t>(b)] = obj.values[static_cast<std::size_t>(b)];
  return s;
}

SpectralSignature occluder_signature() {
  const GaussianBump bumps[] = {{12.0, 6.0, 0.25}};
  return make_signature(kBands, 0.35, bumps);
}

BackgroundSpec default_background() {
  const GaussianBump bumps[] = {{14.0, 7.0, 0.2}};
  BackgroundSpec bg;
  bg.base = make_signature(kBands, 0.3, bumps);
  for (int b = 0; b < kBands; ++b) {
    bg.grad_x.push_back(0.08 * std::sin(b / 4.0));
    bg.grad_y.push_back(0.06 * std::cos(b / 5.0));
  }
  return bg;
}

// Background matching the object on the false-color bands.
BackgroundSpec clutter_background(const SpectralSignature& obj, const BandTriplet& fc) {
  BackgroundSpec bg = default_background();
  for (int b : fc) {
    const auto k = static_cast<std::size_t>(b);
    bg.base.values[k] = obj.values[k];
    bg.grad_x[k] = 0.0;
    bg.grad_y[k] = 0.0;
  }
  return bg;
}

// Occluder covering the object's path over [start, start + duration).
OcclusionEvent occlusion_over_path(const ObjectSpec& obj, int start, int duration, int W, int H) {
  double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
  for (int t = start; t < start + duration; ++t) {
    const BBox b = object_box(obj, t, W, H);
    x0 = std::min(x0, b.x);
    y0 = std::min(y0, b.y);
    x1 = std::max(x1, b.x + b.w);
    y1 = std::max(y1, b.y + b.h);
  }
  constexpr double kMargin = 3.0;
  OcclusionEvent e;
  e.start = start;
  e.duration = duration;
  e.box = {std::floor(x0 - kMargin), std::floor(y0 - kMargin), std::ceil(x1 - x0 + 2 * kMargin),
           std::ceil(y1 - y0 + 2 * kMargin)};
  e.signature = occluder_signature();
  return e;
}

}  // namespace

std::vector<ScenarioSpec> standard_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);

  const SpectralSignature obj_sig = object_signature();
  const BandTriplet fc = kDefaultFalseColorBands;

  struct Row {
    const char* name;
    bool camo, occ, turning, fast, clutter, static_decoy;
    double noise;
  };
  const Row rows[] = {
      {"plain_linear_clean", false, false, false, false, false, false, 0.0},
      {"plain_turn_fast", false, false, true, true, false, false, 0.02},
      {"plain_linear_noisy", false, false, false, false, false, false, 0.05},
      {"occ_linear_clean", false, true, false, false, false, false, 0.0},
      {"occ_turn", false, true, true, false, false, false, 0.02},
      {"occ_linear_noisy", false, true, false, false, false, false, 0.05},
      {"camo_linear_clean", true, false, false, false, false, false, 0.0},
      {"camo_turn_clutter", true, false, true, false, true, true, 0.02},
      {"camo_linear_noisy", true, false, false, false, false, false, 0.05},
      {"camo_occ_linear_clean", true, true, false, false, false, false, 0.0},
      {"camo_occ_turn", true, true, true, false, false, false, 0.02},
      {"camo_occ_linear_noisy", true, true, false, false, false, false, 0.05},
  };

  std::vector<ScenarioSpec> suite;
  std::uint64_t index = 0;
  for (const Row& row : rows) {
    ScenarioSpec s;
    s.name = row.name;
    s.frames = row.fast ? 60 : 80;
    s.seed = seed * 1000 + index++;
    s.noise_sigma = row.noise;
    s.false_color_bands = fc;
    s.background = row.clutter ? clutter_background(obj_sig, fc) : default_background();

    ObjectSpec& o = s.object;
    o.w = 18.0;
    o.h = 14.0;
    o.shape = (index % 2 == 0) ? Shape::Ellipse : Shape::Rectangle;
    o.signature = obj_sig;
    o.path.cx = 20.0 + jitter(rng);
    o.path.cy = 62.0 + jitter(rng);
    o.path.vx = 1.1;
    o.path.vy = -0.15;
    if (row.fast) {
      o.path.cy = 48.0 + jitter(rng);
      o.path.vx = 16.5;
      o.path.vy = 1.0;
    }
    if (row.turning && !row.fast) {
      o.path.turn_frame = 50;
      o.path.turn_vx = 0.4;
      o.path.turn_vy = -0.9;
    }
    if (row.fast) {
      o.path.turn_frame = 30;
      o.path.turn_vx = -16.5;
      o.path.turn_vy = -1.0;
    }
    s.max_step = row.fast ? 20.0 : 4.0;

    if (row.camo) {
      ObjectSpec d = o;
      d.signature = decoy_signature(obj_sig, fc);
      d.path.cx = o.path.cx + 6.0;
      d.path.cy = o.path.cy - 28.0;
      if (row.static_decoy) {
        d.path = MotionPath{};
        d.path.cx = 64.0;
        d.path.cy = 30.0;
      }
      s.decoy = d;
    }
    if (row.occ) {
      s.occlusions.push_back(occlusion_over_path(o, 25, 14, s.width, s.height));
    }
    suite.push_back(std::move(s));
  }
  return suite;
}

ScenarioSpec crossing_decoy_scenario(std::uint64_t seed) {
  const SpectralSignature obj_sig = object_signature();
  const BandTriplet fc = kDefaultFalseColorBands;
  ScenarioSpec s;
  s.name = "crossing_decoy";
  s.frames = 70;
  s.seed = seed;
  s.noise_sigma = 0.0;
  s.background = default_background();
  s.max_step = 4.0;

  s.object.w = 18.0;
  s.object.h = 14.0;
  s.object.signature = obj_sig;
  s.object.path = {20.0, 64.0, 1.2, 0.0, std::nullopt, 0.0, 0.0};

  ObjectSpec d = s.object;
  d.signature = decoy_signature(obj_sig, fc);
  d.path = {70.0, 12.0, 0.6, 1.4, std::nullopt, 0.0, 0.0};
  s.decoy = d;
  return s;
}

CamouflageErrors camouflage_errors(const ScenarioSpec& spec, int frames_used,
                                   std::size_t max_per_class) {
  spec.validate();
  require(spec.decoy.has_value(), ErrorKind::InvalidArgument,
          "scenario '" + spec.name + "' has no decoy");
  const int C = spec.bands, H = spec.height, W = spec.width;
  const std::size_t plane = static_cast<std::size_t>(H) * W;

  std::vector<std::vector<double>> samples[2];
  auto overlaps = [](const BBox& box, int r, int c) {
    return c + 1 > box.x && c < box.x + box.w && r + 1 > box.y && r < box.y + box.h;
  };
  for (int t = 0; t < std::min(frames_used, spec.frames); ++t) {
    const HsiCube frame = generate_frame(spec, t);
    const BBox boxes[2] = {object_box(spec.object, t, W, H), object_box(*spec.decoy, t, W, H)};
    const Shape shapes[2] = {spec.object.shape, spec.decoy->shape};
    for (int cls = 0; cls < 2; ++cls) {
      const BBox& box = boxes[cls];
      for (int r = std::max(0, int(box.y)); r < std::min(H, int(box.y + box.h) + 1); ++r) {
        for (int c = std::max(0, int(box.x)); c < std::min(W, int(box.x + box.w) + 1); ++c) {
          if (coverage(box, shapes[cls], r, c) < 1.0) continue;
          if (overlaps(boxes[1 - cls], r, c)) continue;
          bool hidden = false;
          for (const auto& o : spec.occlusions) hidden |= o.active(t) && overlaps(o.box, r, c);
          if (hidden) continue;
          std::vector<double> v(static_cast<std::size_t>(C));
          for (int b = 0; b < C; ++b) {
            v[static_cast<std::size_t>(b)] = frame.data()[b * plane + static_cast<std::size_t>(r) * W + c];
          }
          samples[cls].push_back(std::move(v));
        }
      }
    }
  }
  // Even subsample so both classes carry equal weight.
  std::vector<std::vector<double>> pts;
  std::vector<int> labels;
  const std::size_t per_class = std::min({max_per_class, samples[0].size(), samples[1].size()});
  require(per_class > 0, ErrorKind::InvalidArgument,
          "scenario '" + spec.name + "' exposes no fully visible object or decoy pixels");
  for (int cls = 0; cls < 2; ++cls) {
    const double step = static_cast<double>(samples[cls].size()) / per_class;
    for (std::size_t k = 0; k < per_class; ++k) {
      pts.push_back(samples[cls][static_cast<std::size_t>(k * step)]);
      labels.push_back(cls);
    }
  }

  auto loo_error = [&](std::span<const int> bands) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int pred = -1;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == i) continue;
        double d = 0.0;
        for (int b : bands) {
          const double diff = pts[i][static_cast<std::size_t>(b)] - pts[j][static_cast<std::size_t>(b)];
          d += diff * diff;
        }
        if (d < best) {
          best = d;
          pred = labels[j];
        }
      }
      if (pred != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(pts.size());
  };

  std::vector<int> all(static_cast<std::size_t>(C));
  for (int b = 0; b < C; ++b) all[static_cast<std::size_t>(b)] = b;
  CamouflageErrors e;
  e.false_color = loo_error(spec.false_color_bands);
  e.full_spectrum = loo_error(all);
  e.samples = pts.size();
  return e;
}

}  // namespace hcot
