#include "hcot/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "hcot/error.hpp"

namespace hcot {
namespace {

constexpr BandTriplet kIdentityTriplet{0, 1, 2};

}  // namespace

std::vector<BBox> TrackRun::boxes(const BBox& init_box) const {
  std::vector<BBox> out{init_box};
  for (const auto& t : outputs) out.push_back(t.box);
  return out;
}

Tracker::Tracker(const TrackerConfig& cfg, const HsiCube& first_frame, const BBox& first_box,
                 const BandTriplet& false_color_bands)
    : cfg_(cfg),
      source_fc_(false_color_bands),
      fc_(cfg.rgb_only ? kIdentityTriplet : false_color_bands),
      dam_(cfg) {
  cfg_.validate();
  require(!first_frame.empty(), ErrorKind::InvalidArgument, "first frame is empty");
  require(first_box.valid() &&
              intersects_frame(first_box, first_frame.width(), first_frame.height()),
          ErrorKind::InvalidArgument, "first-frame annotation must be a valid box inside the frame");
  for (int b : false_color_bands) {
    require(b >= 0 && b < first_frame.bands(), ErrorKind::InvalidArgument,
            "false-color band out of range");
  }

  const HsiCube frame = prepare(first_frame);
  side_ = std::min({cfg_.search_factor() * std::sqrt(first_box.area()),
                    static_cast<double>(frame.width()), static_cast<double>(frame.height())});
  template_ = crop_patch(frame, first_box, cfg_.template_size);

  const double scale = cfg_.search_size / side_;
  generator_ = make_generator(cfg_, frame.bands(), fc_);
  generator_->set_template(template_, first_box.w * scale, first_box.h * scale);
  dam_.init(first_box);
  last_ = first_box;
}

HsiCube Tracker::prepare(const HsiCube& frame) const {
  return cfg_.rgb_only ? false_color(frame, source_fc_) : frame;
}

SearchRegion Tracker::search_region(const BBox& center, int width, int height) const {
  SearchRegion r;
  r.side = side_;
  r.size = cfg_.search_size;
  r.x = std::clamp(center.center_x() - 0.5 * side_, 0.0, std::max(0.0, width - side_));
  r.y = std::clamp(center.center_y() - 0.5 * side_, 0.0, std::max(0.0, height - side_));
  return r;
}

FrameTrace Tracker::track_frame(const HsiCube& raw_frame) {
  require(!raw_frame.empty(), ErrorKind::InvalidArgument, "frame is empty");
  const HsiCube frame = prepare(raw_frame);
  require(frame.bands() == template_.bands(), ErrorKind::ShapeMismatch,
          "frame band count differs from the first frame");
  const int W = frame.width(), H = frame.height();

  const SearchRegion region = search_region(last_, W, H);
  const HsiCube patch = crop_patch(frame, BBox{region.x, region.y, region.side, region.side},
                                   region.size);
  const ResponseMaps maps = generator_->respond(patch);
  maps.validate();

  FrameTrace t;
  t.frame = ++frame_;
  t.raw = decode_box(maps, cfg_.downsample, region);
  const DamOutput out = dam_.step(t.raw, maps.cm_values());
  t.dc = out.dc;
  t.offset = out.offset;
  t.source = out.source;
  t.branch = out.branch;

  // A prediction that drifted off-frame is pulled back so it still overlaps.
  t.box = out.box;
  const double cx = std::clamp(t.box.center_x(), 0.0, static_cast<double>(W));
  const double cy = std::clamp(t.box.center_y(), 0.0, static_cast<double>(H));
  if (cx != t.box.center_x() || cy != t.box.center_y()) {
    t.box = BBox::from_center(cx, cy, t.box.w, t.box.h);
  }
  last_ = t.box;
  return t;
}

TrackRun track_sequence(const SequenceRecord& seq, const TrackerConfig& cfg) {
  seq.validate();
  require(!seq.frames.empty() && !seq.annotations.empty(), ErrorKind::InvalidArgument,
          "sequence '" + seq.name + "' has no first-frame annotation");
  const auto start = std::chrono::steady_clock::now();

  TrackRun run;
  run.sequence = seq.name;
  run.config = cfg;
  run.generator = std::string(to_string(cfg.response_generator));
  Tracker tracker(cfg, seq.frames.front(), seq.annotations.front(), seq.false_color_bands);
  run.outputs.reserve(seq.frames.size() - 1);
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    run.outputs.push_back(tracker.track_frame(seq.frames[i]));
  }
  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

int default_workers() {
  if (const char* env = std::getenv("HCOT_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::InvalidArgument, std::string("HCOT_WORKERS must be a positive integer, got '") +
                                         env + "'");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<TrackRun> track_all(std::size_t count,
                                const std::function<SequenceRecord(std::size_t)>& load,
                                const TrackerConfig& cfg, int workers) {
  require(workers >= 1, ErrorKind::InvalidArgument, "worker count must be >= 1");
  std::vector<TrackRun> runs(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        runs[i] = track_sequence(load(i), cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

}  // namespace hcot
