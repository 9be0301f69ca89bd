#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hcot/config.hpp"
#include "hcot/core.hpp"
#include "hcot/dam.hpp"
#include "hcot/spbn.hpp"

namespace hcot {

struct FrameTrace {
  int frame = 0;  // 1-based
  BBox box;       // final output
  BBox raw;       // decoded model box before the DAM
  double dc = 0.0;
  double offset = 0.0;
  BoxSource source = BoxSource::Model;
  DamBranch branch = DamBranch::Accept;
};

struct TrackRun {
  std::string sequence;
  TrackerConfig config;
  std::string generator;
  std::vector<FrameTrace> outputs;  // frames 2..N
  double wall_time_s = 0.0;         // not part of any reproducible payload

  /// Annotation-aligned boxes: frame-1 init box followed by every output.
  std::vector<BBox> boxes(const BBox& init_box) const;
};

/// Single-sequence tracker. Fixed template, search window re-centred on the
/// previous final box.
class Tracker {
 public:
  /// Extracts the template from the first frame and seeds the DAM.
  Tracker(const TrackerConfig& cfg, const HsiCube& first_frame, const BBox& first_box,
          const BandTriplet& false_color_bands);

  FrameTrace track_frame(const HsiCube& frame);

  const TrackerConfig& config() const { return cfg_; }
  const HsiCube& template_patch() const { return template_; }
  const DistractorAwareModule& dam() const { return dam_; }
  double search_side() const { return side_; }
  const BBox& last_box() const { return last_; }

  /// Square window of the fixed side centred on `center`, shifted inside the frame.
  SearchRegion search_region(const BBox& center, int width, int height) const;

 private:
  HsiCube prepare(const HsiCube& frame) const;

  TrackerConfig cfg_;
  BandTriplet source_fc_;  // false-color bands of the input frames
  BandTriplet fc_;         // false-color bands of the prepared frames
  std::unique_ptr<ResponseGenerator> generator_;
  DistractorAwareModule dam_;
  HsiCube template_;
  double side_ = 0.0;
  int frame_ = 1;
  BBox last_;
};

/// Tracker over frames 2..N of `seq`, initialized from the first annotation.
TrackRun track_sequence(const SequenceRecord& seq, const TrackerConfig& cfg);

/// Worker count: HCOT_WORKERS if set and positive, else hardware concurrency.
int default_workers();

/// Runs `track_sequence` over `count` sequences produced by `load`, with at
/// most `workers` threads. Each worker loads one sequence at a time. Results
/// keep input order.
std::vector<TrackRun> track_all(std::size_t count,
                                const std::function<SequenceRecord(std::size_t)>& load,
                                const TrackerConfig& cfg, int workers);

}  // namespace hcot
