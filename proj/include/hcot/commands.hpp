#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcot/io.hpp"
#include "hcot/metrics.hpp"

namespace hcot {

/// Writes a generated suite ("standard" or "crossing") as a dataset.
json cmd_generate(const std::string& suite, std::uint64_t seed, const fs::path& out);

struct TrackOptions {
  fs::path data;
  fs::path out;
  std::optional<fs::path> config;
  bool no_dam = false;
  bool rgb_only = false;
  std::optional<GeneratorKind> generator;
  int workers = 0;  // 0: default_workers()
};

TrackerConfig effective_config(const TrackOptions& opt);

/// Tracks every sequence of the dataset; writes runs, traces, config.json and
/// timing.json (the only file carrying wall time).
json cmd_track(const TrackOptions& opt);

struct EvalReport {
  std::vector<SequenceScores> sequences;
  Aggregate overall;
};

/// Scores every <name>.run.json in `runs` against the dataset annotations,
/// frames 2..N.
EvalReport evaluate(const fs::path& runs, const fs::path& data);

/// Writes summary.json, success.csv, precision.csv and attributes.csv.
json cmd_eval(const fs::path& runs, const fs::path& data, const fs::path& out);

struct AblationRow {
  std::string method;
  Aggregate score;
};

/// The five method variants, baseline first.
std::vector<std::pair<std::string, TrackerConfig>> ablation_variants(const TrackerConfig& base);

/// Runs every variant, evaluates it and writes ablation.csv / ablation.json
/// with deltas against the baseline.
json cmd_ablate(const fs::path& data, const fs::path& out, const std::optional<fs::path>& config,
                int workers = 0);

}  // namespace hcot
