#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcot/config.hpp"
#include "hcot/core.hpp"
#include "hcot/tracker.hpp"

namespace hcot {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1.0";

/// One sequence as listed in a dataset manifest.
struct SequenceEntry {
  std::string name;
  std::string path;  // relative to the dataset root
  int frames = 0;
  int bands = 0;
  int height = 0;
  int width = 0;
  std::vector<Attribute> attributes;
  BandTriplet false_color_bands = kDefaultFalseColorBands;  // 0-based in memory
};

struct DatasetManifest {
  std::string format_version = kFormatVersion;
  std::vector<SequenceEntry> sequences;
};

std::string frame_file_name(int frame);  // 1-based: frame_000001.bin

/// Writes manifest.json, annotations.json and one raw frame file per frame.
void write_sequence(const SequenceRecord& seq, const fs::path& dir);
/// Reads and checks a sequence directory written by write_sequence.
SequenceRecord read_sequence(const fs::path& dir);
/// Manifest and annotations only; no frame data is read.
SequenceEntry read_sequence_entry(const fs::path& dir);
std::vector<BBox> read_annotations(const fs::path& dir);

void write_dataset_manifest(const DatasetManifest& manifest, const fs::path& root);
DatasetManifest read_dataset_manifest(const fs::path& root);
SequenceEntry entry_for(const SequenceRecord& seq, const std::string& path);

json config_to_json(const TrackerConfig& cfg);
/// Every field optional and defaulted; unknown keys are rejected.
TrackerConfig config_from_json(const json& j);
TrackerConfig read_config(const fs::path& file);

json run_to_json(const TrackRun& run);
TrackRun run_from_json(const json& j);
/// frame,dc,offset,source,branch,x,y,w,h
std::string trace_csv(const TrackRun& run);
/// <dir>/<sequence>.run.json and <dir>/<sequence>.trace.csv
void write_run(const TrackRun& run, const fs::path& dir);
TrackRun read_run(const fs::path& file);

json parse_json_file(const fs::path& file);
void write_text(const fs::path& file, const std::string& text);
/// Pretty JSON with a trailing newline.
void write_json(const fs::path& file, const json& j);

}  // namespace hcot
