#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "hcot/commands.hpp"
#include "hcot/error.hpp"
#include "hcot/io.hpp"
#include "hcot/synthgen.hpp"

using namespace hcot;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = fs::temp_directory_path() / ("hcot_io_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

SequenceRecord small_sequence(const std::string& name = "seq", int frames = 4) {
  ScenarioSpec s = standard_suite(5)[3];
  s.name = name;
  s.frames = frames;
  s.occlusions.clear();
  s.noise_sigma = 0.03;
  return generate(s);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::State;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dataset(const fs::path& root, const std::vector<SequenceRecord>& seqs) {
  DatasetManifest m;
  for (const auto& s : seqs) {
    write_sequence(s, root / s.name);
    m.sequences.push_back(entry_for(s, s.name));
  }
  write_dataset_manifest(m, root);
}

}  // namespace

TEST_CASE("frame file names are 1-based and zero-padded") {
  CHECK(frame_file_name(1) == "frame_000001.bin");
  CHECK(frame_file_name(123456) == "frame_123456.bin");
}

TEST_CASE("sequence round trip is bit exact") {
  TempDir tmp("rt");
  const SequenceRecord seq = small_sequence();
  write_sequence(seq, tmp.path / "seq");
  CHECK(fs::file_size(tmp.path / "seq" / "frame_000001.bin") == 25u * 96 * 128 * 4);
  CHECK(fs::file_size(tmp.path / "seq" / "frame_000001.bin") == 1228800u);
  const SequenceRecord back = read_sequence(tmp.path / "seq");
  CHECK(back.name == seq.name);
  CHECK(back.frames == seq.frames);
  CHECK(back.annotations == seq.annotations);
  CHECK(back.attributes == seq.attributes);
  CHECK(back.false_color_bands == seq.false_color_bands);

  const json m = parse_json_file(tmp.path / "seq" / "manifest.json");
  CHECK(m["format_version"] == "1.0");
  CHECK(m["false_color_bands"] == json::array({1, 9, 15}));
}

TEST_CASE("frames are little-endian float32") {
  TempDir tmp("le");
  const SequenceRecord seq = small_sequence("le", 2);
  write_sequence(seq, tmp.path / "le");
  std::ifstream in(tmp.path / "le" / "frame_000002.bin", std::ios::binary);
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  float v;
  std::memcpy(&v, &bits, 4);
  CHECK(v == seq.frames[1].at(0, 0, 0));
}

TEST_CASE("truncated frame is reported with its index") {
  TempDir tmp("trunc");
  write_sequence(small_sequence(), tmp.path / "seq");
  fs::resize_file(tmp.path / "seq" / "frame_000003.bin", 1000);
  try {
    read_sequence(tmp.path / "seq");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncatedFile);
    CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
  }
}

TEST_CASE("oversized frame is a geometry error") {
  TempDir tmp("big");
  write_sequence(small_sequence(), tmp.path / "seq");
  std::ofstream(tmp.path / "seq" / "frame_000002.bin", std::ios::app | std::ios::binary) << "xxxx";
  CHECK(kind_of([&] { read_sequence(tmp.path / "seq"); }) == ErrorKind::Geometry);
}

TEST_CASE("malformed JSON is reported") {
  TempDir tmp("json");
  write_sequence(small_sequence(), tmp.path / "seq");
  write_text(tmp.path / "seq" / "annotations.json", "[[1, 2, 3");
  CHECK(kind_of([&] { read_sequence(tmp.path / "seq"); }) == ErrorKind::MalformedJson);
  write_text(tmp.path / "seq" / "annotations.json", "[[1, 2, 3]]");
  CHECK(kind_of([&] { read_sequence(tmp.path / "seq"); }) == ErrorKind::MalformedJson);
  write_text(tmp.path / "seq" / "manifest.json", "{\"format_version\": \"1.0\"}");
  CHECK(kind_of([&] { read_sequence(tmp.path / "seq"); }) == ErrorKind::MalformedJson);
}

TEST_CASE("annotation count mismatch is a geometry error") {
  TempDir tmp("count");
  const SequenceRecord seq = small_sequence();
  write_sequence(seq, tmp.path / "seq");
  write_text(tmp.path / "seq" / "annotations.json", "[[1, 2, 3, 4]]\n");
  CHECK(kind_of([&] { read_sequence(tmp.path / "seq"); }) == ErrorKind::Geometry);
}

TEST_CASE("dataset manifest cross-checks sequence geometry") {
  TempDir tmp("ds");
  make_dataset(tmp.path, {small_sequence("a"), small_sequence("b", 3)});
  const DatasetManifest m = read_dataset_manifest(tmp.path);
  REQUIRE(m.sequences.size() == 2);
  CHECK(m.sequences[1].frames == 3);
  CHECK(m.sequences[0].bands == 25);

  json j = parse_json_file(tmp.path / "manifest.json");
  j["sequences"][0]["frames"] = 9;
  write_json(tmp.path / "manifest.json", j);
  CHECK(kind_of([&] { read_dataset_manifest(tmp.path); }) == ErrorKind::Geometry);
  j["sequences"][0]["frames"] = 4;
  j["format_version"] = "2.0";
  write_json(tmp.path / "manifest.json", j);
  CHECK(kind_of([&] { read_dataset_manifest(tmp.path); }) == ErrorKind::MalformedJson);
  j["format_version"] = "1.0";
  j["sequences"][0]["false_color_bands"] = json::array({1, 9, 26});
  write_json(tmp.path / "manifest.json", j);
  CHECK(kind_of([&] { read_dataset_manifest(tmp.path); }) == ErrorKind::Geometry);
}

TEST_CASE("config round trip and strict keys") {
  TrackerConfig c;
  c.dc_threshold = 0.2;
  c.rectify_window = 7;
  c.use_rectify = false;
  c.response_generator = GeneratorKind::SpdanToy;
  c.process_noise[3] = 2e-4;
  const TrackerConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));

  CHECK(config_from_json(json::object()).dc_threshold == TrackerConfig{}.dc_threshold);
  CHECK(kind_of([] { config_from_json({{"dc_treshold", 0.1}}); }) == ErrorKind::MalformedJson);
  CHECK(kind_of([] { config_from_json({{"dc_threshold", "high"}}); }) == ErrorKind::MalformedJson);
  CHECK(kind_of([] { config_from_json({{"dc_threshold", -1.0}}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { config_from_json({{"rectify_window", 1}}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { config_from_json({{"response_generator", "magic"}}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("run round trip and trace csv") {
  TempDir tmp("run");
  const SequenceRecord seq = small_sequence("r", 5);
  const TrackRun run = track_sequence(seq, TrackerConfig{});
  write_run(run, tmp.path);
  const TrackRun back = read_run(tmp.path / "r.run.json");
  REQUIRE(back.outputs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.outputs[i].box == run.outputs[i].box);
    CHECK(back.outputs[i].branch == run.outputs[i].branch);
    CHECK(back.outputs[i].dc == run.outputs[i].dc);
  }
  const std::string csv = read_file(tmp.path / "r.trace.csv");
  CHECK(csv.rfind("frame,dc,offset,source,branch,x,y,w,h\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(read_file(tmp.path / "r.run.json").find("wall") == std::string::npos);
}

TEST_CASE("eval on perfect predictions scores one") {
  TempDir tmp("eval");
  const SequenceRecord seq = small_sequence("p", 6);
  make_dataset(tmp.path / "data", {seq});
  TrackRun run;
  run.sequence = "p";
  run.generator = "spectral_correlation";
  for (int f = 2; f <= 6; ++f) {
    FrameTrace t;
    t.frame = f;
    t.box = t.raw = seq.annotations[static_cast<std::size_t>(f - 1)];
    run.outputs.push_back(t);
  }
  write_run(run, tmp.path / "runs");
  const json overall = cmd_eval(tmp.path / "runs", tmp.path / "data", tmp.path / "eval");
  CHECK(overall["auc"].get<double>() == doctest::Approx(1.0));
  CHECK(overall["dp20"].get<double>() == 1.0);
  CHECK(overall["frames"].get<int>() == 5);
  const std::string success = read_file(tmp.path / "eval" / "success.csv");
  CHECK(success.rfind("sequence,threshold,rate\n", 0) == 0);
  CHECK(success.find("ALL,") != std::string::npos);
  CHECK(read_file(tmp.path / "eval" / "precision.csv").rfind("sequence,threshold,rate\n", 0) == 0);
  CHECK(fs::exists(tmp.path / "eval" / "attributes.csv"));
  CHECK(fs::exists(tmp.path / "eval" / "summary.json"));

  run.outputs.pop_back();
  write_run(run, tmp.path / "runs");
  CHECK(kind_of([&] { evaluate(tmp.path / "runs", tmp.path / "data"); }) == ErrorKind::Geometry);
}

TEST_CASE("track command honours --no-dam and writes timing separately") {
  TempDir tmp("track");
  ScenarioSpec s = standard_suite(5)[3];
  s.frames = 45;
  make_dataset(tmp.path / "data", {generate(s)});
  TrackOptions opt;
  opt.data = tmp.path / "data";
  opt.out = tmp.path / "runs";
  opt.no_dam = true;
  opt.workers = 1;
  cmd_track(opt);
  const TrackRun run = read_run(tmp.path / "runs" / (s.name + ".run.json"));
  for (const auto& t : run.outputs) CHECK(t.source == BoxSource::Model);
  CHECK(read_file(tmp.path / "runs" / (s.name + ".trace.csv")).find("kalman") == std::string::npos);
  CHECK(fs::exists(tmp.path / "runs" / "timing.json"));
  CHECK_FALSE(parse_json_file(tmp.path / "runs" / "config.json")["use_dam"].get<bool>());

  opt.no_dam = false;
  opt.out = tmp.path / "runs2";
  cmd_track(opt);
  CHECK(read_file(tmp.path / "runs2" / (s.name + ".trace.csv")).find("kalman") != std::string::npos);
}

TEST_CASE("runs are byte-identical across repeats") {
  TempDir tmp("repeat");
  ScenarioSpec s = standard_suite(2)[6];
  s.frames = 20;
  make_dataset(tmp.path / "data", {generate(s)});
  TrackOptions opt;
  opt.data = tmp.path / "data";
  opt.workers = 1;
  opt.out = tmp.path / "a";
  cmd_track(opt);
  opt.out = tmp.path / "b";
  opt.workers = 2;
  cmd_track(opt);
  for (const char* f : {".run.json", ".trace.csv"}) {
    CHECK(read_file(tmp.path / "a" / (s.name + f)) == read_file(tmp.path / "b" / (s.name + f)));
  }
}

TEST_CASE("ablation table lists the five variants") {
  const auto variants = ablation_variants(TrackerConfig{});
  REQUIRE(variants.size() == 5);
  CHECK(variants[0].first == "B");
  CHECK(variants[0].second.rgb_only);
  CHECK_FALSE(variants[0].second.use_dam);
  CHECK(variants[4].first == "B+DA+S");
  CHECK_FALSE(variants[4].second.rgb_only);
  CHECK(variants[4].second.use_rectify);
  CHECK_FALSE(variants[2].second.use_rectify);

  TempDir tmp("ablate");
  ScenarioSpec s = standard_suite(5)[0];
  s.frames = 10;
  make_dataset(tmp.path / "data", {generate(s)});
  cmd_ablate(tmp.path / "data", tmp.path / "out", std::nullopt, 1);
  const std::string csv = read_file(tmp.path / "out" / "ablation.csv");
  CHECK(csv.rfind("Methods,AUC,DP_20,Δ(AUC),Δ(DP_20)\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.find("\nB,") != std::string::npos);
  CHECK(csv.find("\nB+DA+S,") != std::string::npos);
  const json table = parse_json_file(tmp.path / "out" / "ablation.json");
  CHECK(table["rows"].size() == 5);
  CHECK(table["rows"][0]["delta_auc"].is_null());
}
