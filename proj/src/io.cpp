#include "hcot/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "hcot/error.hpp"

namespace hcot {
namespace {

[[noreturn]] void malformed(const fs::path& file, const std::string& what) {
  fail(ErrorKind::MalformedJson, file.string() + ": " + what);
}

template <typename T>
T field(const json& j, const char* key, const fs::path& file) {
  if (!j.is_object() || !j.contains(key)) malformed(file, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    malformed(file, std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<std::string> attribute_names(const std::vector<Attribute>& attrs) {
  std::vector<std::string> out;
  for (Attribute a : attrs) out.emplace_back(to_string(a));
  return out;
}

std::vector<Attribute> parse_attributes(const std::vector<std::string>& names, const fs::path& file) {
  std::vector<Attribute> out;
  for (const auto& n : names) {
    const auto a = parse_attribute(n);
    if (!a) malformed(file, "unknown attribute '" + n + "'");
    out.push_back(*a);
  }
  return out;
}

json entry_to_json(const SequenceEntry& e) {
  json fc = json::array();
  for (int b : e.false_color_bands) fc.push_back(b + 1);
  return {{"name", e.name},
          {"path", e.path},
          {"frames", e.frames},
          {"bands", e.bands},
          {"height", e.height},
          {"width", e.width},
          {"attributes", attribute_names(e.attributes)},
          {"false_color_bands", fc}};
}

SequenceEntry entry_from_json(const json& j, const fs::path& file) {
  SequenceEntry e;
  e.name = field<std::string>(j, "name", file);
  e.path = j.contains("path") ? field<std::string>(j, "path", file) : std::string(".");
  e.frames = field<int>(j, "frames", file);
  e.bands = field<int>(j, "bands", file);
  e.height = field<int>(j, "height", file);
  e.width = field<int>(j, "width", file);
  e.attributes = parse_attributes(field<std::vector<std::string>>(j, "attributes", file), file);
  const auto fc = field<std::vector<int>>(j, "false_color_bands", file);
  if (fc.size() != 3) malformed(file, "false_color_bands must list three bands");
  for (std::size_t k = 0; k < 3; ++k) {
    if (fc[k] < 1 || fc[k] > e.bands) {
      fail(ErrorKind::Geometry, file.string() + ": false-color band " + std::to_string(fc[k]) +
                                    " outside 1.." + std::to_string(e.bands));
    }
    e.false_color_bands[k] = fc[k] - 1;
  }
  if (e.frames < 1 || e.bands < 1 || e.height < 1 || e.width < 1) {
    fail(ErrorKind::Geometry, file.string() + ": frame count and extents must be positive");
  }
  return e;
}

void write_frame(const HsiCube& cube, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot open " + file.string() + " for writing");
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(cube.data().data()),
              static_cast<std::streamsize>(cube.data().size() * sizeof(float)));
  } else {
    for (float v : cube.data()) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      bits = __builtin_bswap32(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  require(out.good(), ErrorKind::Io, "write failed for " + file.string());
}

HsiCube read_frame(const fs::path& file, int frame, int C, int H, int W) {
  const std::size_t count = static_cast<std::size_t>(C) * H * W;
  const std::uintmax_t expected = count * sizeof(float);
  std::error_code ec;
  const std::uintmax_t actual = fs::file_size(file, ec);
  if (ec) fail(ErrorKind::Io, "frame " + std::to_string(frame) + ": cannot stat " + file.string());
  if (actual < expected) {
    fail(ErrorKind::TruncatedFile, "frame " + std::to_string(frame) + " (" + file.string() +
                                       ") is truncated: " + std::to_string(actual) + " of " +
                                       std::to_string(expected) + " bytes");
  }
  if (actual > expected) {
    fail(ErrorKind::Geometry, "frame " + std::to_string(frame) + " (" + file.string() + ") has " +
                                  std::to_string(actual) + " bytes, expected " +
                                  std::to_string(expected));
  }
  std::vector<float> data(count);
  std::ifstream in(file, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + file.string());
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expected));
  require(in.gcount() == static_cast<std::streamsize>(expected), ErrorKind::TruncatedFile,
          "frame " + std::to_string(frame) + " (" + file.string() + ") ended early");
  if constexpr (std::endian::native != std::endian::little) {
    for (float& v : data) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
  }
  try {
    return HsiCube(C, H, W, std::move(data));
  } catch (const Error& e) {
    fail(ErrorKind::Geometry, "frame " + std::to_string(frame) + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json box_json(const BBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

BBox box_from_json(const json& j, const fs::path& file) {
  if (!j.is_array() || j.size() != 4) malformed(file, "box must be [x, y, w, h]");
  BBox b;
  try {
    b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  } catch (const json::exception&) {
    malformed(file, "box entries must be numbers");
  }
  return b;
}

}  // namespace

std::string frame_file_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.bin", frame);
  return buf;
}

json parse_json_file(const fs::path& file) {
  std::ifstream in(file);
  require(in.good(), ErrorKind::Io, "cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    malformed(file, e.what());
  }
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot open " + file.string() + " for writing");
  out << text;
  require(out.good(), ErrorKind::Io, "write failed for " + file.string());
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

SequenceEntry entry_for(const SequenceRecord& seq, const std::string& path) {
  SequenceEntry e;
  e.name = seq.name;
  e.path = path;
  e.frames = static_cast<int>(seq.frames.size());
  if (!seq.frames.empty()) {
    e.bands = seq.frames.front().bands();
    e.height = seq.frames.front().height();
    e.width = seq.frames.front().width();
  }
  e.attributes = seq.attributes;
  e.false_color_bands = seq.false_color_bands;
  return e;
}

void write_sequence(const SequenceRecord& seq, const fs::path& dir) {
  seq.validate();
  fs::create_directories(dir);
  json manifest = entry_to_json(entry_for(seq, "."));
  manifest.erase("path");
  manifest["format_version"] = kFormatVersion;
  write_json(dir / "manifest.json", manifest);

  json ann = json::array();
  for (const auto& b : seq.annotations) ann.push_back(box_json(b));
  write_json(dir / "annotations.json", ann);

  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    write_frame(seq.frames[i], dir / frame_file_name(static_cast<int>(i) + 1));
  }
}

SequenceEntry read_sequence_entry(const fs::path& dir) {
  const fs::path file = dir / "manifest.json";
  const json j = parse_json_file(file);
  const auto version = field<std::string>(j, "format_version", file);
  require(version == kFormatVersion, ErrorKind::MalformedJson,
          file.string() + ": unsupported format_version '" + version + "'");
  return entry_from_json(j, file);
}

std::vector<BBox> read_annotations(const fs::path& dir) {
  const fs::path file = dir / "annotations.json";
  const json j = parse_json_file(file);
  if (!j.is_array()) malformed(file, "annotations must be an array of [x, y, w, h]");
  std::vector<BBox> out;
  for (const auto& b : j) out.push_back(box_from_json(b, file));
  return out;
}

SequenceRecord read_sequence(const fs::path& dir) {
  const SequenceEntry e = read_sequence_entry(dir);
  SequenceRecord seq;
  seq.name = e.name;
  seq.attributes = e.attributes;
  seq.false_color_bands = e.false_color_bands;
  seq.annotations = read_annotations(dir);
  if (seq.annotations.size() != static_cast<std::size_t>(e.frames)) {
    fail(ErrorKind::Geometry, (dir / "annotations.json").string() + ": " +
                                  std::to_string(seq.annotations.size()) +
                                  " boxes for " + std::to_string(e.frames) + " frames");
  }
  for (int i = 1; i <= e.frames; ++i) {
    seq.frames.push_back(read_frame(dir / frame_file_name(i), i, e.bands, e.height, e.width));
  }
  seq.validate();
  return seq;
}

void write_dataset_manifest(const DatasetManifest& manifest, const fs::path& root) {
  fs::create_directories(root);
  json seqs = json::array();
  for (const auto& e : manifest.sequences) seqs.push_back(entry_to_json(e));
  write_json(root / "manifest.json",
             {{"format_version", manifest.format_version}, {"sequences", seqs}});
}

DatasetManifest read_dataset_manifest(const fs::path& root) {
  const fs::path file = root / "manifest.json";
  const json j = parse_json_file(file);
  DatasetManifest m;
  m.format_version = field<std::string>(j, "format_version", file);
  require(m.format_version == kFormatVersion, ErrorKind::MalformedJson,
          file.string() + ": unsupported format_version '" + m.format_version + "'");
  const json seqs = field<json>(j, "sequences", file);
  if (!seqs.is_array()) malformed(file, "'sequences' must be an array");
  std::set<std::string> names;
  for (const auto& s : seqs) {
    SequenceEntry e = entry_from_json(s, file);
    require(names.insert(e.name).second, ErrorKind::MalformedJson,
            file.string() + ": duplicate sequence '" + e.name + "'");
    const fs::path dir = root / e.path;
    require(fs::is_directory(dir), ErrorKind::Io,
            file.string() + ": sequence directory " + dir.string() + " does not exist");
    const SequenceEntry local = read_sequence_entry(dir);
    if (local.frames != e.frames || local.bands != e.bands || local.height != e.height ||
        local.width != e.width) {
      fail(ErrorKind::Geometry, file.string() + ": geometry of '" + e.name +
                                    "' disagrees with " + (dir / "manifest.json").string());
    }
    m.sequences.push_back(std::move(e));
  }
  return m;
}

json config_to_json(const TrackerConfig& c) {
  return {{"dc_threshold", c.dc_threshold},
          {"offset_threshold", c.offset_threshold},
          {"rectify_window", c.rectify_window},
          {"dc_use_mean_denominator", c.dc_use_mean_denominator},
          {"use_dam", c.use_dam},
          {"use_rectify", c.use_rectify},
          {"process_noise", c.process_noise},
          {"observation_noise", c.observation_noise},
          {"initial_covariance_scale", c.initial_covariance_scale},
          {"lambda1", c.lambda1},
          {"lambda2", c.lambda2},
          {"template_size", c.template_size},
          {"search_size", c.search_size},
          {"downsample", c.downsample},
          {"embed_depth", c.embed_depth},
          {"token_dim", c.token_dim},
          {"spectral_kernel", c.spectral_kernel},
          {"spatial_kernel", c.spatial_kernel},
          {"backbone_layers", c.backbone_layers},
          {"attention_heads", c.attention_heads},
          {"adapter_dim", c.adapter_dim},
          {"head_width", c.head_width},
          {"param_std", c.param_std},
          {"param_seed", c.param_seed},
          {"response_generator", std::string(to_string(c.response_generator))},
          {"correlation_sharpness", c.correlation_sharpness},
          {"rgb_only", c.rgb_only}};
}

TrackerConfig config_from_json(const json& j) {
  const fs::path where("config");
  if (!j.is_object()) malformed(where, "config must be a JSON object");
  TrackerConfig c;
  const json defaults = config_to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) malformed(where, "unknown field '" + key + "'");
  }
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = field<std::decay_t<decltype(dst)>>(j, key, where);
  };
  get("dc_threshold", c.dc_threshold);
  get("offset_threshold", c.offset_threshold);
  get("rectify_window", c.rectify_window);
  get("dc_use_mean_denominator", c.dc_use_mean_denominator);
  get("use_dam", c.use_dam);
  get("use_rectify", c.use_rectify);
  get("process_noise", c.process_noise);
  get("observation_noise", c.observation_noise);
  get("initial_covariance_scale", c.initial_covariance_scale);
  get("lambda1", c.lambda1);
  get("lambda2", c.lambda2);
  get("template_size", c.template_size);
  get("search_size", c.search_size);
  get("downsample", c.downsample);
  get("embed_depth", c.embed_depth);
  get("token_dim", c.token_dim);
  get("spectral_kernel", c.spectral_kernel);
  get("spatial_kernel", c.spatial_kernel);
  get("backbone_layers", c.backbone_layers);
  get("attention_heads", c.attention_heads);
  get("adapter_dim", c.adapter_dim);
  get("head_width", c.head_width);
  get("param_std", c.param_std);
  get("param_seed", c.param_seed);
  get("correlation_sharpness", c.correlation_sharpness);
  get("rgb_only", c.rgb_only);
  if (j.contains("response_generator")) {
    c.response_generator = parse_generator(field<std::string>(j, "response_generator", where));
  }
  c.validate();
  return c;
}

TrackerConfig read_config(const fs::path& file) {
  try {
    return config_from_json(parse_json_file(file));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedJson) malformed(file, e.what());
    throw;
  }
}

json run_to_json(const TrackRun& run) {
  json frames = json::array();
  for (const auto& t : run.outputs) {
    frames.push_back({{"frame", t.frame},
                      {"box", box_json(t.box)},
                      {"raw", box_json(t.raw)},
                      {"dc", t.dc},
                      {"offset", t.offset},
                      {"source", std::string(to_string(t.source))},
                      {"branch", std::string(to_string(t.branch))}});
  }
  return {{"format_version", kFormatVersion},
          {"sequence", run.sequence},
          {"generator", run.generator},
          {"config", config_to_json(run.config)},
          {"outputs", frames}};
}

TrackRun run_from_json(const json& j) {
  const fs::path where("run");
  TrackRun run;
  run.sequence = field<std::string>(j, "sequence", where);
  run.generator = field<std::string>(j, "generator", where);
  run.config = config_from_json(field<json>(j, "config", where));
  const json outs = field<json>(j, "outputs", where);
  if (!outs.is_array()) malformed(where, "'outputs' must be an array");
  for (const auto& o : outs) {
    FrameTrace t;
    t.frame = field<int>(o, "frame", where);
    t.box = box_from_json(field<json>(o, "box", where), where);
    t.raw = box_from_json(field<json>(o, "raw", where), where);
    t.dc = field<double>(o, "dc", where);
    t.offset = field<double>(o, "offset", where);
    const auto src = field<std::string>(o, "source", where);
    if (src != "model" && src != "kalman") malformed(where, "unknown source '" + src + "'");
    t.source = src == "model" ? BoxSource::Model : BoxSource::Kalman;
    const auto br = field<std::string>(o, "branch", where);
    bool known = false;
    for (DamBranch b : {DamBranch::Accept, DamBranch::LowConfidence, DamBranch::ConfidentError,
                        DamBranch::Disabled}) {
      if (br == to_string(b)) {
        t.branch = b;
        known = true;
      }
    }
    if (!known) malformed(where, "unknown branch '" + br + "'");
    run.outputs.push_back(t);
  }
  return run;
}

std::string trace_csv(const TrackRun& run) {
  std::ostringstream out;
  out << "frame,dc,offset,source,branch,x,y,w,h\n";
  for (const auto& t : run.outputs) {
    out << t.frame << ',' << fmt(t.dc) << ',' << fmt(t.offset) << ',' << to_string(t.source)
        << ',' << to_string(t.branch) << ',' << fmt(t.box.x) << ',' << fmt(t.box.y) << ','
        << fmt(t.box.w) << ',' << fmt(t.box.h) << '\n';
  }
  return out.str();
}

void write_run(const TrackRun& run, const fs::path& dir) {
  fs::create_directories(dir);
  write_json(dir / (run.sequence + ".run.json"), run_to_json(run));
  write_text(dir / (run.sequence + ".trace.csv"), trace_csv(run));
}

TrackRun read_run(const fs::path& file) {
  try {
    return run_from_json(parse_json_file(file));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedJson) malformed(file, e.what());
    throw;
  }
}

}  // namespace hcot
