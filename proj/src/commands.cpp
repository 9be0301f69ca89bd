#include "hcot/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "hcot/error.hpp"
#include "hcot/synthgen.hpp"
#include "hcot/tracker.hpp"

namespace hcot {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string signed_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.6f", v);
  return buf;
}

json aggregate_json(const Aggregate& a) {
  return {{"frames", a.frames}, {"auc", a.auc}, {"dp20", a.dp20}};
}

int resolve_workers(int workers) { return workers > 0 ? workers : default_workers(); }

}  // namespace

json cmd_generate(const std::string& suite, std::uint64_t seed, const fs::path& out) {
  std::vector<ScenarioSpec> specs;
  if (suite == "standard") {
    specs = standard_suite(seed);
  } else if (suite == "crossing") {
    specs = {crossing_decoy_scenario(seed)};
  } else {
    fail(ErrorKind::InvalidArgument, "unknown suite '" + suite + "' (expected standard or crossing)");
  }
  DatasetManifest manifest;
  for (const auto& spec : specs) {
    const SequenceRecord seq = generate(spec);
    write_sequence(seq, out / spec.name);
    manifest.sequences.push_back(entry_for(seq, spec.name));
  }
  write_dataset_manifest(manifest, out);
  return {{"suite", suite}, {"seed", seed}, {"sequences", manifest.sequences.size()},
          {"out", out.string()}};
}

TrackerConfig effective_config(const TrackOptions& opt) {
  TrackerConfig cfg = opt.config ? read_config(*opt.config) : TrackerConfig{};
  if (opt.no_dam) cfg.use_dam = false;
  if (opt.rgb_only) cfg.rgb_only = true;
  if (opt.generator) cfg.response_generator = *opt.generator;
  cfg.validate();
  return cfg;
}

json cmd_track(const TrackOptions& opt) {
  const TrackerConfig cfg = effective_config(opt);
  const DatasetManifest manifest = read_dataset_manifest(opt.data);
  const auto& entries = manifest.sequences;
  auto load = [&](std::size_t i) { return read_sequence(opt.data / entries[i].path); };
  const std::vector<TrackRun> runs =
      track_all(entries.size(), load, cfg, resolve_workers(opt.workers));

  fs::create_directories(opt.out);
  json timing = json::object();
  for (const auto& run : runs) {
    write_run(run, opt.out);
    timing[run.sequence] = run.wall_time_s;
  }
  write_json(opt.out / "config.json", config_to_json(cfg));
  write_json(opt.out / "timing.json", {{"wall_time_s", timing}});
  return {{"runs", runs.size()}, {"out", opt.out.string()},
          {"generator", std::string(to_string(cfg.response_generator))}};
}

EvalReport evaluate(const fs::path& runs, const fs::path& data) {
  const DatasetManifest manifest = read_dataset_manifest(data);
  std::map<std::string, const SequenceEntry*> by_name;
  for (const auto& e : manifest.sequences) by_name[e.name] = &e;

  std::vector<fs::path> files;
  require(fs::is_directory(runs), ErrorKind::Io, "runs directory " + runs.string() + " not found");
  for (const auto& entry : fs::directory_iterator(runs)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 9 && name.ends_with(".run.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  require(!files.empty(), ErrorKind::InvalidArgument, "no *.run.json files in " + runs.string());

  EvalReport report;
  for (const auto& file : files) {
    const TrackRun run = read_run(file);
    const auto it = by_name.find(run.sequence);
    require(it != by_name.end(), ErrorKind::InvalidArgument,
            file.string() + ": sequence '" + run.sequence + "' is not in the dataset");
    const std::vector<BBox> truth = read_annotations(data / it->second->path);
    require(truth.size() == run.outputs.size() + 1, ErrorKind::Geometry,
            file.string() + ": " + std::to_string(run.outputs.size()) + " outputs for " +
                std::to_string(truth.size()) + " annotated frames");
    std::vector<BBox> predicted;
    for (const auto& t : run.outputs) predicted.push_back(t.box);
    report.sequences.push_back(score_sequence(run.sequence, it->second->attributes, predicted,
                                              std::span(truth).subspan(1)));
  }
  report.overall = aggregate(report.sequences);
  return report;
}

json cmd_eval(const fs::path& runs, const fs::path& data, const fs::path& out) {
  const EvalReport report = evaluate(runs, data);
  fs::create_directories(out);

  json seqs = json::array();
  std::ostringstream success, precision;
  success << "sequence,threshold,rate\n";
  precision << "sequence,threshold,rate\n";
  auto emit = [&](const std::string& name, std::span<const double> ious,
                  std::span<const double> cles) {
    for (const auto& p : success_auc(ious).curve) {
      success << name << ',' << fmt(p.threshold) << ',' << fmt(p.rate) << '\n';
    }
    for (const auto& p : precision_dp(cles).curve) {
      precision << name << ',' << fmt(p.threshold) << ',' << fmt(p.rate) << '\n';
    }
  };
  std::vector<double> all_ious, all_cles;
  for (const auto& s : report.sequences) {
    const SequenceScores one[] = {s};
    json attrs = json::array();
    for (Attribute a : s.attributes) attrs.push_back(std::string(to_string(a)));
    json j = aggregate_json(aggregate(one));
    j["name"] = s.name;
    j["attributes"] = attrs;
    seqs.push_back(j);
    emit(s.name, s.ious, s.cles);
    all_ious.insert(all_ious.end(), s.ious.begin(), s.ious.end());
    all_cles.insert(all_cles.end(), s.cles.begin(), s.cles.end());
  }
  emit("ALL", all_ious, all_cles);

  std::ostringstream attrs;
  attrs << "attribute,sequences,frames,auc,dp20\n";
  for (const auto& [attr, agg] : attribute_report(report.sequences)) {
    const auto n = std::count_if(report.sequences.begin(), report.sequences.end(),
                                 [&](const SequenceScores& s) {
                                   return std::find(s.attributes.begin(), s.attributes.end(),
                                                    attr) != s.attributes.end();
                                 });
    attrs << to_string(attr) << ',' << n << ',' << agg.frames << ',' << fmt(agg.auc) << ','
          << fmt(agg.dp20) << '\n';
  }

  const json summary = {{"format_version", kFormatVersion},
                        {"overall", aggregate_json(report.overall)},
                        {"sequences", seqs}};
  write_json(out / "summary.json", summary);
  write_text(out / "success.csv", success.str());
  write_text(out / "precision.csv", precision.str());
  write_text(out / "attributes.csv", attrs.str());
  return summary["overall"];
}

std::vector<std::pair<std::string, TrackerConfig>> ablation_variants(const TrackerConfig& base) {
  auto variant = [&](bool spectral, bool dam, bool rectify) {
    TrackerConfig c = base;
    c.rgb_only = !spectral;
    c.use_dam = dam;
    c.use_rectify = rectify;
    return c;
  };
  return {{"B", variant(false, false, false)},
          {"B+S", variant(true, false, false)},
          {"B+D", variant(false, true, false)},
          {"B+DA", variant(false, true, true)},
          {"B+DA+S", variant(true, true, true)}};
}

json cmd_ablate(const fs::path& data, const fs::path& out, const std::optional<fs::path>& config,
                int workers) {
  const TrackerConfig base = config ? read_config(*config) : TrackerConfig{};
  std::vector<AblationRow> rows;
  for (const auto& [method, cfg] : ablation_variants(base)) {
    TrackOptions opt;
    opt.data = data;
    opt.out = out / "runs" / method;
    opt.workers = workers;
    // Variants are fully described by their config, written next to the runs.
    fs::create_directories(opt.out);
    write_json(opt.out / "variant.json", config_to_json(cfg));
    opt.config = opt.out / "variant.json";
    cmd_track(opt);
    const json overall = cmd_eval(opt.out, data, out / "eval" / method);
    rows.push_back({method, {overall.at("frames").get<std::size_t>(), overall.at("auc").get<double>(),
                             overall.at("dp20").get<double>()}});
  }

  const Aggregate& b = rows.front().score;
  std::ostringstream csv;
  csv << "Methods,AUC,DP_20,Δ(AUC),Δ(DP_20)\n";
  json table = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double dauc = r.score.auc - b.auc, ddp = r.score.dp20 - b.dp20;
    csv << r.method << ',' << fmt(r.score.auc) << ',' << fmt(r.score.dp20) << ','
        << (i == 0 ? "-" : signed_fmt(dauc)) << ',' << (i == 0 ? "-" : signed_fmt(ddp)) << '\n';
    json row = {{"method", r.method}, {"auc", r.score.auc}, {"dp20", r.score.dp20}};
    row["delta_auc"] = i == 0 ? json(nullptr) : json(dauc);
    row["delta_dp20"] = i == 0 ? json(nullptr) : json(ddp);
    table.push_back(row);
  }
  write_text(out / "ablation.csv", csv.str());
  const json result = {{"format_version", kFormatVersion}, {"rows", table}};
  write_json(out / "ablation.json", result);
  return result;
}

}  // namespace hcot
