#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hcot/commands.hpp"
#include "hcot/error.hpp"

namespace {

int report_error(const std::string& kind, const std::string& message, int code) {
  const hcot::json err = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral camouflaged-object tracking toolkit"};
  app.set_version_flag("--version", std::string(hcot::kFormatVersion));
  app.require_subcommand(1);

  std::string suite = "standard";
  std::uint64_t seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic suite as a dataset");
  gen->add_option("--suite", suite, "standard or crossing")->capture_default_str();
  gen->add_option("--seed", seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output dataset directory")->required();

  hcot::TrackOptions track_opt;
  std::string track_data, track_out, track_config, track_generator;
  auto* track = app.add_subcommand("track", "Track every sequence of a dataset");
  track->add_option("--data", track_data, "Dataset directory")->required();
  track->add_option("--config", track_config, "Tracker config JSON");
  track->add_option("--out", track_out, "Run output directory")->required();
  track->add_flag("--no-dam", track_opt.no_dam, "Disable the distractor-aware module");
  track->add_flag("--rgb-only", track_opt.rgb_only, "Use only the false-color bands");
  track->add_option("--generator", track_generator, "spdan_toy or spectral_correlation");
  track->add_option("--workers", track_opt.workers, "Worker threads (default: HCOT_WORKERS)");

  std::string eval_runs, eval_data, eval_out;
  auto* eval = app.add_subcommand("eval", "Score runs against dataset annotations");
  eval->add_option("--runs", eval_runs, "Run directory")->required();
  eval->add_option("--data", eval_data, "Dataset directory")->required();
  eval->add_option("--out", eval_out, "Output directory")->required();

  std::string abl_data, abl_out, abl_config;
  int abl_workers = 0;
  auto* ablate = app.add_subcommand("ablate", "Run the method variants and tabulate deltas");
  ablate->add_option("--data", abl_data, "Dataset directory")->required();
  ablate->add_option("--out", abl_out, "Output directory")->required();
  ablate->add_option("--config", abl_config, "Base tracker config JSON");
  ablate->add_option("--workers", abl_workers, "Worker threads (default: HCOT_WORKERS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    hcot::json result;
    if (*gen) {
      result = hcot::cmd_generate(suite, seed, gen_out);
    } else if (*track) {
      track_opt.data = track_data;
      track_opt.out = track_out;
      if (!track_config.empty()) track_opt.config = track_config;
      if (!track_generator.empty()) track_opt.generator = hcot::parse_generator(track_generator);
      result = hcot::cmd_track(track_opt);
    } else if (*eval) {
      result = hcot::cmd_eval(eval_runs, eval_data, eval_out);
    } else if (*ablate) {
      std::optional<hcot::fs::path> cfg;
      if (!abl_config.empty()) cfg = abl_config;
      result = hcot::cmd_ablate(abl_data, abl_out, cfg, abl_workers);
    }
    std::cout << result.dump() << std::endl;
  } catch (const hcot::Error& e) {
    return report_error(hcot::to_string(e.kind()), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
