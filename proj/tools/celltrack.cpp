#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "celltrack/config.hpp"
#include "celltrack/errors.hpp"
#include "celltrack/filters.hpp"
#include "celltrack/io.hpp"
#include "celltrack/log.hpp"
#include "celltrack/metrics.hpp"
#include "celltrack/simulator.hpp"

namespace fs = std::filesystem;
using namespace celltrack;
using nlohmann::json;

namespace {

RunConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    RunConfig c;
    c.validate();
    return c;
  }
  if (!fs::exists(path)) throw IoError("config file not found: " + path);
  return load_config(path);
}

void cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  GroundTruth truth;
  std::vector<DetectionFrame> frames;
  switch (cfg.scenario) {
    case ScenarioKind::Fixed12:
      std::tie(truth, frames) = fixed_scenario_12cells(cfg.seed);
      break;
    case ScenarioKind::Fixed6:
      std::tie(truth, frames) = fixed_scenario_6cells(cfg.seed);
      break;
    case ScenarioKind::Random:
      truth = generate_truth(cfg.simulator);
      frames = generate_detections(truth, cfg.simulator);
      break;
  }
  auto j = tracks_to_json(truth.tracks);
  j["frames"] = truth.frames;
  write_text(out / "truth.json", j.dump(2) + "\n");
  write_detections(out / "detections.jsonl", frames);
  log_event(LogLevel::Info, "simulate", {{"frames", truth.frames}, {"tracks", truth.tracks.size()}});
}

void cmd_track(const RunConfig& cfg, const fs::path& detections, const fs::path& out) {
  if (!fs::exists(detections)) throw IoError("detections file not found: " + detections.string());
  const auto frames = read_detections(detections);
  const auto r = run_sequence(frames, cfg.model, cfg.filter);
  write_text(out / "tracks.json", tracks_to_json(r.tracks).dump(2) + "\n");
  write_text(out / "stats.csv", stats_csv(r));
}

TrackSet load_tracks(const fs::path& p) {
  if (!fs::exists(p)) throw IoError("track file not found: " + p.string());
  return tracks_from_json(read_json(p));
}

void cmd_evaluate(const RunConfig& cfg, const fs::path& tracks, const fs::path& truth_path, const fs::path& out) {
  const auto est = load_tracks(tracks);
  const auto truth = load_tracks(truth_path);
  const auto& m = cfg.metrics;
  write_text(out / "ospa.csv", frame_values_csv(ospa_per_frame(est, truth, m.ospa_p, m.ospa_c), "ospa"));
  const auto o2 = ospa2(est, truth, m.ospa2_window, m.ospa_p, m.ospa_c);
  write_text(out / "ospa2.csv", frame_values_csv(o2, "ospa2"));
  const auto tra = tra_score(est, truth, m.tra_radius);
  const json tj = {{"score", tra.score},         {"fn_nodes", tra.fn_nodes},   {"fp_nodes", tra.fp_nodes},
                   {"split_nodes", tra.split_nodes}, {"fn_edges", tra.fn_edges}, {"fp_edges", tra.fp_edges},
                   {"semantic_edges", tra.semantic_edges}, {"aogm", tra.aogm},  {"aogm_empty", tra.aogm_empty}};
  write_text(out / "tra.json", tj.dump(2) + "\n");
  const auto me = mitotic_event_error(est, truth);
  write_text(out / "mitosis_error.csv", frame_values_csv(me.per_frame, "division_error"));
  double o2mean = 0.0;
  for (const auto& v : o2) o2mean += v.value;
  if (!o2.empty()) o2mean /= static_cast<double>(o2.size());
  const json summary = {{"ospa2_mean", o2mean}, {"tra", tra.score}, {"mitosis_error_mean_abs", me.mean_abs}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
}

void cmd_stats(const std::string& detections, const std::string& tracks) {
  json out = json::object();
  if (!detections.empty()) {
    if (!fs::exists(detections)) throw IoError("detections file not found: " + detections);
    const auto frames = read_detections(detections);
    std::size_t total = 0;
    for (const auto& f : frames) total += f.detections.size();
    out["detections"] = {{"frames", frames.size()},
                         {"total", total},
                         {"mean_per_frame", frames.empty() ? 0.0 : double(total) / double(frames.size())}};
  }
  if (!tracks.empty()) {
    const auto ts = load_tracks(tracks);
    const auto range = ts.frame_range();
    std::size_t points = 0, divisions = 0;
    for (const auto& [l, s] : ts.tracks) points += s.size();
    if (range)
      for (const auto& v : division_counts(ts, range->first, range->second)) divisions += std::size_t(v.value);
    out["tracks"] = {{"tracks", ts.size()}, {"points", points}, {"divisions", divisions},
                     {"roots", ts.lineage().roots.size()}};
  }
  std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labeled multi-object cell tracking with lineage"};
  app.require_subcommand(1);
  std::string config, out = ".", variant, detections, tracks, truth;
  std::optional<std::uint64_t> seed;
  int threads = 0;

  auto* sim = app.add_subcommand("simulate", "Generate truth.json and detections.jsonl");
  auto* trk = app.add_subcommand("track", "Run the filter over a detection file");
  auto* ev = app.add_subcommand("evaluate", "Score tracks against truth");
  auto* st = app.add_subcommand("stats", "Summarize a detection or track file");
  for (auto* sc : {sim, trk, ev}) {
    sc->add_option("--config", config, "JSON configuration file");
    sc->add_option("--out", out, "Output directory");
  }
  for (auto* sc : {sim, trk}) sc->add_option("--seed", seed, "Random seed (overrides the config)");
  trk->add_option("--variant", variant, "pa, ua or ef")->check(CLI::IsMember({"pa", "ua", "ef"}));
  trk->add_option("--threads", threads, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  trk->add_option("--detections", detections, "detections.jsonl")->required();
  ev->add_option("--tracks", tracks, "Estimated tracks.json")->required();
  ev->add_option("--truth", truth, "Ground truth truth.json")->required();
  st->add_option("--detections", detections, "detections.jsonl");
  st->add_option("--tracks", tracks, "tracks.json or truth.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*st) {
      cmd_stats(detections, tracks);
      return 0;
    }
    auto cfg = config_or_default(config);
    if (seed) cfg.apply_seed(*seed);
    if (!variant.empty()) cfg.filter.variant = parse_variant(variant);
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    if (*sim) cmd_simulate(cfg, out);
    if (*trk) cmd_track(cfg, detections, out);
    if (*ev) cmd_evaluate(cfg, tracks, truth, out);
  } catch (const DegenerateDensityError& e) {
    log_event(LogLevel::Error, "degenerate_density", {{"frame", e.frame()}, {"message", e.what()}});
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
