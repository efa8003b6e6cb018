// rppg: heart-rate extraction from face video a* signals.
//
//   rppg extract  --frames <path> --landmarks <path> --out <dir> [--config <path>]
//                 [--dump-spectrogram] [--dump-weights]
//   rppg evaluate --curve <csv> --reference <path> [--out <dir>] [--config <path>]
//   rppg evaluate --batch <manifest.csv> [--out <dir>] [--config <path>]
//   rppg synth    [--scenario <name>] [--config <path>] [--seed <int>] --out <dir>
//   rppg report   <report.json | dir>... [--out <dir>]
//
// Exit codes: 0 success, 2 input error, 3 numeric failure, 1 anything else.
// Failures print one JSON line {"error": <class>, "message": <text>} on stderr.

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rppg/config.hpp"
#include "rppg/error.hpp"
#include "rppg/io.hpp"
#include "rppg/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("rppg");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("RPPG_LOG_LEVEL")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "warn") spdlog::set_level(spdlog::level::warn);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring RPPG_LOG_LEVEL={} (expected error|warn|info|debug)", level);
  }
}

int report_error(std::string_view error_class, const std::string& message, int code) {
  nlohmann::json line{{"error", error_class}, {"message", message}};
  std::cerr << line.dump() << std::endl;
  return code;
}

rppg::PipelineConfig load_config(const std::string& path,
                                  const std::optional<std::string>& scenario = std::nullopt) {
  rppg::KeyValueConfig kv;
  if (!path.empty()) kv = rppg::KeyValueConfig::load(path);
  if (scenario) kv.set("synth.scenario", *scenario);
  rppg::PipelineConfig cfg = rppg::PipelineConfig::from(kv);
  if (!path.empty() && !cfg.cells_path.empty() && cfg.cells_path.is_relative()) {
    cfg.cells_path = fs::path(path).parent_path() / cfg.cells_path;
  }
  return cfg;
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) spdlog::warn("{}", w);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Remote photoplethysmography: heart rate from CIELAB a* face signals"};
  app.require_subcommand(1);

  std::string config_path;
  std::string frames, landmarks, out_dir, curve, reference, batch, scenario, experiment = "1";
  bool dump_spectrogram = false, dump_weights = false;
  std::uint64_t seed = 1;
  std::vector<std::string> report_inputs;

  auto* extract = app.add_subcommand("extract", "Extract a heart-rate curve from frames and landmarks");
  extract->add_option("--config", config_path, "Key-value config file");
  extract->add_option("--frames", frames, "Raw frame stream or directory of numbered PNGs")->required();
  extract->add_option("--landmarks", landmarks, "Newline-delimited JSON landmark records")->required();
  extract->add_option("--out", out_dir, "Output directory")->required();
  extract->add_flag("--dump-spectrogram", dump_spectrogram, "Write spectrogram.bin and its axes");
  extract->add_flag("--dump-weights", dump_weights, "Write the vertex weight map weights.bin");

  auto* evaluate = app.add_subcommand("evaluate", "Score a curve against a reference by MAE");
  evaluate->add_option("--config", config_path, "Key-value config file");
  auto* curve_opt = evaluate->add_option("--curve", curve, "Curve CSV (time_seconds,bpm)");
  auto* ref_opt = evaluate->add_option("--reference", reference,
                                       "Reference recording (time, amplitude) or curve CSV");
  auto* batch_opt = evaluate->add_option("--batch", batch,
                                         "Manifest CSV: experiment,subject,curve,reference");
  evaluate->add_option("--experiment", experiment, "Experiment label for single evaluations");
  evaluate->add_option("--out", out_dir, "Directory for evaluation.csv and report.json");
  curve_opt->needs(ref_opt);
  ref_opt->needs(curve_opt);
  batch_opt->excludes(curve_opt)->excludes(ref_opt);

  auto* synth = app.add_subcommand("synth", "Write synthetic fixture files for a scenario");
  synth->add_option("--config", config_path, "Key-value config file");
  synth->add_option("--scenario", scenario,
                    "const72 | ramp60_100 | spikes72 | noisy72 | lumramp72");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--out", out_dir, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Summarize evaluation reports");
  report->add_option("inputs", report_inputs, "report.json files or directories containing one")
      ->required();
  report->add_option("--out", out_dir, "Write the merged report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*extract) {
      const auto cfg = load_config(config_path);
      const auto result = rppg::pipeline::run_extract(frames, landmarks, cfg);
      log_warnings(result.warnings);
      rppg::pipeline::write_extract_outputs(result, cfg, out_dir, {dump_spectrogram, dump_weights});
      const double mean_bpm =
          std::accumulate(result.curve.bpm.begin(), result.curve.bpm.end(), 0.0) /
          static_cast<double>(result.curve.size());
      spdlog::info("{} frames, {} windows, {} iterations, {:.3f} s", result.frame_count,
                   result.curve.size(), result.fit.iterations, result.runtime_seconds);
      std::cout << "curve: " << (fs::path(out_dir) / "curve.csv").string() << "\n"
                << "mean_bpm: " << rppg::io::format_number(mean_bpm) << "\n";
    } else if (*evaluate) {
      const auto cfg = load_config(config_path);
      rppg::pipeline::RunReport run;
      if (!batch.empty()) {
        run = rppg::pipeline::evaluate_batch(batch, cfg);
      } else if (!curve.empty()) {
        const auto video = rppg::io::read_curve_csv(curve);
        const auto ref = rppg::pipeline::load_reference_curve(reference, cfg);
        run.entries.push_back(rppg::pipeline::evaluate_curve(video, ref, experiment));
        run.mean_mae = run.entries.front().mae;
        const auto echo = cfg.to_key_values();
        for (const auto& [k, v] : echo.values()) run.config[k] = v;
      } else {
        return report_error("invalid-argument", "evaluate needs --curve/--reference or --batch",
                            kExitInput);
      }
      if (!out_dir.empty()) rppg::pipeline::write_report(run, out_dir);
      std::cout << rppg::pipeline::format_report(run);
    } else if (*synth) {
      const auto cfg = load_config(config_path, scenario.empty() ? std::nullopt
                                                                 : std::optional<std::string>(scenario));
      const auto files = rppg::pipeline::run_synth(cfg, seed, out_dir);
      std::cout << "frames: " << files.frames.string() << "\n"
                << "landmarks: " << files.landmarks.string() << "\n"
                << "signal: " << files.signal.string() << "\n"
                << "truth: " << files.truth.string() << "\n";
    } else if (*report) {
      rppg::pipeline::RunReport merged;
      std::vector<double> maes;
      for (const auto& input : report_inputs) {
        fs::path path(input);
        if (fs::is_directory(path)) path /= "report.json";
        const auto part = rppg::pipeline::read_report(path);
        for (const auto& e : part.entries) {
          merged.entries.push_back(e);
          maes.push_back(e.mae);
        }
        merged.runtime_seconds += part.runtime_seconds;
        merged.warnings.insert(merged.warnings.end(), part.warnings.begin(), part.warnings.end());
        if (merged.config.empty()) merged.config = part.config;
      }
      merged.mean_mae = rppg::eval::mean_mae(maes);
      if (!out_dir.empty()) rppg::pipeline::write_report(merged, out_dir);
      std::cout << rppg::pipeline::format_report(merged);
    }
  } catch (const rppg::Error& e) {
    const int code = e.code() == rppg::ErrorCode::kEmptySpectrogram ? kExitNumeric : kExitInput;
    return report_error(rppg::error_class(e.code()), e.what(), code);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
