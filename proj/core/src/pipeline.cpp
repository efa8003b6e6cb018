#include "rppg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rppg/color_space.hpp"
#include "rppg/error.hpp"
#include "rppg/evaluation.hpp"
#include "rppg/io.hpp"
#include "rppg/roi_sampler.hpp"
#include "rppg/synthetic.hpp"

namespace rppg::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kInvalidArgument, "cannot create " + dir.string());
}

json config_json(const PipelineConfig& config) {
  json j = json::object();
  const auto echo = config.to_key_values();
  for (const auto& [k, v] : echo.values()) j[k] = v;
  return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

}  // namespace

ExtractResult extract_from_signal(std::vector<double> signal, const PipelineConfig& config) {
  const auto start = Clock::now();
  config.validate();
  ExtractResult result;
  result.frame_count = signal.size();

  result.spectrogram = spectral::analyze(signal, config.stft);
  if (result.spectrogram.columns() < 2) {
    throw Error(ErrorCode::kSignalTooShort, "signal yields fewer than two spectrogram columns");
  }
  if (result.spectrogram.all_zero()) {
    throw Error(ErrorCode::kEmptySpectrogram, "spectrogram has no energy in the heart-rate band");
  }
  const double duration = static_cast<double>(signal.size()) / config.stft.frame_rate;
  result.fit_config = config.fit_for_duration(duration);
  result.fit = fit::fit(result.spectrogram, result.fit_config);
  result.curve = fit::sample_heart_rate(result.fit.polyline, result.spectrogram);

  if (!result.fit.converged) {
    result.warnings.push_back("polyline did not stabilize within " +
                              std::to_string(result.fit_config.max_iterations) + " iterations");
  }
  if (result.fit.polyline.half_span() > 0) {
    result.warnings.push_back("edge vertices use windows clipped to the first/last " +
                              std::to_string(result.fit.polyline.half_span() + 1) + " columns");
  }
  result.signal = std::move(signal);
  result.runtime_seconds = seconds_since(start);
  return result;
}

ExtractResult run_extract(const fs::path& frames, const fs::path& landmarks,
                          const PipelineConfig& config) {
  const auto start = Clock::now();
  config.validate();
  if (!fs::exists(landmarks)) {
    throw Error(ErrorCode::kInputMissing, "landmark file not found: " + landmarks.string());
  }
  auto source = io::open_frames(frames, config.stft.frame_rate);
  io::LandmarkReader reader(landmarks);

  PipelineConfig effective = config;
  std::vector<std::string> warnings;
  if (std::abs(source->frame_rate() - config.stft.frame_rate) > 1e-9) {
    warnings.push_back("frame stream rate " + io::format_number(source->frame_rate()) +
                       " Hz overrides stft.frame_rate");
    effective.stft.frame_rate = source->frame_rate();
  }

  roi::SeriesBuilder builder(config.cells(), effective.stft.frame_rate,
                             {config.normalize_by_pixel_count});
  std::size_t index = 0;
  for (;;) {
    auto frame = source->next();
    auto marks = reader.next();
    if (!frame && !marks) break;
    if (!frame || !marks) {
      throw Error(ErrorCode::kLengthMismatch,
                  std::string(frame ? "landmarks" : "frames") + " end at frame " +
                      std::to_string(index) + " before the " + (frame ? "frames" : "landmarks"));
    }
    if (marks->frame_index != static_cast<std::int64_t>(index)) {
      throw Error(ErrorCode::kLengthMismatch,
                  "landmark record " + std::to_string(marks->frame_index) +
                      " is not aligned with frame " + std::to_string(index));
    }
    builder.push(color::convert_frame(*frame), *marks);
    ++index;
  }
  const std::size_t degenerate = builder.degenerate_samples();
  const std::vector<roi::CellSignalSeries> series = builder.finish();
  if (degenerate > 0) {
    warnings.push_back(std::to_string(degenerate) + " degenerate cell samples were held");
  }
  for (const auto& s : series) {
    if (s.valid_frames == 0) {
      warnings.push_back("cell " + std::to_string(s.cell_id) + " never covered any pixel");
    }
  }

  ExtractResult result = extract_from_signal(roi::combine_series(series), effective);
  result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
  result.runtime_seconds = seconds_since(start);
  return result;
}

void write_extract_outputs(const ExtractResult& result, const PipelineConfig& config,
                           const fs::path& out_dir, const ExtractOutputs& outputs) {
  ensure_dir(out_dir);
  io::write_curve_csv(out_dir / "curve.csv", result.curve);

  if (outputs.dump_spectrogram) {
    io::write_spectrogram_dump(out_dir / "spectrogram.bin", result.spectrogram);
  }
  if (outputs.dump_weights) {
    const auto& poly = result.fit.polyline;
    const auto w = fit::weight_map(poly, result.spectrogram, result.fit_config);
    io::write_matrix_dump(out_dir / "weights.bin", {'R', 'P', 'W', 'M'},
                          result.spectrogram.bins(), poly.size(), w);
    std::ofstream axes(out_dir / "weights.bin.axes.txt");
    axes << "freq_bpm";
    for (double f : result.spectrogram.freq_axis()) axes << ' ' << io::format_number(f);
    axes << "\nvertex_column";
    for (double x : poly.xs()) axes << ' ' << io::format_number(x);
    axes << "\nvertex_bin";
    for (double y : poly.ys()) axes << ' ' << io::format_number(y);
    axes << '\n';
  }

  json run;
  run["frame_count"] = result.frame_count;
  run["runtime_seconds"] = result.runtime_seconds;
  run["iterations"] = result.fit.iterations;
  run["converged"] = result.fit.converged;
  run["vertex_count"] = result.fit.polyline.size();
  run["bins"] = result.spectrogram.bins();
  run["columns"] = result.spectrogram.columns();
  run["warnings"] = result.warnings;
  run["config"] = config_json(config);
  std::ofstream(out_dir / "run.json") << run.dump(2) << '\n';
}

HeartRateCurve load_reference_curve(const fs::path& reference, const PipelineConfig& config) {
  if (io::is_curve_csv(reference)) return io::read_curve_csv(reference);
  return eval::reference_hr(io::read_reference_recording(reference), config.stft);
}

EvaluationEntry evaluate_curve(const HeartRateCurve& curve, const HeartRateCurve& reference,
                               std::string experiment, std::string subject) {
  const eval::PairedSamples pairs = eval::align(curve, reference);
  return {std::move(experiment), std::move(subject), eval::mae(pairs), pairs.size()};
}

RunReport evaluate_batch(const fs::path& manifest, const PipelineConfig& config) {
  const auto start = Clock::now();
  if (!fs::exists(manifest)) throw Error(ErrorCode::kInputMissing, "manifest not found: " + manifest.string());
  std::ifstream in(manifest);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"experiment", "subject", "curve", "reference"}) {
    throw Error(ErrorCode::kParseError,
                manifest.string() + ": expected header 'experiment,subject,curve,reference'");
  }
  const fs::path base = manifest.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_relative() ? base / path : path;
  };

  RunReport report;
  std::vector<double> maes;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw Error(ErrorCode::kParseError,
                  manifest.string() + ":" + std::to_string(number) + ": expected 4 fields");
    }
    const HeartRateCurve curve = io::read_curve_csv(resolve(fields[2]));
    const HeartRateCurve reference = load_reference_curve(resolve(fields[3]), config);
    report.entries.push_back(evaluate_curve(curve, reference, fields[0], fields[1]));
    maes.push_back(report.entries.back().mae);
  }
  report.mean_mae = eval::mean_mae(maes);
  const auto echo = config.to_key_values();
  for (const auto& [k, v] : echo.values()) report.config[k] = v;
  report.runtime_seconds = seconds_since(start);
  return report;
}

void write_report(const RunReport& report, const fs::path& out_dir) {
  ensure_dir(out_dir);
  {
    std::ofstream csv(out_dir / "evaluation.csv");
    csv << "experiment,subject,mae_bpm,pairs\n";
    for (const auto& e : report.entries) {
      csv << e.experiment << ',' << e.subject << ',' << io::format_number(e.mae) << ',' << e.pairs
          << '\n';
    }
  }
  json j;
  j["mean_mae_bpm"] = report.mean_mae;
  j["runtime_seconds"] = report.runtime_seconds;
  j["warnings"] = report.warnings;
  j["config"] = report.config;
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"experiment", e.experiment}, {"subject", e.subject}, {"mae_bpm", e.mae},
                       {"pairs", e.pairs}});
  }
  j["experiments"] = std::move(entries);
  std::ofstream(out_dir / "report.json") << j.dump(2) << '\n';
}

RunReport read_report(const fs::path& report_json) {
  if (!fs::exists(report_json)) {
    throw Error(ErrorCode::kInputMissing, "report not found: " + report_json.string());
  }
  json j;
  try {
    std::ifstream in(report_json);
    j = json::parse(in);
    RunReport report;
    report.mean_mae = j.at("mean_mae_bpm").get<double>();
    report.runtime_seconds = j.value("runtime_seconds", 0.0);
    report.warnings = j.value("warnings", std::vector<std::string>{});
    report.config = j.value("config", std::map<std::string, std::string>{});
    for (const auto& e : j.at("experiments")) {
      report.entries.push_back({e.at("experiment").get<std::string>(),
                                e.value("subject", std::string{}), e.at("mae_bpm").get<double>(),
                                e.value("pairs", std::size_t{0})});
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, report_json.string() + ": " + e.what());
  }
}

std::string format_report(const RunReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-10s %10s\n", "experiment", "subject", "MAE, bpm");
  out << line;
  for (const auto& e : report.entries) {
    std::snprintf(line, sizeof(line), "%-12s %-10s %10.2f\n", e.experiment.c_str(),
                  e.subject.c_str(), e.mae);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-23s %10.2f\n", "mean", report.mean_mae);
  out << line;
  return out.str();
}

SynthOutputs run_synth(const PipelineConfig& config, std::uint64_t seed, const fs::path& out_dir) {
  config.validate();
  const SynthSettings& s = config.synth;
  const synth::HrTrajectory trajectory =
      s.bpm_start == s.bpm_end ? synth::HrTrajectory::constant(s.bpm_start)
                               : synth::HrTrajectory::ramp(0.0, s.bpm_start, s.duration, s.bpm_end);
  trajectory.validate_band(config.stft.band_low, config.stft.band_high);

  synth::FrameGeometry geometry = synth::default_geometry();
  geometry.width = s.width;
  geometry.height = s.height;
  geometry.cells = config.cells();
  const double rate = config.stft.frame_rate;
  const synth::FrameSynthesizer synth(trajectory, rate, s.duration, s.distortion, geometry, seed);

  ensure_dir(out_dir);
  SynthOutputs outputs{out_dir / "frames.rgb", out_dir / "landmarks.jsonl", out_dir / "signal.csv",
                       out_dir / "truth.csv"};
  {
    io::RawFrameWriter writer(outputs.frames, s.width, s.height, synth.frame_count(), rate);
    std::ofstream marks(outputs.landmarks);
    for (std::size_t i = 0; i < synth.frame_count(); ++i) {
      writer.write(synth.frame(i));
      marks << io::format_landmark_record(synth.landmarks(i)) << '\n';
    }
    writer.close();
  }
  const auto clean = synth::generate_signal(trajectory, rate, s.duration, {}, seed);
  io::write_signal_csv(outputs.signal, clean.samples, rate);

  std::vector<double> times(synth.frame_count());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) / rate;
  io::write_curve_csv(outputs.truth, trajectory.sample(times));
  return outputs;
}

}  // namespace rppg::pipeline
