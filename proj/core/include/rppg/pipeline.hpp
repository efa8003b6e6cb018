#pragma once

// End-to-end orchestration: frames + landmarks -> a* cell series ->
// spectrogram -> fitted ridge -> heart-rate curve, plus evaluation and
// synthetic fixture generation. The command-line tool is a thin layer over
// these functions.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rppg/config.hpp"
#include "rppg/curve.hpp"
#include "rppg/polyline_fitter.hpp"
#include "rppg/spectrogram.hpp"

namespace rppg::pipeline {

struct ExtractResult {
  HeartRateCurve curve;
  spectral::Spectrogram spectrogram;
  fit::FitResult fit;
  fit::FitConfig fit_config;
  std::vector<double> signal;
  std::size_t frame_count = 0;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Spectrogram, fit and curve for an already aggregated a* signal.
ExtractResult extract_from_signal(std::vector<double> signal, const PipelineConfig& config);

/// Streams frames and landmarks through the cell sampler. The frame rate
/// comes from the raw stream header (must match stft.frame_rate) or from
/// stft.frame_rate for PNG directories. Throws InputMissing, ParseError,
/// LengthMismatch, SignalTooShort, EmptySpectrogram.
ExtractResult run_extract(const std::filesystem::path& frames,
                          const std::filesystem::path& landmarks, const PipelineConfig& config);

struct ExtractOutputs {
  bool dump_spectrogram = false;
  bool dump_weights = false;
};

/// Writes curve.csv, run.json and the optional dumps into `out_dir`.
void write_extract_outputs(const ExtractResult& result, const PipelineConfig& config,
                           const std::filesystem::path& out_dir, const ExtractOutputs& outputs);

struct EvaluationEntry {
  std::string experiment;
  std::string subject;
  double mae = 0.0;
  std::size_t pairs = 0;
};

struct RunReport {
  std::vector<EvaluationEntry> entries;
  double mean_mae = 0.0;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> config;
};

/// Reference may be a raw recording or a "time_seconds,bpm" curve.
HeartRateCurve load_reference_curve(const std::filesystem::path& reference,
                                    const PipelineConfig& config);

EvaluationEntry evaluate_curve(const HeartRateCurve& curve, const HeartRateCurve& reference,
                               std::string experiment, std::string subject = {});

/// Manifest CSV with header "experiment,subject,curve,reference"; relative
/// paths resolve against the manifest's directory.
RunReport evaluate_batch(const std::filesystem::path& manifest, const PipelineConfig& config);

void write_report(const RunReport& report, const std::filesystem::path& out_dir);
RunReport read_report(const std::filesystem::path& report_json);
/// Table of experiments and their MAE with the mean on the last line.
std::string format_report(const RunReport& report);

struct SynthOutputs {
  std::filesystem::path frames;     // frames.rgb
  std::filesystem::path landmarks;  // landmarks.jsonl
  std::filesystem::path signal;     // signal.csv
  std::filesystem::path truth;      // truth.csv
};

/// Writes the scenario's four fixture files. Throws InvalidConfig when the
/// trajectory leaves the analysis band.
SynthOutputs run_synth(const PipelineConfig& config, std::uint64_t seed,
                       const std::filesystem::path& out_dir);

}  // namespace rppg::pipeline
