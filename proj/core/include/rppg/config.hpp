#pragma once

// Flat key-value configuration:
//
//   # comment
//   stft.window_length = 512
//   fit.alpha = 1.0
//
// Keys are namespaced by module. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rppg/polyline_fitter.hpp"
#include "rppg/spectrogram.hpp"
#include "rppg/synthetic.hpp"

namespace rppg {

class KeyValueConfig {
 public:
  /// Throws ParseError with the offending line number.
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  /// Throws InputMissing / ParseError.
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct SynthSettings {
  std::string scenario = "const72";
  double bpm_start = 72.0;
  double bpm_end = 72.0;
  double duration = 60.0;  // seconds
  int width = 64;
  int height = 64;
  synth::DistortionSpec distortion;
};

struct PipelineConfig {
  spectral::StftConfig stft;
  fit::FitConfig fit;
  std::size_t vertex_count = 0;  // 0: one vertex per vertex_spacing_seconds
  double vertex_spacing_seconds = 10.0;
  std::filesystem::path cells_path;  // empty: built-in default cells
  bool normalize_by_pixel_count = true;
  SynthSettings synth;

  /// Throws InvalidConfig for unknown keys or invalid values.
  static PipelineConfig from(const KeyValueConfig& kv);
  static PipelineConfig load(const std::filesystem::path& path);

  void validate() const;
  fit::FitConfig fit_for_duration(double seconds) const;
  std::vector<roi::CellSpec> cells() const;
  KeyValueConfig to_key_values() const;
};

/// Applies a named scenario's trajectory and distortion defaults:
/// const72, ramp60_100, spikes72, noisy72, lumramp72. Throws InvalidConfig.
SynthSettings scenario_settings(const std::string& name);

}  // namespace rppg
