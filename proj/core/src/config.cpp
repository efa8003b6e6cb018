#include "rppg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "rppg/error.hpp"
#include "rppg/io.hpp"

namespace rppg {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidConfig, key + ": expected a number, got '" + value + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& value) {
  long out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidConfig, key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

std::size_t to_count(const std::string& key, const std::string& value) {
  const long v = to_long(key, value);
  if (v < 0) throw Error(ErrorCode::kInvalidConfig, key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw Error(ErrorCode::kInvalidConfig, key + ": expected true/false, got '" + value + "'");
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"stft.window_length", [](auto& c, auto& k, auto& v) { c.stft.window_length = static_cast<int>(to_long(k, v)); }},
      {"stft.stride", [](auto& c, auto& k, auto& v) { c.stft.stride = static_cast<int>(to_long(k, v)); }},
      {"stft.tukey_shape", [](auto& c, auto& k, auto& v) { c.stft.tukey_shape = to_double(k, v); }},
      {"stft.frame_rate", [](auto& c, auto& k, auto& v) { c.stft.frame_rate = to_double(k, v); }},
      {"stft.band_low", [](auto& c, auto& k, auto& v) { c.stft.band_low = to_double(k, v); }},
      {"stft.band_high", [](auto& c, auto& k, auto& v) { c.stft.band_high = to_double(k, v); }},
      {"stft.noise_threshold", [](auto& c, auto& k, auto& v) { c.stft.noise_threshold = to_double(k, v); }},
      {"fit.vertex_count", [](auto& c, auto& k, auto& v) { c.vertex_count = to_count(k, v); }},
      {"fit.vertex_spacing_seconds", [](auto& c, auto& k, auto& v) { c.vertex_spacing_seconds = to_double(k, v); }},
      {"fit.alpha", [](auto& c, auto& k, auto& v) { c.fit.alpha = to_double(k, v); }},
      {"fit.beta", [](auto& c, auto& k, auto& v) { c.fit.beta = to_double(k, v); }},
      {"fit.r", [](auto& c, auto& k, auto& v) { c.fit.r = to_double(k, v); }},
      {"fit.learning_rate", [](auto& c, auto& k, auto& v) { c.fit.learning_rate = to_double(k, v); }},
      {"fit.max_iterations", [](auto& c, auto& k, auto& v) { c.fit.max_iterations = static_cast<int>(to_long(k, v)); }},
      {"fit.convergence_tol", [](auto& c, auto& k, auto& v) { c.fit.convergence_tol = to_double(k, v); }},
      {"fit.convergence_patience", [](auto& c, auto& k, auto& v) { c.fit.convergence_patience = static_cast<int>(to_long(k, v)); }},
      {"fit.smoothing_epsilon", [](auto& c, auto& k, auto& v) { c.fit.smoothing_epsilon = to_double(k, v); }},
      {"roi.cells", [](auto& c, auto&, auto& v) { c.cells_path = v; }},
      {"roi.normalize_by_pixel_count", [](auto& c, auto& k, auto& v) { c.normalize_by_pixel_count = to_bool(k, v); }},
      {"synth.scenario", [](auto&, auto&, auto&) {}},  // applied first, see from()
      {"synth.bpm", [](auto& c, auto& k, auto& v) { c.synth.bpm_start = c.synth.bpm_end = to_double(k, v); }},
      {"synth.bpm_start", [](auto& c, auto& k, auto& v) { c.synth.bpm_start = to_double(k, v); }},
      {"synth.bpm_end", [](auto& c, auto& k, auto& v) { c.synth.bpm_end = to_double(k, v); }},
      {"synth.duration", [](auto& c, auto& k, auto& v) { c.synth.duration = to_double(k, v); }},
      {"synth.width", [](auto& c, auto& k, auto& v) { c.synth.width = static_cast<int>(to_long(k, v)); }},
      {"synth.height", [](auto& c, auto& k, auto& v) { c.synth.height = static_cast<int>(to_long(k, v)); }},
      {"synth.noise_sigma", [](auto& c, auto& k, auto& v) { c.synth.distortion.additive_noise_sigma = to_double(k, v); }},
      {"synth.luminosity_ramp", [](auto& c, auto& k, auto& v) { c.synth.distortion.luminosity_ramp_amplitude = to_double(k, v); }},
      {"synth.spike_rate", [](auto& c, auto& k, auto& v) { c.synth.distortion.motion_spike_rate = to_double(k, v); }},
      {"synth.spike_amplitude", [](auto& c, auto& k, auto& v) { c.synth.distortion.motion_spike_amplitude = to_double(k, v); }},
  };
  return table;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError, where + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::kParseError, where + ": empty key");
    if (cfg.values_.contains(key)) {
      throw Error(ErrorCode::kParseError, where + ": duplicate key '" + key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInputMissing, "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

SynthSettings scenario_settings(const std::string& name) {
  SynthSettings s;
  s.scenario = name;
  if (name == "const72") {
    s.bpm_start = s.bpm_end = 72.0;
  } else if (name == "ramp60_100") {
    s.bpm_start = 60.0;
    s.bpm_end = 100.0;
    s.duration = 300.0;
  } else if (name == "spikes72") {
    s.bpm_start = s.bpm_end = 72.0;
    s.duration = 120.0;
    s.distortion.motion_spike_rate = 6.0;
    s.distortion.motion_spike_amplitude = 4.0;
  } else if (name == "noisy72") {
    s.bpm_start = s.bpm_end = 72.0;
    s.distortion.additive_noise_sigma = 0.5;
  } else if (name == "lumramp72") {
    s.bpm_start = s.bpm_end = 72.0;
    s.distortion.luminosity_ramp_amplitude = 0.3;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown synth scenario '" + name + "'");
  }
  return s;
}

PipelineConfig PipelineConfig::from(const KeyValueConfig& kv) {
  PipelineConfig cfg;
  if (const auto scenario = kv.get("synth.scenario")) cfg.synth = scenario_settings(*scenario);
  for (const auto& [key, value] : kv.values()) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    }
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  PipelineConfig cfg = from(KeyValueConfig::load(path));
  if (!cfg.cells_path.empty() && cfg.cells_path.is_relative()) {
    cfg.cells_path = path.parent_path() / cfg.cells_path;
  }
  return cfg;
}

void PipelineConfig::validate() const {
  stft.validate();
  fit::FitConfig probe = fit;
  probe.vertex_count = std::max<std::size_t>(2, vertex_count);
  probe.validate();
  if (vertex_count == 1) throw Error(ErrorCode::kInvalidConfig, "fit.vertex_count must be 0 or >= 2");
  if (!(vertex_spacing_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "fit.vertex_spacing_seconds must be positive");
  }
  synth.distortion.validate();
  if (!(synth.duration > 0.0) || synth.width <= 0 || synth.height <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "synth duration and frame size must be positive");
  }
}

fit::FitConfig PipelineConfig::fit_for_duration(double seconds) const {
  fit::FitConfig f = fit;
  f.vertex_count =
      vertex_count != 0 ? vertex_count : fit::vertices_for_duration(seconds, vertex_spacing_seconds);
  return f;
}

std::vector<roi::CellSpec> PipelineConfig::cells() const {
  return cells_path.empty() ? roi::default_cells() : io::read_cells(cells_path);
}

KeyValueConfig PipelineConfig::to_key_values() const {
  KeyValueConfig kv;
  auto num = [](double v) { return io::format_number(v); };
  kv.set("stft.window_length", std::to_string(stft.window_length));
  kv.set("stft.stride", std::to_string(stft.stride));
  kv.set("stft.tukey_shape", num(stft.tukey_shape));
  kv.set("stft.frame_rate", num(stft.frame_rate));
  kv.set("stft.band_low", num(stft.band_low));
  kv.set("stft.band_high", num(stft.band_high));
  kv.set("stft.noise_threshold", num(stft.noise_threshold));
  kv.set("fit.vertex_count", std::to_string(vertex_count));
  kv.set("fit.vertex_spacing_seconds", num(vertex_spacing_seconds));
  kv.set("fit.alpha", num(fit.alpha));
  kv.set("fit.beta", num(fit.beta));
  kv.set("fit.r", num(fit.r));
  kv.set("fit.learning_rate", num(fit.learning_rate));
  kv.set("fit.max_iterations", std::to_string(fit.max_iterations));
  kv.set("fit.convergence_tol", num(fit.convergence_tol));
  kv.set("fit.convergence_patience", std::to_string(fit.convergence_patience));
  kv.set("fit.smoothing_epsilon", num(fit.smoothing_epsilon));
  kv.set("roi.cells", cells_path.empty() ? std::string("<built-in>") : cells_path.string());
  kv.set("roi.normalize_by_pixel_count", normalize_by_pixel_count ? "true" : "false");
  return kv;
}

}  // namespace rppg
