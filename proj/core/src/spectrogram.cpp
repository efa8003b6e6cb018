#include "rppg/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "rppg/error.hpp"

namespace rppg::spectral {

void StftConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (window_length < 2) fail("stft.window_length must be at least 2");
  if (stride <= 0 || stride > window_length) fail("stft.stride must be in (0, window_length]");
  if (!(tukey_shape >= 0.0 && tukey_shape <= 1.0)) fail("stft.tukey_shape must be in [0, 1]");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) fail("stft.frame_rate must be positive");
  if (!(band_low >= 0.0) || !(band_low < band_high) || !std::isfinite(band_high)) {
    fail("stft.band_low must be non-negative and below stft.band_high");
  }
  if (!(noise_threshold >= 0.0 && noise_threshold < 1.0)) {
    fail("stft.noise_threshold must be in [0, 1)");
  }
}

Spectrogram::Spectrogram(std::vector<double> freq_axis_bpm, std::vector<double> time_axis_s)
    : freq_axis_(std::move(freq_axis_bpm)),
      time_axis_(std::move(time_axis_s)),
      powers_(freq_axis_.size() * time_axis_.size(), 0.0) {}

Spectrogram::Spectrogram(std::vector<double> freq_axis_bpm, std::vector<double> time_axis_s,
                         std::vector<double> powers)
    : freq_axis_(std::move(freq_axis_bpm)),
      time_axis_(std::move(time_axis_s)),
      powers_(std::move(powers)) {
  if (powers_.size() != freq_axis_.size() * time_axis_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "spectrogram matrix does not match its axes");
  }
}

double Spectrogram::bin_to_bpm(double bin) const {
  if (freq_axis_.empty()) throw Error(ErrorCode::kInvalidArgument, "spectrogram has no bins");
  if (freq_axis_.size() == 1) return freq_axis_.front();
  const std::size_t last = freq_axis_.size() - 1;
  const std::size_t k =
      std::min(last - 1, static_cast<std::size_t>(std::clamp(std::floor(bin), 0.0,
                                                            static_cast<double>(last))));
  const double frac = bin - static_cast<double>(k);
  return freq_axis_[k] + frac * (freq_axis_[k + 1] - freq_axis_[k]);
}

bool Spectrogram::all_zero() const noexcept {
  return std::all_of(powers_.begin(), powers_.end(), [](double v) { return v == 0.0; });
}

std::vector<double> tukey_window(std::size_t length, double shape) {
  if (length < 2) throw Error(ErrorCode::kInvalidArgument, "window length must be at least 2");
  if (!(shape >= 0.0 && shape <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Tukey shape must be in [0, 1]");
  }
  std::vector<double> w(length, 1.0);
  if (shape == 0.0) return w;
  const double span = static_cast<double>(length - 1);
  // Rising taper on the first half, mirrored onto the second.
  for (std::size_t n = 0; n <= (length - 1) / 2; ++n) {
    const double x = static_cast<double>(n) / span;
    if (x < shape / 2.0) {
      const double v = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x / shape));
      w[n] = v;
      w[length - 1 - n] = v;
    }
  }
  return w;
}

std::vector<double> magnitude_spectrum(std::span<const double> samples) {
  detail::RealFft fft(samples.size());
  std::vector<double> out(fft.bins());
  fft.magnitudes(samples, out);
  return out;
}

std::size_t column_count(std::size_t samples, const StftConfig& config) {
  const auto window = static_cast<std::size_t>(config.window_length);
  if (samples < window) return 0;
  return (samples - window) / static_cast<std::size_t>(config.stride) + 1;
}

Spectrogram compute_spectrogram(std::span<const double> signal, const StftConfig& config) {
  config.validate();
  const auto window = static_cast<std::size_t>(config.window_length);
  const auto stride = static_cast<std::size_t>(config.stride);
  if (signal.size() < window) {
    throw Error(ErrorCode::kSignalTooShort,
                "signal has " + std::to_string(signal.size()) + " samples, window needs " +
                    std::to_string(window));
  }
  for (double v : signal) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "signal has non-finite samples");
  }

  std::size_t first_bin = 0;
  std::vector<double> freqs;
  for (std::size_t j = 0; j <= window / 2; ++j) {
    const double bpm = static_cast<double>(j) * config.frame_rate * 60.0 / static_cast<double>(window);
    if (bpm >= config.band_low && bpm <= config.band_high) {
      if (freqs.empty()) first_bin = j;
      freqs.push_back(bpm);
    }
  }
  if (freqs.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no frequency bin falls inside the band");
  }

  const std::size_t columns = column_count(signal.size(), config);
  std::vector<double> times(columns);
  for (std::size_t l = 0; l < columns; ++l) {
    times[l] = (static_cast<double>(l * stride) + static_cast<double>(window - 1) / 2.0) /
               config.frame_rate;
  }

  Spectrogram spec(std::move(freqs), std::move(times));
  const std::vector<double> taper = tukey_window(window, config.tukey_shape);
  detail::RealFft fft(window);
  std::vector<double> buffer(window);
  std::vector<double> mags(fft.bins());

  for (std::size_t l = 0; l < columns; ++l) {
    const auto segment = signal.subspan(l * stride, window);
    double sum = 0.0;
    double peak = 0.0;
    for (double v : segment) {
      sum += v;
      peak = std::max(peak, std::abs(v));
    }
    const double mean = sum / static_cast<double>(window);
    for (std::size_t n = 0; n < window; ++n) buffer[n] = (segment[n] - mean) * taper[n];
    fft.magnitudes(buffer, mags);

    // Rounding residue of the mean subtraction is not signal.
    const double floor = 1e-12 * static_cast<double>(window) * peak;
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      const double m = mags[first_bin + k];
      spec(k, l) = m > floor ? m : 0.0;
    }
  }
  return spec;
}

Spectrogram normalize_columns(Spectrogram spec) {
  for (std::size_t l = 0; l < spec.columns(); ++l) {
    double peak = 0.0;
    for (std::size_t k = 0; k < spec.bins(); ++k) peak = std::max(peak, spec(k, l));
    if (peak <= 0.0) continue;
    for (std::size_t k = 0; k < spec.bins(); ++k) spec(k, l) /= peak;
  }
  return spec;
}

Spectrogram threshold_noise(Spectrogram spec, double threshold) {
  for (double& v : spec.powers()) {
    if (v < threshold) v = 0.0;
  }
  return spec;
}

Spectrogram analyze(std::span<const double> signal, const StftConfig& config) {
  return threshold_noise(normalize_columns(compute_spectrogram(signal, config)),
                         config.noise_threshold);
}

}  // namespace rppg::spectral
