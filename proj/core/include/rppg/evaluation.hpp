#pragma once

#include <span>
#include <vector>

#include "rppg/curve.hpp"
#include "rppg/spectrogram.hpp"

namespace rppg::eval {

/// Contact-PPG reflected-light amplitude recording.
struct ReferenceRecording {
  std::vector<double> samples;
  double sample_rate = 0.0;   // Hz
  double start_offset = 0.0;  // seconds relative to video start
};

struct PairedSamples {
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<double> reference;

  std::size_t size() const noexcept { return times.size(); }
};

/// Analysis config for a recording at `sample_rate`: window length and
/// stride are rescaled so the window spans the same duration as the video
/// config.
spectral::StftConfig scale_config(const spectral::StftConfig& video, double sample_rate);

/// Per-column argmax of the band-limited spectrogram of the recording.
/// Throws SignalTooShort, and EmptySpectrogram when no column has energy.
HeartRateCurve reference_hr(const ReferenceRecording& rec, const spectral::StftConfig& video);

/// Reference linearly interpolated onto the video timestamps; video samples
/// outside the reference span are dropped. Throws NoOverlap.
PairedSamples align(const HeartRateCurve& video, const HeartRateCurve& reference);

/// Mean absolute BPM difference. Throws EmptyPairing.
double mae(const PairedSamples& pairs);

/// Arithmetic mean of per-experiment MAEs. Throws EmptyPairing when empty.
double mean_mae(std::span<const double> maes);

}  // namespace rppg::eval
