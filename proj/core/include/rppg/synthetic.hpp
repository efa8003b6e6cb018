#pragma once

// Ground-truth-controlled synthetic inputs for verification.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rppg/color_space.hpp"
#include "rppg/curve.hpp"
#include "rppg/roi_sampler.hpp"

namespace rppg::synth {

/// Piecewise-linear heart rate; held constant outside the breakpoints.
class HrTrajectory {
 public:
  explicit HrTrajectory(std::vector<std::pair<double, double>> breakpoints);

  static HrTrajectory constant(double bpm);
  static HrTrajectory ramp(double t0, double bpm0, double t1, double bpm1);

  double bpm_at(double t) const;
  const std::vector<std::pair<double, double>>& breakpoints() const noexcept {
    return breakpoints_;
  }

  /// Throws InvalidConfig when any breakpoint leaves [low, high].
  void validate_band(double low, double high) const;

  HeartRateCurve sample(std::span<const double> times) const;

 private:
  std::vector<std::pair<double, double>> breakpoints_;  // (seconds, bpm)
};

struct DistortionSpec {
  double additive_noise_sigma = 0.0;       // a* units, white Gaussian per frame
  double luminosity_ramp_amplitude = 0.0;  // brightness factor sweeps 1-A .. 1+A
  double motion_spike_rate = 0.0;          // events per minute, Poisson
  double motion_spike_amplitude = 0.0;     // a* units, Gaussian bump peak

  void validate() const;
};

/// Gaussian bump width (standard deviation) of one motion spike.
inline constexpr double kMotionSpikeWidthSeconds = 0.15;

/// Unit-amplitude sinusoid following the trajectory (phase accumulated per
/// frame) plus the signal-domain distortions. Deterministic per seed.
roi::CellSignalSeries generate_signal(const HrTrajectory& trajectory, double frame_rate,
                                      double duration, const DistortionSpec& distortion,
                                      std::uint64_t seed);

/// Brightness factor applied to linear RGB at time t.
double luminosity_factor(const DistortionSpec& distortion, double t, double duration);

struct FrameGeometry {
  int width = 64;
  int height = 64;
  std::vector<roi::Point2> landmarks;  // normalized, static over the recording
  std::vector<roi::CellSpec> cells;
  color::Lab base_color{62.0, 16.0, 18.0};  // skin tone
  double pulse_amplitude = 2.0;             // a* units per unit signal
  double pixel_dither = 0.6;                // a* units, per-pixel Gaussian
};

/// 64x64 geometry with 468 landmarks laid out so that default_cells() are
/// non-overlapping quads on a stylized face.
FrameGeometry default_geometry();

struct SyntheticVideo {
  std::vector<color::RgbFrame> frames;
  std::vector<roi::LandmarkFrame> landmarks;
  std::vector<double> signal;  // generate_signal samples used for the frames
  double frame_rate = 0.0;
};

/// Renders frames one at a time, so long recordings can be streamed.
class FrameSynthesizer {
 public:
  FrameSynthesizer(const HrTrajectory& trajectory, double frame_rate, double duration,
                   const DistortionSpec& distortion, FrameGeometry geometry,
                   std::uint64_t seed);

  std::size_t frame_count() const noexcept { return signal_.samples.size(); }
  double frame_rate() const noexcept { return signal_.frame_rate; }
  const roi::CellSignalSeries& signal() const noexcept { return signal_; }
  const FrameGeometry& geometry() const noexcept { return geometry_; }

  color::RgbFrame frame(std::size_t index) const;
  roi::LandmarkFrame landmarks(std::size_t index) const;

 private:
  DistortionSpec distortion_;
  FrameGeometry geometry_;
  roi::CellSignalSeries signal_;
  double duration_ = 0.0;
  std::uint64_t seed_ = 0;
};

SyntheticVideo generate_frames(const HrTrajectory& trajectory, double frame_rate,
                               double duration, const DistortionSpec& distortion,
                               const FrameGeometry& geometry, std::uint64_t seed);

}  // namespace rppg::synth
