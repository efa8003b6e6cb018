#include "rppg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rppg/error.hpp"

namespace rppg::synth {
namespace {

constexpr int kFaceMeshPoints = 468;

// Face oval in normalized coordinates.
constexpr double kFaceCx = 0.5, kFaceCy = 0.52, kFaceRx = 0.42, kFaceRy = 0.47;

std::uint64_t frame_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

HrTrajectory::HrTrajectory(std::vector<std::pair<double, double>> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.empty()) throw Error(ErrorCode::kInvalidConfig, "trajectory needs a breakpoint");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const auto [t, bpm] = breakpoints_[i];
    if (!std::isfinite(t) || !std::isfinite(bpm) || bpm < 0.0) {
      throw Error(ErrorCode::kInvalidConfig, "trajectory breakpoints must be finite");
    }
    if (i > 0 && !(t > breakpoints_[i - 1].first)) {
      throw Error(ErrorCode::kInvalidConfig, "trajectory times must be strictly increasing");
    }
  }
}

HrTrajectory HrTrajectory::constant(double bpm) { return HrTrajectory({{0.0, bpm}}); }

HrTrajectory HrTrajectory::ramp(double t0, double bpm0, double t1, double bpm1) {
  return HrTrajectory({{t0, bpm0}, {t1, bpm1}});
}

double HrTrajectory::bpm_at(double t) const {
  if (t <= breakpoints_.front().first) return breakpoints_.front().second;
  if (t >= breakpoints_.back().first) return breakpoints_.back().second;
  const auto it = std::upper_bound(
      breakpoints_.begin(), breakpoints_.end(), t,
      [](double value, const std::pair<double, double>& bp) { return value < bp.first; });
  const auto& [t1, b1] = *it;
  const auto& [t0, b0] = *(it - 1);
  return b0 + (b1 - b0) * (t - t0) / (t1 - t0);
}

void HrTrajectory::validate_band(double low, double high) const {
  for (const auto& [t, bpm] : breakpoints_) {
    if (bpm < low || bpm > high) {
      throw Error(ErrorCode::kInvalidConfig,
                  "trajectory heart rate " + std::to_string(bpm) + " BPM is outside [" +
                      std::to_string(low) + ", " + std::to_string(high) + "]");
    }
  }
}

HeartRateCurve HrTrajectory::sample(std::span<const double> times) const {
  HeartRateCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.bpm.reserve(times.size());
  for (double t : times) curve.bpm.push_back(bpm_at(t));
  return curve;
}

void DistortionSpec::validate() const {
  if (!(additive_noise_sigma >= 0.0) || !(luminosity_ramp_amplitude >= 0.0) ||
      !(motion_spike_rate >= 0.0) || !(motion_spike_amplitude >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "distortion parameters must be non-negative");
  }
  if (luminosity_ramp_amplitude >= 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "luminosity ramp amplitude must be below 1");
  }
}

roi::CellSignalSeries generate_signal(const HrTrajectory& trajectory, double frame_rate,
                                      double duration, const DistortionSpec& distortion,
                                      std::uint64_t seed) {
  if (!(frame_rate > 0.0) || !(duration > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "frame rate and duration must be positive");
  }
  distortion.validate();
  const auto n = static_cast<std::size_t>(std::lround(duration * frame_rate));
  roi::CellSignalSeries series{0, std::vector<double>(n), frame_rate, n};

  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / frame_rate;
    series.samples[i] = std::sin(phase);
    phase += 2.0 * std::numbers::pi * trajectory.bpm_at(t) / 60.0 / frame_rate;
  }

  std::mt19937_64 rng(seed);
  if (distortion.additive_noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, distortion.additive_noise_sigma);
    for (double& v : series.samples) v += noise(rng);
  }
  if (distortion.motion_spike_rate > 0.0 && distortion.motion_spike_amplitude > 0.0) {
    std::poisson_distribution<int> count(distortion.motion_spike_rate * duration / 60.0);
    std::uniform_real_distribution<double> when(0.0, duration);
    const int spikes = count(rng);
    for (int s = 0; s < spikes; ++s) {
      const double center = when(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double z = (static_cast<double>(i) / frame_rate - center) / kMotionSpikeWidthSeconds;
        if (std::abs(z) > 8.0) continue;
        series.samples[i] += distortion.motion_spike_amplitude * std::exp(-0.5 * z * z);
      }
    }
  }
  return series;
}

double luminosity_factor(const DistortionSpec& distortion, double t, double duration) {
  if (distortion.luminosity_ramp_amplitude == 0.0 || !(duration > 0.0)) return 1.0;
  return 1.0 + distortion.luminosity_ramp_amplitude * (2.0 * t / duration - 1.0);
}

FrameGeometry default_geometry() {
  FrameGeometry g;
  g.landmarks.resize(kFaceMeshPoints);
  for (int i = 0; i < kFaceMeshPoints; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / kFaceMeshPoints;
    g.landmarks[static_cast<std::size_t>(i)] = {kFaceCx + 0.9 * kFaceRx * std::cos(angle),
                                                kFaceCy + 0.9 * kFaceRy * std::sin(angle)};
  }
  auto place = [&](std::size_t index, double x, double y) { g.landmarks[index] = {x, y}; };
  // forehead: 4 x 2 grid
  place(67, 0.28, 0.16);
  place(109, 0.43, 0.16);
  place(338, 0.57, 0.16);
  place(297, 0.72, 0.16);
  place(69, 0.28, 0.30);
  place(108, 0.43, 0.30);
  place(337, 0.57, 0.30);
  place(299, 0.72, 0.30);
  // cheeks
  place(117, 0.18, 0.48);
  place(118, 0.36, 0.48);
  place(101, 0.36, 0.66);
  place(50, 0.18, 0.66);
  place(347, 0.64, 0.48);
  place(346, 0.82, 0.48);
  place(280, 0.82, 0.66);
  place(330, 0.64, 0.66);
  // nose bridge
  place(193, 0.44, 0.34);
  place(417, 0.56, 0.34);
  place(351, 0.56, 0.52);
  place(122, 0.44, 0.52);
  // chin
  place(83, 0.40, 0.80);
  place(313, 0.60, 0.80);
  place(421, 0.58, 0.92);
  place(201, 0.42, 0.92);
  g.cells = roi::default_cells();
  return g;
}

FrameSynthesizer::FrameSynthesizer(const HrTrajectory& trajectory, double frame_rate,
                                   double duration, const DistortionSpec& distortion,
                                   FrameGeometry geometry, std::uint64_t seed)
    : distortion_(distortion),
      geometry_(std::move(geometry)),
      signal_(generate_signal(trajectory, frame_rate, duration, distortion, seed)),
      duration_(duration),
      seed_(seed) {
  if (geometry_.width <= 0 || geometry_.height <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "frame geometry must have positive size");
  }
}

color::RgbFrame FrameSynthesizer::frame(std::size_t index) const {
  if (index >= frame_count()) throw Error(ErrorCode::kInvalidArgument, "frame index out of range");
  const int w = geometry_.width;
  const int h = geometry_.height;
  const double t = static_cast<double>(index) / signal_.frame_rate;
  const double brightness = luminosity_factor(distortion_, t, duration_);
  const double target_a =
      geometry_.base_color.a + geometry_.pulse_amplitude * signal_.samples[index];

  std::mt19937_64 rng(frame_seed(seed_, index));
  std::normal_distribution<double> dither(0.0, 1.0);
  color::RgbFrame frame(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double nx = (x + 0.5) / w;
      const double ny = (y + 0.5) / h;
      const double ex = (nx - kFaceCx) / kFaceRx;
      const double ey = (ny - kFaceCy) / kFaceRy;
      double r = 0, g = 0, b = 0;
      if (ex * ex + ey * ey <= 1.0) {
        const color::Lab lab{geometry_.base_color.l,
                             target_a + geometry_.pixel_dither * dither(rng),
                             geometry_.base_color.b};
        color::lab_to_linear_rgb(lab, r, g, b);
      } else {
        r = g = b = color::srgb_to_linear(70);
      }
      auto encode = [&](double c) {
        const double v = std::round(color::linear_to_srgb(c * brightness) * 255.0);
        return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      };
      frame.at(x, y) = {encode(r), encode(g), encode(b)};
    }
  }
  return frame;
}

roi::LandmarkFrame FrameSynthesizer::landmarks(std::size_t index) const {
  return {static_cast<std::int64_t>(index), geometry_.landmarks, false};
}

SyntheticVideo generate_frames(const HrTrajectory& trajectory, double frame_rate,
                               double duration, const DistortionSpec& distortion,
                               const FrameGeometry& geometry, std::uint64_t seed) {
  const FrameSynthesizer synth(trajectory, frame_rate, duration, distortion, geometry, seed);
  SyntheticVideo video;
  video.frame_rate = frame_rate;
  video.signal = synth.signal().samples;
  video.frames.reserve(synth.frame_count());
  video.landmarks.reserve(synth.frame_count());
  for (std::size_t i = 0; i < synth.frame_count(); ++i) {
    video.frames.push_back(synth.frame(i));
    video.landmarks.push_back(synth.landmarks(i));
  }
  return video;
}

}  // namespace rppg::synth
