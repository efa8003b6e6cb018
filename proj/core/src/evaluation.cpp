#include "rppg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rppg/error.hpp"
#include "rppg/polyline_fitter.hpp"

namespace rppg::eval {

spectral::StftConfig scale_config(const spectral::StftConfig& video, double sample_rate) {
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "reference sample rate must be positive");
  }
  spectral::StftConfig cfg = video;
  const double ratio = sample_rate / video.frame_rate;
  cfg.frame_rate = sample_rate;
  cfg.window_length = std::max(2, static_cast<int>(std::lround(video.window_length * ratio)));
  cfg.stride = std::clamp(static_cast<int>(std::lround(video.stride * ratio)), 1, cfg.window_length);
  return cfg;
}

HeartRateCurve reference_hr(const ReferenceRecording& rec, const spectral::StftConfig& video) {
  const spectral::StftConfig cfg = scale_config(video, rec.sample_rate);
  const spectral::Spectrogram spec = spectral::compute_spectrogram(rec.samples, cfg);
  HeartRateCurve curve = fit::argmax_curve(spec);
  if (curve.empty()) {
    throw Error(ErrorCode::kEmptySpectrogram, "reference recording shows no heart-rate ridge");
  }
  for (double& t : curve.times) t += rec.start_offset;
  return curve;
}

PairedSamples align(const HeartRateCurve& video, const HeartRateCurve& reference) {
  if (video.times.size() != video.bpm.size() || reference.times.size() != reference.bpm.size()) {
    throw Error(ErrorCode::kInvalidArgument, "curve times and values differ in length");
  }
  PairedSamples pairs;
  if (reference.empty() || video.empty()) {
    throw Error(ErrorCode::kNoOverlap, "curves do not overlap in time");
  }
  const auto& rt = reference.times;
  for (std::size_t i = 0; i < video.size(); ++i) {
    const double t = video.times[i];
    if (t < rt.front() || t > rt.back()) continue;
    const auto it = std::lower_bound(rt.begin(), rt.end(), t);
    const auto j = static_cast<std::size_t>(it - rt.begin());
    double value = 0.0;
    if (rt[j] == t) {
      value = reference.bpm[j];
    } else {
      const double frac = (t - rt[j - 1]) / (rt[j] - rt[j - 1]);
      value = reference.bpm[j - 1] + frac * (reference.bpm[j] - reference.bpm[j - 1]);
    }
    pairs.times.push_back(t);
    pairs.estimate.push_back(video.bpm[i]);
    pairs.reference.push_back(value);
  }
  if (pairs.times.empty()) throw Error(ErrorCode::kNoOverlap, "curves do not overlap in time");
  return pairs;
}

double mae(const PairedSamples& pairs) {
  if (pairs.size() == 0) throw Error(ErrorCode::kEmptyPairing, "no paired samples");
  double acc = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    acc += std::abs(pairs.estimate[i] - pairs.reference[i]);
  }
  return acc / static_cast<double>(pairs.size());
}

double mean_mae(std::span<const double> maes) {
  if (maes.empty()) throw Error(ErrorCode::kEmptyPairing, "no experiments to average");
  return std::accumulate(maes.begin(), maes.end(), 0.0) / static_cast<double>(maes.size());
}

}  // namespace rppg::eval
