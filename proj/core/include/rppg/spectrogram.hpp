#pragma once

// Short-time Fourier analysis of the aggregated a* signal.
//
// Each column is one window: the window mean is subtracted, the samples are
// multiplied by a Tukey window and the magnitude of an unnormalized DFT,
//   X[j] = sum_n x[n] exp(-2 pi i j n / N),
// is taken. Only bins whose center frequency j * frame_rate / N * 60 lies in
// [band_low, band_high] BPM are kept. With this convention Parseval reads
//   |X[0]|^2 + 2 sum_{0<j<N/2} |X[j]|^2 + |X[N/2]|^2 = N sum_n x[n]^2
// for even N.

#include <cstddef>
#include <span>
#include <vector>

namespace rppg::spectral {

struct StftConfig {
  int window_length = 512;
  int stride = 4;
  double tukey_shape = 0.5;
  double frame_rate = 30.0;
  double band_low = 50.0;    // BPM
  double band_high = 150.0;  // BPM
  double noise_threshold = 0.1;

  /// Throws InvalidConfig.
  void validate() const;
  double bin_width_bpm() const noexcept { return frame_rate / window_length * 60.0; }
};

/// K x L matrix of non-negative harmonic magnitudes, row k = frequency bin,
/// column l = time window.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::vector<double> freq_axis_bpm, std::vector<double> time_axis_s);
  Spectrogram(std::vector<double> freq_axis_bpm, std::vector<double> time_axis_s,
              std::vector<double> powers);

  std::size_t bins() const noexcept { return freq_axis_.size(); }
  std::size_t columns() const noexcept { return time_axis_.size(); }

  double& operator()(std::size_t k, std::size_t l) { return powers_[k * columns() + l]; }
  double operator()(std::size_t k, std::size_t l) const { return powers_[k * columns() + l]; }

  std::span<const double> powers() const noexcept { return powers_; }
  std::span<double> powers() noexcept { return powers_; }
  std::span<const double> freq_axis() const noexcept { return freq_axis_; }
  std::span<const double> time_axis() const noexcept { return time_axis_; }

  /// Maps a fractional bin coordinate to BPM by linear interpolation of the
  /// frequency axis (extrapolating with the edge spacing).
  double bin_to_bpm(double bin) const;

  bool all_zero() const noexcept;

 private:
  std::vector<double> freq_axis_;
  std::vector<double> time_axis_;
  std::vector<double> powers_;
};

/// Tukey (tapered cosine) window, symmetric form over n = 0..length-1.
/// shape 0 is rectangular, shape 1 is Hann.
std::vector<double> tukey_window(std::size_t length, double shape);

/// |X[j]| for j = 0..N/2 of the unnormalized DFT of `samples`.
std::vector<double> magnitude_spectrum(std::span<const double> samples);

/// Number of windows for a signal of `samples` length.
std::size_t column_count(std::size_t samples, const StftConfig& config);

/// Band-cropped magnitude spectrogram (not normalized). Throws
/// SignalTooShort when the signal is shorter than one window.
Spectrogram compute_spectrogram(std::span<const double> signal, const StftConfig& config);

/// Divides every column by its maximum; all-zero columns stay zero.
Spectrogram normalize_columns(Spectrogram spec);

/// Zeroes values strictly below `threshold`.
Spectrogram threshold_noise(Spectrogram spec, double threshold);

/// compute -> normalize -> threshold.
Spectrogram analyze(std::span<const double> signal, const StftConfig& config);

}  // namespace rppg::spectral
