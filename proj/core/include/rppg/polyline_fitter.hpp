#pragma once

// Ridge polyline fitting over a normalized spectrogram.
//
// Vertex x positions are fixed and equidistant over the column range
// [0, L-1]; the y positions (fractional frequency-bin units, clamped to
// [0, K-1]) are optimized with ADAM against
//
//   loss   = alpha * smooth - ridge / alpha
//   smooth = sum_m |y[m+1] - y[m]|^beta
//   ridge  = sum_m ( sum_k w(k, m) * C(k, m) )^2
//   w(k,m) = 1 / (1 + (k - y[m])^2 / (K r^2))
//   C(k,m) = sum of P(k, l) over columns l in [round(x[m]) - p, round(x[m]) + p],
//            clipped to [0, L-1]
//
// where p is half the vertex spacing in columns, rounded. The gradient is
// taken of the smoothed form with |d|^beta replaced by (d^2 + eps^2)^(beta/2).

#include <cstddef>
#include <span>
#include <vector>

#include "rppg/curve.hpp"
#include "rppg/spectrogram.hpp"

namespace rppg::fit {

struct FitConfig {
  std::size_t vertex_count = 2;
  double alpha = 1.0;
  double beta = 2.0;
  double r = 0.25;
  double learning_rate = 0.5;  // bins
  int max_iterations = 300;
  double convergence_tol = 0.01;  // bins
  // consecutive calm steps needed; a single small Adam step can be a turnaround
  int convergence_patience = 5;
  double smoothing_epsilon = 1e-3;

  /// Throws InvalidConfig.
  void validate() const;
};

/// One vertex per `spacing_seconds` of signal, at least 2.
std::size_t vertices_for_duration(double seconds, double spacing_seconds = 10.0);

class Polyline {
 public:
  Polyline() = default;
  /// xs strictly increasing, xs.size() == ys.size() >= 2, half_span >= 0.
  Polyline(std::vector<double> xs, std::vector<double> ys, int half_span);

  /// M equidistant vertices over columns [0, columns-1], all at height y.
  static Polyline equidistant(std::size_t columns, std::size_t vertex_count, double y);

  std::size_t size() const noexcept { return xs_.size(); }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  int half_span() const noexcept { return half_span_; }

  /// Center column of vertex m's summation window.
  std::size_t center_column(std::size_t m) const;

  void set_ys(std::span<const double> ys);
  void clamp_ys(double lo, double hi);

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  int half_span_ = 0;
};

struct LossTerms {
  double smoothness = 0.0;  // sum |dy|^beta (or its smoothed form)
  double ridge = 0.0;       // sum of squared weighted window sums
  double total = 0.0;       // alpha * smoothness - ridge / alpha
};

/// Precomputed window sums C(k, m) for one (spectrogram, vertex layout) pair;
/// they do not depend on the vertex heights.
class RidgeObjective {
 public:
  RidgeObjective(const spectral::Spectrogram& spec, const Polyline& layout,
                 const FitConfig& config);

  std::size_t bins() const noexcept { return bins_; }
  std::size_t vertices() const noexcept { return vertices_; }

  /// epsilon == 0 evaluates |dy|^beta exactly.
  LossTerms evaluate(std::span<const double> ys, double epsilon) const;

  /// Gradient of evaluate(ys, epsilon).total with respect to ys.
  void gradient(std::span<const double> ys, double epsilon, std::span<double> out) const;

  /// C(k, m), row-major K x M.
  std::span<const double> window_sums() const noexcept { return sums_; }

 private:
  std::size_t bins_ = 0;
  std::size_t vertices_ = 0;
  double alpha_ = 1.0;
  double beta_ = 2.0;
  double width_sq_ = 1.0;  // K * r^2
  std::vector<double> sums_;
};

/// Adaptive moment estimation with the canonical constants.
struct AdamState {
  explicit AdamState(std::size_t parameters);

  /// Returns the update to subtract from the parameters.
  std::vector<double> step(std::span<const double> gradient, double learning_rate);

  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long iteration = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Power-weighted frequency centroid over the whole spectrogram, in bins.
/// Throws EmptySpectrogram when every value is zero.
double centroid_bin(const spectral::Spectrogram& spec);

/// Flat polyline at the centroid. Throws EmptySpectrogram, and
/// InvalidArgument for fewer than two columns.
Polyline init_polyline(const spectral::Spectrogram& spec, const FitConfig& config);

/// Exact loss (no smoothing).
double loss(const Polyline& poly, const spectral::Spectrogram& spec, const FitConfig& config);

LossTerms loss_terms(const Polyline& poly, const spectral::Spectrogram& spec,
                     const FitConfig& config, double epsilon);

/// Loss with the smoothed |dy|^beta term; grad_loss is its gradient.
double smoothed_loss(const Polyline& poly, const spectral::Spectrogram& spec,
                     const FitConfig& config);

std::vector<double> grad_loss(const Polyline& poly, const spectral::Spectrogram& spec,
                              const FitConfig& config);

struct FitResult {
  Polyline polyline;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;  // smoothed loss at the initial point and every iterate
};

FitResult fit(const spectral::Spectrogram& spec, const FitConfig& config);

/// Linear interpolation of the polyline at every column, mapped to BPM.
HeartRateCurve sample_heart_rate(const Polyline& poly, const spectral::Spectrogram& spec);

/// w(k, m) for the given polyline, row-major K x M.
std::vector<double> weight_map(const Polyline& poly, const spectral::Spectrogram& spec,
                               const FitConfig& config);

/// Per-column argmax of the spectrogram mapped to BPM; zero columns are skipped.
HeartRateCurve argmax_curve(const spectral::Spectrogram& spec);

}  // namespace rppg::fit
