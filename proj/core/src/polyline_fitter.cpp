#include "rppg/polyline_fitter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rppg/error.hpp"

namespace rppg::fit {

void FitConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (vertex_count < 2) fail("fit.vertex_count must be at least 2");
  if (!(alpha > 0.0)) fail("fit.alpha must be positive");
  if (!(beta > 0.0)) fail("fit.beta must be positive");
  if (!(r > 0.0)) fail("fit.r must be positive");
  if (!(learning_rate > 0.0)) fail("fit.learning_rate must be positive");
  if (max_iterations < 1) fail("fit.max_iterations must be at least 1");
  if (!(convergence_tol >= 0.0)) fail("fit.convergence_tol must be non-negative");
  if (!(smoothing_epsilon > 0.0)) fail("fit.smoothing_epsilon must be positive");
  if (convergence_patience < 1) fail("fit.convergence_patience must be at least 1");
}

std::size_t vertices_for_duration(double seconds, double spacing_seconds) {
  if (!(spacing_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "vertex spacing must be positive");
  }
  const double count = std::round(seconds / spacing_seconds);
  return count < 2.0 ? 2 : static_cast<std::size_t>(count);
}

Polyline::Polyline(std::vector<double> xs, std::vector<double> ys, int half_span)
    : xs_(std::move(xs)), ys_(std::move(ys)), half_span_(half_span) {
  if (xs_.size() < 2 || xs_.size() != ys_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "polyline needs matching xs/ys with at least 2 vertices");
  }
  for (std::size_t m = 1; m < xs_.size(); ++m) {
    if (!(xs_[m] > xs_[m - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "polyline xs must be strictly increasing");
    }
  }
  if (half_span_ < 0) throw Error(ErrorCode::kInvalidArgument, "half span must be non-negative");
}

Polyline Polyline::equidistant(std::size_t columns, std::size_t vertex_count, double y) {
  if (columns < 2) {
    throw Error(ErrorCode::kInvalidArgument, "polyline needs a spectrogram with at least 2 columns");
  }
  if (vertex_count < 2) throw Error(ErrorCode::kInvalidArgument, "polyline needs at least 2 vertices");
  const double spacing = static_cast<double>(columns - 1) / static_cast<double>(vertex_count - 1);
  std::vector<double> xs(vertex_count);
  for (std::size_t m = 0; m < vertex_count; ++m) xs[m] = static_cast<double>(m) * spacing;
  xs.back() = static_cast<double>(columns - 1);
  return Polyline(std::move(xs), std::vector<double>(vertex_count, y),
                  static_cast<int>(std::lround(spacing / 2.0)));
}

std::size_t Polyline::center_column(std::size_t m) const {
  const long c = std::lround(xs_[m]);
  return c < 0 ? 0 : static_cast<std::size_t>(c);
}

void Polyline::set_ys(std::span<const double> ys) {
  if (ys.size() != ys_.size()) throw Error(ErrorCode::kInvalidArgument, "vertex count mismatch");
  std::copy(ys.begin(), ys.end(), ys_.begin());
}

void Polyline::clamp_ys(double lo, double hi) {
  for (double& y : ys_) y = std::clamp(y, lo, hi);
}

RidgeObjective::RidgeObjective(const spectral::Spectrogram& spec, const Polyline& layout,
                               const FitConfig& config)
    : bins_(spec.bins()),
      vertices_(layout.size()),
      alpha_(config.alpha),
      beta_(config.beta),
      width_sq_(static_cast<double>(spec.bins()) * config.r * config.r),
      sums_(spec.bins() * layout.size(), 0.0) {
  const std::size_t columns = spec.columns();
  if (columns == 0 || bins_ == 0) throw Error(ErrorCode::kInvalidArgument, "empty spectrogram");
  const long p = layout.half_span();
  for (std::size_t m = 0; m < vertices_; ++m) {
    const long center = static_cast<long>(std::min(layout.center_column(m), columns - 1));
    const auto first = static_cast<std::size_t>(std::max(0L, center - p));
    const auto last = static_cast<std::size_t>(std::min(static_cast<long>(columns) - 1, center + p));
    for (std::size_t k = 0; k < bins_; ++k) {
      double acc = 0.0;
      for (std::size_t l = first; l <= last; ++l) acc += spec(k, l);
      sums_[k * vertices_ + m] = acc;
    }
  }
}

LossTerms RidgeObjective::evaluate(std::span<const double> ys, double epsilon) const {
  if (ys.size() != vertices_) throw Error(ErrorCode::kInvalidArgument, "vertex count mismatch");
  LossTerms terms;
  for (std::size_t m = 0; m + 1 < vertices_; ++m) {
    const double d = ys[m + 1] - ys[m];
    terms.smoothness += epsilon == 0.0 ? std::pow(std::abs(d), beta_)
                                       : std::pow(d * d + epsilon * epsilon, beta_ / 2.0);
  }
  for (std::size_t m = 0; m < vertices_; ++m) {
    double weighted = 0.0;
    for (std::size_t k = 0; k < bins_; ++k) {
      const double dk = static_cast<double>(k) - ys[m];
      weighted += sums_[k * vertices_ + m] / (1.0 + dk * dk / width_sq_);
    }
    terms.ridge += weighted * weighted;
  }
  terms.total = alpha_ * terms.smoothness - terms.ridge / alpha_;
  return terms;
}

void RidgeObjective::gradient(std::span<const double> ys, double epsilon,
                              std::span<double> out) const {
  if (ys.size() != vertices_ || out.size() != vertices_) {
    throw Error(ErrorCode::kInvalidArgument, "vertex count mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t m = 0; m + 1 < vertices_; ++m) {
    const double d = ys[m + 1] - ys[m];
    double slope = 0.0;
    if (epsilon > 0.0) {
      slope = beta_ * d * std::pow(d * d + epsilon * epsilon, beta_ / 2.0 - 1.0);
    } else if (d != 0.0) {
      slope = beta_ * std::pow(std::abs(d), beta_ - 1.0) * (d > 0.0 ? 1.0 : -1.0);
    }
    out[m] -= alpha_ * slope;
    out[m + 1] += alpha_ * slope;
  }
  for (std::size_t m = 0; m < vertices_; ++m) {
    double weighted = 0.0;
    double weighted_slope = 0.0;
    for (std::size_t k = 0; k < bins_; ++k) {
      const double dk = static_cast<double>(k) - ys[m];
      const double w = 1.0 / (1.0 + dk * dk / width_sq_);
      const double c = sums_[k * vertices_ + m];
      weighted += w * c;
      weighted_slope += c * 2.0 * w * w * dk / width_sq_;
    }
    out[m] -= 2.0 * weighted * weighted_slope / alpha_;
  }
}

AdamState::AdamState(std::size_t parameters)
    : first_moment(parameters, 0.0), second_moment(parameters, 0.0) {}

std::vector<double> AdamState::step(std::span<const double> gradient, double learning_rate) {
  if (gradient.size() != first_moment.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient size mismatch");
  }
  ++iteration;
  const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(iteration));
  const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(iteration));
  std::vector<double> update(gradient.size());
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    first_moment[i] = beta1 * first_moment[i] + (1.0 - beta1) * gradient[i];
    second_moment[i] = beta2 * second_moment[i] + (1.0 - beta2) * gradient[i] * gradient[i];
    const double m_hat = first_moment[i] / correction1;
    const double v_hat = second_moment[i] / correction2;
    update[i] = learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
  }
  return update;
}

double centroid_bin(const spectral::Spectrogram& spec) {
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < spec.bins(); ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < spec.columns(); ++l) row += spec(k, l);
    weighted += static_cast<double>(k) * row;
    total += row;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kEmptySpectrogram, "spectrogram has no energy");
  return weighted / total;
}

Polyline init_polyline(const spectral::Spectrogram& spec, const FitConfig& config) {
  if (spec.columns() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "fitting needs at least 2 spectrogram columns");
  }
  return Polyline::equidistant(spec.columns(), config.vertex_count, centroid_bin(spec));
}

LossTerms loss_terms(const Polyline& poly, const spectral::Spectrogram& spec,
                     const FitConfig& config, double epsilon) {
  return RidgeObjective(spec, poly, config).evaluate(poly.ys(), epsilon);
}

double loss(const Polyline& poly, const spectral::Spectrogram& spec, const FitConfig& config) {
  return loss_terms(poly, spec, config, 0.0).total;
}

double smoothed_loss(const Polyline& poly, const spectral::Spectrogram& spec,
                     const FitConfig& config) {
  return loss_terms(poly, spec, config, config.smoothing_epsilon).total;
}

std::vector<double> grad_loss(const Polyline& poly, const spectral::Spectrogram& spec,
                              const FitConfig& config) {
  std::vector<double> g(poly.size());
  RidgeObjective(spec, poly, config).gradient(poly.ys(), config.smoothing_epsilon, g);
  return g;
}

FitResult fit(const spectral::Spectrogram& spec, const FitConfig& config) {
  config.validate();
  Polyline poly = init_polyline(spec, config);
  const RidgeObjective objective(spec, poly, config);
  const double y_max = static_cast<double>(spec.bins() - 1);
  const double eps = config.smoothing_epsilon;

  FitResult result{poly, 0, false, {}};
  result.loss_history.push_back(objective.evaluate(poly.ys(), eps).total);

  AdamState adam(poly.size());
  std::vector<double> grad(poly.size());
  std::vector<double> next(poly.size());
  int calm = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    objective.gradient(poly.ys(), eps, grad);
    const std::vector<double> update = adam.step(grad, config.learning_rate);
    double moved = 0.0;
    for (std::size_t m = 0; m < poly.size(); ++m) {
      next[m] = std::clamp(poly.ys()[m] - update[m], 0.0, y_max);
      moved = std::max(moved, std::abs(next[m] - poly.ys()[m]));
    }
    poly.set_ys(next);
    result.loss_history.push_back(objective.evaluate(poly.ys(), eps).total);
    result.iterations = it;
    calm = moved < config.convergence_tol ? calm + 1 : 0;
    if (calm >= config.convergence_patience) {
      result.converged = true;
      break;
    }
  }
  result.polyline = std::move(poly);
  return result;
}

HeartRateCurve sample_heart_rate(const Polyline& poly, const spectral::Spectrogram& spec) {
  HeartRateCurve curve;
  const auto xs = poly.xs();
  const auto ys = poly.ys();
  curve.times.assign(spec.time_axis().begin(), spec.time_axis().end());
  curve.bpm.reserve(spec.columns());
  std::size_t seg = 0;
  for (std::size_t l = 0; l < spec.columns(); ++l) {
    const double x = static_cast<double>(l);
    while (seg + 2 < xs.size() && x >= xs[seg + 1]) ++seg;
    double y = 0.0;
    if (x <= xs.front()) {
      y = ys.front();
    } else if (x >= xs.back()) {
      y = ys.back();
    } else {
      y = ys[seg] + (ys[seg + 1] - ys[seg]) * (x - xs[seg]) / (xs[seg + 1] - xs[seg]);
    }
    curve.bpm.push_back(spec.bin_to_bpm(y));
  }
  return curve;
}

std::vector<double> weight_map(const Polyline& poly, const spectral::Spectrogram& spec,
                               const FitConfig& config) {
  const std::size_t bins = spec.bins();
  const std::size_t vertices = poly.size();
  const double width_sq = static_cast<double>(bins) * config.r * config.r;
  std::vector<double> w(bins * vertices);
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t m = 0; m < vertices; ++m) {
      const double dk = static_cast<double>(k) - poly.ys()[m];
      w[k * vertices + m] = 1.0 / (1.0 + dk * dk / width_sq);
    }
  }
  return w;
}

HeartRateCurve argmax_curve(const spectral::Spectrogram& spec) {
  HeartRateCurve curve;
  for (std::size_t l = 0; l < spec.columns(); ++l) {
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      if (spec(k, l) > best_value) {
        best_value = spec(k, l);
        best = k;
      }
    }
    if (best_value <= 0.0) continue;
    curve.times.push_back(spec.time_axis()[l]);
    curve.bpm.push_back(spec.freq_axis()[best]);
  }
  return curve;
}

}  // namespace rppg::fit
