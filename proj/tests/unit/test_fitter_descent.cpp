// Per-step loss descent of the Adam fit.
//
// With beta1 = 0.9 the iterates behave like an underdamped heavy ball and
// ring around the ridge, so the loss at the iterate rises on a large share
// of steps. The 95% bound is kept as written and registered as an expected
// failure; FitDescent.SettlesAtBestVisitedLoss checks what does hold.

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>

#include "rppg/polyline_fitter.hpp"

namespace {

using namespace rppg::fit;
using rppg::spectral::Spectrogram;

Spectrogram make_spec(std::size_t k, std::size_t l) {
  std::vector<double> freqs(k), times(l);
  for (std::size_t i = 0; i < k; ++i) freqs[i] = 50.0 + 3.5 * static_cast<double>(i);
  for (std::size_t i = 0; i < l; ++i) times[i] = 8.5 + 0.1 * static_cast<double>(i);
  return Spectrogram(freqs, times);
}

std::vector<Spectrogram> fixtures() {
  std::vector<Spectrogram> out;
  Spectrogram a = make_spec(28, 120);
  for (std::size_t c = 0; c < 120; ++c) a(9, c) = 1.0;
  for (std::size_t c = 0; c < 120; c += 3) a(20, c) = 0.2;
  out.push_back(a);
  Spectrogram b = make_spec(28, 300);
  for (std::size_t c = 0; c < 300; ++c) b(c < 150 ? 8 : 16, c) = 1.0;
  out.push_back(b);
  return out;
}

FitConfig config() {
  FitConfig c;
  c.vertex_count = 8;
  return c;
}

TEST(FitDescent, LossDecreasesInMostSteps) {
  for (const auto& s : fixtures()) {
    const FitResult r = fit(s, config());
    std::size_t down = 0;
    const std::size_t steps = r.loss_history.size() - 1;
    for (std::size_t i = 1; i < r.loss_history.size(); ++i) {
      if (r.loss_history[i] <= r.loss_history[i - 1]) ++down;
    }
    std::printf("loss decreased in %zu of %zu steps\n", down, steps);
    EXPECT_GE(static_cast<double>(down), 0.95 * static_cast<double>(steps)) << down << " of " << steps;
  }
}

TEST(FitDescent, SettlesAtBestVisitedLoss) {
  for (const auto& s : fixtures()) {
    const FitResult r = fit(s, config());
    ASSERT_TRUE(r.converged);
    const double first = r.loss_history.front();
    const double last = r.loss_history.back();
    const double best = *std::min_element(r.loss_history.begin(), r.loss_history.end());
    EXPECT_LT(last, first);
    // the final iterate is within 0.1% of the total descent from the best one seen
    EXPECT_LE(last - best, 1e-3 * (first - best));
  }
}

}  // namespace
