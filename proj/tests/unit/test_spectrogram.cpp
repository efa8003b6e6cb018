#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rppg/error.hpp"
#include "rppg/spectrogram.hpp"

namespace {

using namespace rppg::spectral;

std::vector<double> sinusoid(double bpm, double fps, std::size_t n, double phase = 0.0) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(2.0 * std::numbers::pi * bpm / 60.0 * static_cast<double>(i) / fps + phase);
  }
  return s;
}

std::size_t nearest_bin(const Spectrogram& spec, double bpm) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < spec.bins(); ++k) {
    if (std::abs(spec.freq_axis()[k] - bpm) < std::abs(spec.freq_axis()[best] - bpm)) best = k;
  }
  return best;
}

TEST(Tukey, RectangularLimit) {
  EXPECT_EQ(tukey_window(4, 0.0), (std::vector<double>{1, 1, 1, 1}));
}

TEST(Tukey, HannLimit) {
  const auto w = tukey_window(5, 1.0);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_NEAR(w[0], 0.0, 1e-15);
  EXPECT_NEAR(w[4], 0.0, 1e-15);
  EXPECT_NEAR(w[2], 1.0, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
  EXPECT_EQ(w[1], w[3]);
}

TEST(Tukey, MatchesTextbookFormula) {
  for (double shape : {0.25, 0.5, 0.75, 1.0}) {
    for (std::size_t n : {2u, 7u, 64u, 512u}) {
      const auto got = tukey_window(n, shape);
      const auto want = oracle::tukey(n, shape);
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_NEAR(got[i], want[i], 1e-12) << "shape " << shape << " n " << n << " i " << i;
      }
    }
  }
}

TEST(Tukey, RejectsBadArguments) {
  EXPECT_THROW(tukey_window(1, 0.5), rppg::Error);
  EXPECT_THROW(tukey_window(8, 1.5), rppg::Error);
}

TEST(Fft, MagnitudesMatchDirectDft) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t n : {8u, 30u, 512u}) {
    std::vector<double> x(n);
    for (double& v : x) v = g(rng);
    const auto got = magnitude_spectrum(x);
    const auto want = oracle::dft_magnitude(x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t j = 0; j < got.size(); ++j) EXPECT_NEAR(got[j], want[j], 1e-9) << j;
  }
}

TEST(Fft, Parseval) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 512;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  const auto w = tukey_window(n, 0.5);
  double time_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] *= w[i];
    time_energy += x[i] * x[i];
  }
  const auto mag = magnitude_spectrum(x);
  double freq_energy = mag.front() * mag.front() + mag.back() * mag.back();
  for (std::size_t j = 1; j + 1 < mag.size(); ++j) freq_energy += 2.0 * mag[j] * mag[j];
  EXPECT_NEAR(freq_energy, static_cast<double>(n) * time_energy, 1e-9 * freq_energy);
}

TEST(Config, ValidatesFields) {
  StftConfig c;
  EXPECT_NO_THROW(c.validate());
  c.stride = 0;
  EXPECT_THROW(c.validate(), rppg::Error);
  c = {};
  c.stride = 513;
  EXPECT_THROW(c.validate(), rppg::Error);
  c = {};
  c.band_low = 150;
  EXPECT_THROW(c.validate(), rppg::Error);
  c = {};
  c.noise_threshold = 1.0;
  EXPECT_THROW(c.validate(), rppg::Error);
}

TEST(Compute, AxesAndShape) {
  const StftConfig cfg;
  const auto s = sinusoid(72, 30, 1800);
  const auto spec = compute_spectrogram(s, cfg);
  EXPECT_EQ(spec.columns(), (1800 - 512) / 4 + 1);
  EXPECT_EQ(spec.columns(), column_count(1800, cfg));
  // bin centers j * 30 / 512 * 60 inside [50, 150]
  std::size_t expected_bins = 0;
  for (int j = 0; j <= 256; ++j) {
    const double bpm = j * 30.0 / 512.0 * 60.0;
    if (bpm >= 50.0 && bpm <= 150.0) ++expected_bins;
  }
  EXPECT_EQ(spec.bins(), expected_bins);
  EXPECT_GE(spec.freq_axis().front(), 50.0);
  EXPECT_LE(spec.freq_axis().back(), 150.0);
  EXPECT_NEAR(spec.time_axis()[0], 511.0 / 2.0 / 30.0, 1e-12);
  EXPECT_NEAR(spec.time_axis()[1] - spec.time_axis()[0], 4.0 / 30.0, 1e-12);
  for (double v : spec.powers()) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
}

TEST(Compute, SinusoidPeaksAtNearestBin) {
  const auto s = sinusoid(72, 30, 3000, 0.3);
  const auto spec = compute_spectrogram(s, {});
  const std::size_t want = nearest_bin(spec, 72.0);
  for (std::size_t l = 0; l < spec.columns(); ++l) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.bins(); ++k) {
      if (spec(k, l) > spec(best, l)) best = k;
    }
    ASSERT_EQ(best, want) << "column " << l;
  }
}

TEST(Compute, ConstantSignalGivesZeroColumns) {
  const std::vector<double> s(1000, 3.7);
  const auto spec = compute_spectrogram(s, {});
  EXPECT_TRUE(spec.all_zero());
}

TEST(Compute, TooShort) {
  const std::vector<double> s(511, 1.0);
  try {
    compute_spectrogram(s, {});
    FAIL();
  } catch (const rppg::Error& e) {
    EXPECT_EQ(e.code(), rppg::ErrorCode::kSignalTooShort);
  }
}

TEST(Analyze, TwoTonesGiveTwoRidges) {
  auto a = sinusoid(60, 30, 2400);
  const auto b = sinusoid(120, 30, 2400, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  const auto spec = analyze(a, {});
  const std::size_t k60 = nearest_bin(spec, 60.0);
  const std::size_t k120 = nearest_bin(spec, 120.0);
  // a ridge is a run of non-zero bins (main-lobe leakage widens it); each run
  // must peak at the bin nearest its tone
  for (std::size_t l = 0; l < spec.columns(); ++l) {
    std::vector<std::size_t> peaks;
    std::size_t k = 0;
    while (k < spec.bins()) {
      if (spec(k, l) == 0.0) {
        ++k;
        continue;
      }
      std::size_t best = k;
      for (; k < spec.bins() && spec(k, l) > 0.0; ++k) {
        if (spec(k, l) > spec(best, l)) best = k;
      }
      peaks.push_back(best);
    }
    ASSERT_EQ(peaks, (std::vector<std::size_t>{k60, k120})) << "column " << l;
  }
}

TEST(Analyze, TimeLocalization) {
  const std::size_t n = 2400;
  std::vector<double> s(n, 0.0);
  const auto tone = sinusoid(90, 30, n);
  for (std::size_t i = n / 2; i < n; ++i) s[i] = tone[i];
  const auto spec = analyze(s, {});
  for (std::size_t l = 0; l < spec.columns(); ++l) {
    const std::size_t end = l * 4 + 512;  // one past the window's last sample
    double mass = 0.0;
    for (std::size_t k = 0; k < spec.bins(); ++k) mass += spec(k, l);
    if (end <= n / 2) {
      EXPECT_EQ(mass, 0.0) << "column " << l;
    } else {
      EXPECT_GT(mass, 0.0) << "column " << l;
    }
  }
}

TEST(Analyze, Deterministic) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> s(1500);
  for (double& v : s) v = g(rng);
  const auto a = analyze(s, {});
  const auto b = analyze(s, {});
  ASSERT_EQ(a.powers().size(), b.powers().size());
  for (std::size_t i = 0; i < a.powers().size(); ++i) ASSERT_EQ(a.powers()[i], b.powers()[i]);
}

TEST(Analyze, ColumnMaxAndThresholdGap) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(800 + 37 * trial);
    for (double& v : s) v = g(rng);
    const auto spec = analyze(s, {});
    for (std::size_t l = 0; l < spec.columns(); ++l) {
      double peak = 0.0;
      for (std::size_t k = 0; k < spec.bins(); ++k) {
        const double v = spec(k, l);
        EXPECT_FALSE(v > 0.0 && v < 0.1);
        peak = std::max(peak, v);
      }
      EXPECT_TRUE(peak == 1.0 || peak == 0.0);
    }
  }
}

TEST(Normalize, ColumnExamples) {
  Spectrogram spec({50, 60, 70}, {0.0, 1.0}, {2, 0, 4, 0, 8, 0});
  const auto n = normalize_columns(spec);
  EXPECT_EQ(n(0, 0), 0.25);
  EXPECT_EQ(n(1, 0), 0.5);
  EXPECT_EQ(n(2, 0), 1.0);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(n(k, 1), 0.0);
}

TEST(Normalize, RandomMatrixColumnsPeakAtOne) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> p(64);
  for (double& v : p) v = u(rng);
  const auto n = normalize_columns(Spectrogram(std::vector<double>(8, 0.0), std::vector<double>(8, 0.0), p));
  for (std::size_t l = 0; l < 8; ++l) {
    double peak = 0.0;
    for (std::size_t k = 0; k < 8; ++k) peak = std::max(peak, n(k, l));
    EXPECT_EQ(peak, 1.0);
  }
}

TEST(Threshold, BoundaryKeptAndIdentity) {
  const auto t = threshold_noise(Spectrogram({1, 2, 3}, {0}, {0.05, 0.1, 0.95}), 0.1);
  EXPECT_EQ(t(0, 0), 0.0);
  EXPECT_EQ(t(1, 0), 0.1);
  EXPECT_EQ(t(2, 0), 0.95);

  const Spectrogram high({1, 2, 3}, {0}, {0.2, 0.5, 1.0});
  const auto same = threshold_noise(high, 0.1);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(same(k, 0), high(k, 0));
}

TEST(Threshold, MatchesElementwiseComparison) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(40);
  for (double& v : p) v = u(rng);
  const auto t = threshold_noise(Spectrogram(std::vector<double>(40, 0.0), {0.0}, p), 0.3);
  for (std::size_t k = 0; k < 40; ++k) EXPECT_EQ(t(k, 0), p[k] < 0.3 ? 0.0 : p[k]);
}

TEST(Spectrogram, BinToBpmInterpolates) {
  const Spectrogram s({50, 60, 70}, {0.0});
  EXPECT_EQ(s.bin_to_bpm(0.0), 50.0);
  EXPECT_EQ(s.bin_to_bpm(1.5), 65.0);
  EXPECT_EQ(s.bin_to_bpm(2.0), 70.0);
}

}  // namespace
