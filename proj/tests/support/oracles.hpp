#pragma once

// Independent reference implementations used by the tests. Nothing in here
// calls into the library's numeric code; each oracle is the plain textbook
// loop so that a shared bug cannot hide.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// sRGB -> CIELAB values from scikit-image 0.x rgb2lab (D65, 2 degree),
// computed once outside this repository and frozen here.
struct LabFixture {
  int r, g, b;
  double l, a, bb;
};
inline const std::vector<LabFixture>& lab_fixtures() {
  static const std::vector<LabFixture> f{
      {255, 0, 0, 53.2406, 80.0923, 67.2028},
      {0, 255, 0, 87.7351, -86.1830, 83.1797},
      {0, 0, 255, 32.2957, 79.1856, -107.8573},
      {128, 64, 32, 34.7248, 24.9996, 31.3728},
      {200, 150, 120, 66.0978, 14.8498, 23.1328},
      {119, 119, 119, 50.0344, -0.0014, 0.0026},
  };
  return f;
}

// Tukey window written straight from its piecewise definition, each sample
// evaluated on its own (no mirroring).
inline std::vector<double> tukey(std::size_t n_total, double alpha) {
  std::vector<double> w(n_total);
  const double big_n = static_cast<double>(n_total - 1);
  for (std::size_t i = 0; i < n_total; ++i) {
    const double n = static_cast<double>(i);
    if (alpha <= 0.0) {
      w[i] = 1.0;
    } else if (n < alpha * big_n / 2.0) {
      w[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * n / (alpha * big_n) - 1.0)));
    } else if (n <= big_n * (1.0 - alpha / 2.0)) {
      w[i] = 1.0;
    } else {
      w[i] = 0.5 * (1.0 + std::cos(std::numbers::pi *
                                   (2.0 * n / (alpha * big_n) - 2.0 / alpha + 1.0)));
    }
  }
  return w;
}

// O(N^2) DFT magnitudes for j = 0..N/2.
inline std::vector<double> dft_magnitude(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t j = 0; j <= n / 2; ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * t % n) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[j] = std::abs(acc);
  }
  return out;
}

// Dense K x L matrix as nested vectors, [k][l].
using Grid = std::vector<std::vector<double>>;

// Power-weighted bin centroid, bins counted from 0.
inline double centroid(const Grid& p) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t l = 0; l < p[k].size(); ++l) {
      num += static_cast<double>(k) * p[k][l];
      den += p[k][l];
    }
  }
  return num / den;
}

// Loss by direct nested loops: smoothness over consecutive vertices, then for
// every vertex the weighted sum over bins of the clipped column-window sums.
inline double loss(const Grid& p, const std::vector<double>& xs, const std::vector<double>& ys,
                   long half_span, double alpha, double beta, double r) {
  const long big_k = static_cast<long>(p.size());
  const long big_l = static_cast<long>(p.front().size());
  double lp = 0.0;
  for (std::size_t m = 0; m + 1 < ys.size(); ++m) lp += std::pow(std::abs(ys[m + 1] - ys[m]), beta);
  double ln = 0.0;
  for (std::size_t m = 0; m < ys.size(); ++m) {
    const long xm = std::lround(xs[m]);
    double inner = 0.0;
    for (long k = 0; k < big_k; ++k) {
      const double w = 1.0 / (1.0 + (k - ys[m]) * (k - ys[m]) / (big_k * r * r));
      double col = 0.0;
      for (long l = xm - half_span; l <= xm + half_span; ++l) {
        if (l < 0 || l >= big_l) continue;
        col += p[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      }
      inner += w * col;
    }
    ln += inner * inner;
  }
  return alpha * lp - ln / alpha;
}

struct Pt {
  double x, y;
};

// Crossing-number test with an explicit on-segment check so that boundary
// points count as inside.
inline bool on_segment(Pt a, Pt b, Pt q) {
  const double cross = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), 1.0});
  if (std::abs(cross) > 1e-12 * scale) return false;
  return q.x >= std::min(a.x, b.x) - 1e-12 && q.x <= std::max(a.x, b.x) + 1e-12 &&
         q.y >= std::min(a.y, b.y) - 1e-12 && q.y <= std::max(a.y, b.y) + 1e-12;
}

inline bool inside(const std::vector<Pt>& poly, Pt q) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(poly[i], poly[(i + 1) % n], q)) return true;
  }
  int crossings = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Pt a = poly[i], b = poly[(i + 1) % n];
    // half-open in y so a vertex on the ray is counted once
    if ((a.y <= q.y && b.y > q.y) || (b.y <= q.y && a.y > q.y)) {
      const double x_at = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (x_at > q.x) ++crossings;
    }
  }
  return crossings % 2 == 1;
}

// All pixels (x, y) of a w x h frame whose centers are inside, row-major.
inline std::vector<std::pair<int, int>> brute_pixels(const std::vector<Pt>& poly, int w, int h) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (inside(poly, {x + 0.5, y + 0.5})) out.emplace_back(x, y);
    }
  }
  return out;
}

// Star-shaped simple polygon: sorted angles around a center, random radii.
inline std::vector<Pt> random_polygon(std::mt19937_64& rng, double extent) {
  std::uniform_int_distribution<int> count(3, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (double& a : angles) a = unit(rng) * 2.0 * std::numbers::pi;
  std::sort(angles.begin(), angles.end());
  const double cx = extent * (0.25 + 0.5 * unit(rng));
  const double cy = extent * (0.25 + 0.5 * unit(rng));
  std::vector<Pt> poly;
  for (double a : angles) {
    const double rad = extent * (0.08 + 0.4 * unit(rng));
    poly.push_back({cx + rad * std::cos(a), cy + rad * std::sin(a)});
  }
  return poly;
}

// Sign changes of a sampled signal (zero samples are skipped).
inline int zero_crossings(const std::vector<double>& s, std::size_t from = 0,
                          std::size_t to = static_cast<std::size_t>(-1)) {
  to = std::min(to, s.size());
  int count = 0;
  double prev = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    if (s[i] == 0.0) continue;
    if (prev != 0.0 && (prev < 0.0) != (s[i] < 0.0)) ++count;
    prev = s[i];
  }
  return count;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double relative_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return std::sqrt(var) / std::abs(mean);
}

// Per-experiment MAE values of a 26-recording study (experiment, subject, MAE
// in BPM); their mean is 1.9446.
struct MaeRow {
  int experiment, subject;
  double mae;
};
inline const std::vector<MaeRow>& study_maes() {
  static const std::vector<MaeRow> rows{
      {1, 1, 0.63},   {2, 1, 1.57},   {3, 1, 0.32},   {4, 2, 7.80},   {5, 2, 7.41},
      {6, 2, 5.13},   {7, 3, 0.74},   {8, 3, 0.46},   {9, 4, 0.98},   {10, 4, 3.26},
      {11, 4, 1.90},  {12, 5, 0.63},  {13, 6, 0.47},  {14, 7, 1.29},  {15, 8, 2.86},
      {16, 9, 3.79},  {17, 10, 1.20}, {18, 11, 1.26}, {19, 12, 0.45}, {20, 13, 1.12},
      {21, 14, 1.40}, {22, 15, 1.78}, {23, 16, 1.22}, {24, 17, 0.39}, {25, 18, 0.73},
      {26, 19, 1.77},
  };
  return rows;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("rppg_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
