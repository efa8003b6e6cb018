#include "rppg/roi_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rppg/error.hpp"

namespace rppg::roi {
namespace {

// Twice the signed area, pixel units.
double doubled_area(std::span<const Point2> poly) {
  double acc = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    acc += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
  }
  return acc;
}

// Fills `out` with covered pixels; false when the polygon is degenerate.
bool rasterize_into(std::span<const Point2> poly, int width, int height,
                    std::vector<PixelCoord>& out) {
  out.clear();
  if (poly.size() < 3 || width <= 0 || height <= 0) return false;
  double ymin = poly[0].y, ymax = poly[0].y;
  for (const auto& p : poly) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (std::abs(doubled_area(poly)) < 1e-9) return false;

  const int row_begin = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
  const int row_end = std::min(height - 1, static_cast<int>(std::floor(ymax - 0.5)));
  std::vector<double> crossings;
  std::vector<char> mask(static_cast<std::size_t>(width));

  for (int y = row_begin; y <= row_end; ++y) {
    const double yc = y + 0.5;
    crossings.clear();
    std::fill(mask.begin(), mask.end(), 0);

    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Point2& a = poly[i];
      const Point2& b = poly[j];
      if ((a.y > yc) != (b.y > yc)) {
        crossings.push_back((b.x - a.x) * (yc - a.y) / (b.y - a.y) + a.x);
      }
      // Centers on the boundary are inside.
      if (std::min(a.y, b.y) <= yc && yc <= std::max(a.y, b.y)) {
        if (a.y == b.y) {
          const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x, b.x) - 0.5)));
          const int x1 = std::min(width - 1, static_cast<int>(std::floor(std::max(a.x, b.x) - 0.5)));
          for (int x = x0; x <= x1; ++x) mask[static_cast<std::size_t>(x)] = 1;
        } else {
          const double xb = a.x + (b.x - a.x) * (yc - a.y) / (b.y - a.y);
          const double xf = std::floor(xb - 0.5);
          if (xf >= 0 && xf < width && xf + 0.5 == xb) mask[static_cast<std::size_t>(xf)] = 1;
        }
      }
    }

    // Even-odd: a center is inside iff it lies in [c0, c1), [c2, c3), ...
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
      const double lo = crossings[c];
      const double hi = crossings[c + 1];
      int x = std::max(0, static_cast<int>(std::floor(lo - 0.5)));
      while (x < width && x + 0.5 < lo) ++x;
      for (; x < width && x + 0.5 < hi; ++x) mask[static_cast<std::size_t>(x)] = 1;
    }

    for (int x = 0; x < width; ++x) {
      if (mask[static_cast<std::size_t>(x)]) out.push_back({x, y});
    }
  }
  return !out.empty();
}

}  // namespace

std::vector<CellSpec> default_cells() {
  return {
      {0, "forehead_left", {67, 109, 108, 69}},
      {1, "forehead_center", {109, 338, 337, 108}},
      {2, "forehead_right", {338, 297, 299, 337}},
      {3, "cheek_left", {117, 118, 101, 50}},
      {4, "cheek_right", {347, 346, 280, 330}},
      {5, "nose_bridge", {193, 417, 351, 122}},
      {6, "chin", {83, 313, 421, 201}},
  };
}

void validate_cells(std::span<const CellSpec> cells, std::size_t landmark_count) {
  for (const auto& cell : cells) {
    if (cell.vertices.size() < 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cell " + std::to_string(cell.cell_id) + " has fewer than 3 vertices");
    }
    for (std::size_t index : cell.vertices) {
      if (index >= landmark_count) {
        throw Error(ErrorCode::kInvalidArgument,
                    "cell " + std::to_string(cell.cell_id) + " refers to landmark " +
                        std::to_string(index) + " but frames carry " +
                        std::to_string(landmark_count) + " points");
      }
    }
  }
}

std::vector<Point2> cell_polygon(const CellSpec& cell, const LandmarkFrame& landmarks, int width,
                                 int height) {
  std::vector<Point2> poly;
  poly.reserve(cell.vertices.size());
  for (std::size_t index : cell.vertices) {
    if (index >= landmarks.points.size()) {
      throw Error(ErrorCode::kInvalidArgument, "landmark index out of range");
    }
    const Point2& p = landmarks.points[index];
    poly.push_back({p.x * width, p.y * height});
  }
  return poly;
}

std::vector<PixelCoord> rasterize_polygon(std::span<const Point2> polygon, int width,
                                          int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame dimensions must be positive");
  }
  std::vector<PixelCoord> out;
  if (!rasterize_into(polygon, width, height, out)) {
    throw Error(ErrorCode::kDegenerateCell, "cell polygon covers no pixel centers");
  }
  return out;
}

std::vector<PixelCoord> rasterize_cell(const CellSpec& cell, const LandmarkFrame& landmarks,
                                       int width, int height) {
  if (cell.vertices.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "cell needs at least 3 vertices");
  }
  const auto poly = cell_polygon(cell, landmarks, width, height);
  return rasterize_polygon(poly, width, height);
}

double aggregate_cell(const color::LabFrame& lab, std::span<const PixelCoord> pixels) {
  if (pixels.empty()) throw Error(ErrorCode::kEmptyCell, "cell has no pixels");
  double sum = 0.0;
  for (const auto& p : pixels) {
    if (p.x < 0 || p.y < 0 || p.x >= lab.width() || p.y >= lab.height()) {
      throw Error(ErrorCode::kInvalidArgument, "pixel outside frame");
    }
    const double a = lab.at(p.x, p.y).a;
    sum += a * a;
  }
  return std::sqrt(sum);
}

SeriesBuilder::SeriesBuilder(std::vector<CellSpec> cells, double frame_rate,
                             SamplerOptions options)
    : cells_(std::move(cells)), options_(options) {
  if (cells_.empty()) throw Error(ErrorCode::kInvalidArgument, "no cells configured");
  if (!(frame_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "frame rate must be positive");
  series_.reserve(cells_.size());
  for (const auto& cell : cells_) {
    if (cell.vertices.size() < 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cell " + std::to_string(cell.cell_id) + " has fewer than 3 vertices");
    }
    series_.push_back({cell.cell_id, {}, frame_rate, 0});
  }
}

void SeriesBuilder::push(const color::LabFrame& lab, const LandmarkFrame& landmarks) {
  if (!landmarks.missing) {
    if (landmark_count_ == 0) {
      validate_cells(cells_, landmarks.points.size());
      landmark_count_ = landmarks.points.size();
    } else if (landmarks.points.size() != landmark_count_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "landmark count changed at frame " + std::to_string(landmarks.frame_index));
    }
  }

  std::vector<PixelCoord> pixels;
  std::vector<Point2> poly;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& series = series_[c];
    bool valid = false;
    if (!landmarks.missing) {
      poly = cell_polygon(cells_[c], landmarks, lab.width(), lab.height());
      valid = rasterize_into(poly, lab.width(), lab.height(), pixels);
    }
    if (valid) {
      double sample = aggregate_cell(lab, pixels);
      if (options_.normalize_by_pixel_count) {
        sample /= std::sqrt(static_cast<double>(pixels.size()));
      }
      if (series.valid_frames == 0) {
        std::fill(series.samples.begin(), series.samples.end(), sample);
      }
      series.samples.push_back(sample);
      ++series.valid_frames;
    } else {
      ++degenerate_;
      series.samples.push_back(series.samples.empty() ? 0.0 : series.samples.back());
    }
  }
  ++frames_;
}

std::vector<CellSignalSeries> SeriesBuilder::finish() { return std::move(series_); }

std::vector<CellSignalSeries> build_series(std::span<const color::LabFrame> frames,
                                           std::span<const LandmarkFrame> landmarks,
                                           std::span<const CellSpec> cells, double frame_rate,
                                           SamplerOptions options) {
  if (frames.size() != landmarks.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "frame count " + std::to_string(frames.size()) + " != landmark count " +
                    std::to_string(landmarks.size()));
  }
  SeriesBuilder builder({cells.begin(), cells.end()}, frame_rate, options);
  for (std::size_t i = 0; i < frames.size(); ++i) builder.push(frames[i], landmarks[i]);
  return builder.finish();
}

std::vector<double> combine_series(std::span<const CellSignalSeries> series) {
  std::vector<double> out;
  std::size_t used = 0;
  for (const auto& s : series) {
    if (s.valid_frames == 0) continue;
    if (used == 0) {
      out.assign(s.samples.size(), 0.0);
    } else if (s.samples.size() != out.size()) {
      throw Error(ErrorCode::kLengthMismatch, "cell series lengths differ");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s.samples[i];
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::kDegenerateCell, "no cell was valid in any frame");
  for (double& v : out) v /= static_cast<double>(used);
  return out;
}

}  // namespace rppg::roi
