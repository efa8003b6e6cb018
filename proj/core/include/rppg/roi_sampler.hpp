#pragma once

// Face-cell rasterization and per-cell a* aggregation.
//
// A cell is a polygon over landmark indices. For every frame the polygon is
// scaled from normalized landmark coordinates to pixels and rasterized with
// a pixel-center, even-odd test; centers lying exactly on an edge count as
// inside. The cell sample is the Euclidean norm of the a* values of the
// covered pixels, optionally divided by sqrt(pixel count).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rppg/color_space.hpp"

namespace rppg::roi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct LandmarkFrame {
  std::int64_t frame_index = 0;
  std::vector<Point2> points;  // normalized image coordinates
  bool missing = false;        // no face found for this frame
};

struct CellSpec {
  int cell_id = 0;
  std::string name;
  std::vector<std::size_t> vertices;  // landmark indices, polygon order
};

struct PixelCoord {
  int x = 0;  // column
  int y = 0;  // row

  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

struct CellSignalSeries {
  int cell_id = 0;
  std::vector<double> samples;
  double frame_rate = 0.0;
  std::size_t valid_frames = 0;  // frames where the cell rasterized non-empty
};

struct SamplerOptions {
  bool normalize_by_pixel_count = true;
};

/// Built-in 7-cell layout over the 468-point face-mesh topology: three
/// forehead cells, two cheeks, nose bridge and chin. Mirrors
/// data/default_cells.txt.
std::vector<CellSpec> default_cells();

/// Throws InvalidArgument when a cell has fewer than 3 vertices or refers to
/// a landmark index outside [0, landmark_count).
void validate_cells(std::span<const CellSpec> cells, std::size_t landmark_count);

/// Pixel-space polygon vertices of a cell for one frame.
std::vector<Point2> cell_polygon(const CellSpec& cell, const LandmarkFrame& landmarks,
                                 int width, int height);

/// Scanline rasterization of a pixel-space polygon, clipped to the frame.
/// Result is sorted row-major. Throws DegenerateCell for zero-area or
/// non-finite polygons and when no pixel center is covered.
std::vector<PixelCoord> rasterize_polygon(std::span<const Point2> polygon, int width,
                                          int height);

std::vector<PixelCoord> rasterize_cell(const CellSpec& cell, const LandmarkFrame& landmarks,
                                       int width, int height);

/// sqrt(sum of squared a*) over the given pixels. Throws EmptyCell.
double aggregate_cell(const color::LabFrame& lab, std::span<const PixelCoord> pixels);

/// Streaming builder: push frames in order, then take the series.
///
/// Frames where a cell is degenerate hold the previous valid sample; leading
/// degenerate frames take the first valid sample once one appears.
class SeriesBuilder {
 public:
  SeriesBuilder(std::vector<CellSpec> cells, double frame_rate, SamplerOptions options = {});

  void push(const color::LabFrame& lab, const LandmarkFrame& landmarks);

  std::size_t frame_count() const noexcept { return frames_; }
  std::size_t degenerate_samples() const noexcept { return degenerate_; }

  std::vector<CellSignalSeries> finish();

 private:
  std::vector<CellSpec> cells_;
  SamplerOptions options_;
  std::vector<CellSignalSeries> series_;
  std::size_t frames_ = 0;
  std::size_t degenerate_ = 0;
  std::size_t landmark_count_ = 0;
};

/// Throws LengthMismatch when the sequences differ in length.
std::vector<CellSignalSeries> build_series(std::span<const color::LabFrame> frames,
                                           std::span<const LandmarkFrame> landmarks,
                                           std::span<const CellSpec> cells, double frame_rate,
                                           SamplerOptions options = {});

/// Element-wise mean of every series that had at least one valid frame.
/// Throws DegenerateCell when no series qualifies.
std::vector<double> combine_series(std::span<const CellSignalSeries> series);

}  // namespace rppg::roi
