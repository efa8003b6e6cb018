#pragma once

// File formats.
//
// Landmarks (.jsonl): one JSON object per line,
//   {"frame": 0, "points": [[x, y], ...]}
// with normalized coordinates; {"frame": n, "missing": true, "points": []}
// marks a frame without a detected face.
//
// Raw frame stream: 32-byte little-endian header followed by frames of
// width*height*3 bytes in R, G, B order, row-major:
//   bytes 0-3   magic "RPRW"
//   bytes 4-7   u32 width
//   bytes 8-11  u32 height
//   bytes 12-15 u32 frame count
//   bytes 16-23 f64 frame rate (Hz)
//   bytes 24-31 reserved, zero
//
// PNG directory: files named <number>.png (any zero padding), read in
// numeric order; frame rate comes from the config.
//
// Spectrogram dump: 16-byte header (magic "RPSG", u32 K, u32 L, u32 0)
// then K*L f32 little-endian values, row-major (frequency rows). The sidecar
// <file>.axes.txt holds "freq_bpm" and "time_s" lines of space-separated
// values. The weight dump uses the same layout with magic "RPWM" and the
// vertex columns in place of the time axis.
//
// CSV files have a header row, '.' decimals and '\n' line endings.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rppg/color_space.hpp"
#include "rppg/curve.hpp"
#include "rppg/evaluation.hpp"
#include "rppg/roi_sampler.hpp"
#include "rppg/spectrogram.hpp"

namespace rppg::io {

/// Shortest round-trip decimal form; identical across runs and platforms.
std::string format_number(double value);

// Landmarks

roi::LandmarkFrame parse_landmark_record(const std::string& line);
std::string format_landmark_record(const roi::LandmarkFrame& frame);

class LandmarkReader {
 public:
  /// Throws InputMissing.
  explicit LandmarkReader(const std::filesystem::path& path);
  /// Throws ParseError.
  std::optional<roi::LandmarkFrame> next();

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

std::vector<roi::LandmarkFrame> read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path,
                     std::span<const roi::LandmarkFrame> frames);

// Frames

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t frame_count() const = 0;
  virtual double frame_rate() const = 0;
  virtual std::optional<color::RgbFrame> next() = 0;
};

class RawFrameReader final : public FrameSource {
 public:
  explicit RawFrameReader(const std::filesystem::path& path);
  std::size_t frame_count() const override { return count_; }
  double frame_rate() const override { return rate_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::optional<color::RgbFrame> next() override;

 private:
  std::ifstream in_;
  int width_ = 0;
  int height_ = 0;
  std::size_t count_ = 0;
  std::size_t read_ = 0;
  double rate_ = 0.0;
};

class RawFrameWriter {
 public:
  RawFrameWriter(const std::filesystem::path& path, int width, int height,
                 std::size_t frame_count, double frame_rate);
  void write(const color::RgbFrame& frame);
  /// Throws InvalidArgument if fewer frames than declared were written.
  void close();
  ~RawFrameWriter();

 private:
  std::ofstream out_;
  int width_ = 0;
  int height_ = 0;
  std::size_t declared_ = 0;
  std::size_t written_ = 0;
};

class PngDirectoryReader final : public FrameSource {
 public:
  PngDirectoryReader(const std::filesystem::path& dir, double frame_rate);
  std::size_t frame_count() const override { return files_.size(); }
  double frame_rate() const override { return rate_; }
  std::optional<color::RgbFrame> next() override;

 private:
  std::vector<std::filesystem::path> files_;
  std::size_t read_ = 0;
  double rate_ = 0.0;
};

void write_png(const std::filesystem::path& path, const color::RgbFrame& frame);

/// Directory -> PNG frames at `directory_frame_rate`; file -> raw stream.
std::unique_ptr<FrameSource> open_frames(const std::filesystem::path& path,
                                         double directory_frame_rate);

// Curves and signals

void write_curve_csv(const std::filesystem::path& path, const HeartRateCurve& curve);
/// Expects a "time_seconds,bpm" header.
HeartRateCurve read_curve_csv(const std::filesystem::path& path);

void write_signal_csv(const std::filesystem::path& path, std::span<const double> samples,
                      double frame_rate);

/// Two columns (time_seconds, amplitude), comma or whitespace separated,
/// optional header. Timestamps must be uniform.
eval::ReferenceRecording read_reference_recording(const std::filesystem::path& path);

/// True when the first line is a "time_seconds,bpm" curve header.
bool is_curve_csv(const std::filesystem::path& path);

// Spectrogram dumps

void write_matrix_dump(const std::filesystem::path& path, std::array<char, 4> magic,
                       std::size_t rows, std::size_t cols, std::span<const double> values);

struct MatrixDump {
  std::array<char, 4> magic{};
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;
};
MatrixDump read_matrix_dump(const std::filesystem::path& path);

void write_spectrogram_dump(const std::filesystem::path& path, const spectral::Spectrogram& spec);
spectral::Spectrogram read_spectrogram_dump(const std::filesystem::path& path);

// Cells

/// Lines of "name = i1, i2, i3, ..."; cell ids follow file order.
std::vector<roi::CellSpec> parse_cells(const std::string& text, const std::string& origin);
std::vector<roi::CellSpec> read_cells(const std::filesystem::path& path);
std::string format_cells(std::span<const roi::CellSpec> cells);

}  // namespace rppg::io
