#pragma once

// sRGB <-> CIELAB conversion.
//
// Conversion chain: 8-bit sRGB -> piecewise sRGB transfer (linear segment
// below 0.04045) -> linear RGB -> XYZ (sRGB primaries, D65) -> CIELAB.
//
// Constants:
//   reference white D65, 2 degree observer: Xn = 0.95047, Yn = 1.0, Zn = 1.08883
//   RGB->XYZ matrix (IEC 61966-2-1, D65):
//     [0.4124564 0.3575761 0.1804375]
//     [0.2126729 0.7151522 0.0721750]
//     [0.0193339 0.1191920 0.9503041]
//   CIELAB f(t) = cbrt(t) for t > (6/29)^3, else t / (3 (6/29)^2) + 4/29
//
// a* is kept as a signed double; nothing is rescaled to [0, 255].

#include <cstdint>
#include <span>
#include <vector>

namespace rppg::color {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

struct Xyz {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// D65 as the image of linear (1, 1, 1) under the RGB->XYZ matrix, so that
// white lands exactly on L = 100 (the rounded matrix gives Y = 1.0000001).
inline constexpr Xyz kWhiteD65{0.4124564 + 0.3575761 + 0.1804375, 0.2126729 + 0.7151522 + 0.0721750,
                               0.0193339 + 0.1191920 + 0.9503041};

/// Row-major 8-bit sRGB image.
class RgbFrame {
 public:
  RgbFrame() = default;
  RgbFrame(int width, int height, Rgb8 fill = {});
  RgbFrame(int width, int height, std::vector<Rgb8> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const Rgb8> pixels() const noexcept { return pixels_; }
  std::span<Rgb8> pixels() noexcept { return pixels_; }

  const Rgb8& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb8& at(int x, int y) { return pixels_[index(x, y)]; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb8> pixels_;
};

/// Row-major CIELAB image; the a* plane feeds the cell aggregation.
class LabFrame {
 public:
  LabFrame() = default;
  LabFrame(int width, int height, std::vector<Lab> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const Lab> pixels() const noexcept { return pixels_; }

  const Lab& at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Lab> pixels_;
};

/// Gamma expansion of one 8-bit channel to linear [0, 1].
double srgb_to_linear(std::uint8_t value) noexcept;

/// Gamma compression of a linear value; input is clamped to [0, 1].
double linear_to_srgb(double linear) noexcept;

Xyz linear_rgb_to_xyz(double r, double g, double b) noexcept;
Lab xyz_to_lab(const Xyz& xyz) noexcept;

Lab srgb_to_lab(Rgb8 pixel) noexcept;
LabFrame convert_frame(const RgbFrame& frame);

/// Inverse chain to linear RGB; components may fall outside [0, 1] for
/// out-of-gamut Lab values.
void lab_to_linear_rgb(const Lab& lab, double& r, double& g, double& b) noexcept;

/// Inverse conversion with rounding to the nearest 8-bit code and clamping.
Rgb8 lab_to_srgb(const Lab& lab) noexcept;

}  // namespace rppg::color
