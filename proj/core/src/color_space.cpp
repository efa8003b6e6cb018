#include "rppg/color_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rppg/error.hpp"

namespace rppg::color {
namespace {

constexpr double kDelta = 6.0 / 29.0;
constexpr double kDeltaCube = kDelta * kDelta * kDelta;

double lab_f(double t) {
  return t > kDeltaCube ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inverse(double f) {
  return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

double expand(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) t[static_cast<std::size_t>(i)] = expand(i / 255.0);
    return t;
  }();
  return table;
}

std::uint8_t quantize(double encoded) {
  const double v = std::round(std::clamp(encoded, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(v);
}

void check_dims(int width, int height, std::size_t count) {
  if (width < 0 || height < 0 ||
      count != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel count does not match frame dimensions");
  }
}

}  // namespace

RgbFrame::RgbFrame(int width, int height, Rgb8 fill)
    : width_(width), height_(height) {
  check_dims(width, height, static_cast<std::size_t>(std::max(width, 0)) *
                                static_cast<std::size_t>(std::max(height, 0)));
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RgbFrame::RgbFrame(int width, int height, std::vector<Rgb8> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height, pixels_.size());
}

LabFrame::LabFrame(int width, int height, std::vector<Lab> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height, pixels_.size());
}

double srgb_to_linear(std::uint8_t value) noexcept { return linear_table()[value]; }

double linear_to_srgb(double linear) noexcept {
  const double c = std::clamp(linear, 0.0, 1.0);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

Xyz linear_rgb_to_xyz(double r, double g, double b) noexcept {
  return {0.4124564 * r + 0.3575761 * g + 0.1804375 * b,
          0.2126729 * r + 0.7151522 * g + 0.0721750 * b,
          0.0193339 * r + 0.1191920 * g + 0.9503041 * b};
}

Lab xyz_to_lab(const Xyz& xyz) noexcept {
  const double fx = lab_f(xyz.x / kWhiteD65.x);
  const double fy = lab_f(xyz.y / kWhiteD65.y);
  const double fz = lab_f(xyz.z / kWhiteD65.z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Lab srgb_to_lab(Rgb8 pixel) noexcept {
  return xyz_to_lab(
      linear_rgb_to_xyz(srgb_to_linear(pixel.r), srgb_to_linear(pixel.g), srgb_to_linear(pixel.b)));
}

LabFrame convert_frame(const RgbFrame& frame) {
  std::vector<Lab> out(frame.pixels().size());
  std::transform(frame.pixels().begin(), frame.pixels().end(), out.begin(), srgb_to_lab);
  return LabFrame(frame.width(), frame.height(), std::move(out));
}

void lab_to_linear_rgb(const Lab& lab, double& r, double& g, double& b) noexcept {
  const double fy = (lab.l + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const double x = kWhiteD65.x * lab_f_inverse(fx);
  const double y = kWhiteD65.y * lab_f_inverse(fy);
  const double z = kWhiteD65.z * lab_f_inverse(fz);
  // Inverse of the RGB->XYZ matrix above.
  r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
}

Rgb8 lab_to_srgb(const Lab& lab) noexcept {
  double r = 0, g = 0, b = 0;
  lab_to_linear_rgb(lab, r, g, b);
  return {quantize(linear_to_srgb(r)), quantize(linear_to_srgb(g)), quantize(linear_to_srgb(b))};
}

}  // namespace rppg::color
