#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "rppg/error.hpp"

namespace rppg::spectral::detail {
namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t length) : length_(length) {
  if (length < 2) throw Error(ErrorCode::kInvalidArgument, "FFT length must be at least 2");
  std::lock_guard lock(planner_mutex());
  in_ = fftw_alloc_real(length_);
  auto* out = fftw_alloc_complex(bins());
  out_ = out;
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(length_), in_, out, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(static_cast<fftw_complex*>(out_));
  fftw_free(in_);
}

void RealFft::magnitudes(std::span<const double> input, std::span<double> out) {
  if (input.size() != length_ || out.size() != bins()) {
    throw Error(ErrorCode::kInvalidArgument, "FFT buffer size mismatch");
  }
  std::copy(input.begin(), input.end(), in_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  const auto* spectrum = static_cast<const fftw_complex*>(out_);
  for (std::size_t j = 0; j < bins(); ++j) out[j] = std::hypot(spectrum[j][0], spectrum[j][1]);
}

}  // namespace rppg::spectral::detail
