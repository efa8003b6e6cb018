#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rppg::spectral::detail {

/// Real-input forward DFT of a fixed length, magnitudes of bins 0..N/2.
/// Owns its FFTW plan and buffers; not shareable between threads.
class RealFft {
 public:
  explicit RealFft(std::size_t length);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t length() const noexcept { return length_; }
  std::size_t bins() const noexcept { return length_ / 2 + 1; }

  /// input.size() == length(), out.size() == bins().
  void magnitudes(std::span<const double> input, std::span<double> out);

 private:
  std::size_t length_;
  double* in_ = nullptr;
  void* out_ = nullptr;  // fftw_complex*
  void* plan_ = nullptr;  // fftw_plan
};

}  // namespace rppg::spectral::detail
