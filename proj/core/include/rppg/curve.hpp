#pragma once

#include <vector>

namespace rppg {

/// Heart rate over time: times in seconds (strictly increasing), bpm per time.
struct HeartRateCurve {
  std::vector<double> times;
  std::vector<double> bpm;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

}  // namespace rppg
