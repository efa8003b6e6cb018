#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "rppg/roi_sampler.hpp"
#include "rppg/synthetic.hpp"

static void BM_RasterizePolygon(benchmark::State& state) {
  const double side = static_cast<double>(state.range(0));
  std::vector<rppg::roi::Point2> poly;
  for (int i = 0; i < 12; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 12.0;
    const double r = side * (i % 2 ? 0.45 : 0.3);
    poly.push_back({side / 2 + r * std::cos(a), side / 2 + r * std::sin(a)});
  }
  const int w = static_cast<int>(side);
  for (auto _ : state) benchmark::DoNotOptimize(rppg::roi::rasterize_polygon(poly, w, w));
}
BENCHMARK(BM_RasterizePolygon)->Arg(32)->Arg(256)->Arg(1024);

static void BM_SeriesFromFrames(benchmark::State& state) {
  const auto geometry = rppg::synth::default_geometry();
  const auto video = rppg::synth::generate_frames(rppg::synth::HrTrajectory::constant(72), 30.0, 10.0, {},
                                                  geometry, 1);
  std::vector<rppg::color::LabFrame> lab;
  for (const auto& f : video.frames) lab.push_back(rppg::color::convert_frame(f));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rppg::roi::build_series(lab, video.landmarks, geometry.cells, 30.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lab.size()));
}
BENCHMARK(BM_SeriesFromFrames);
