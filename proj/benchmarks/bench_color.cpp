#include <benchmark/benchmark.h>

#include <random>

#include "rppg/color_space.hpp"

static void BM_ConvertFrame(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> c(0, 255);
  std::vector<rppg::color::Rgb8> px(static_cast<std::size_t>(side * side));
  for (auto& p : px) {
    p = {static_cast<std::uint8_t>(c(rng)), static_cast<std::uint8_t>(c(rng)),
         static_cast<std::uint8_t>(c(rng))};
  }
  const rppg::color::RgbFrame frame(side, side, px);
  for (auto _ : state) benchmark::DoNotOptimize(rppg::color::convert_frame(frame));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ConvertFrame)->Arg(64)->Arg(256)->Arg(640);
