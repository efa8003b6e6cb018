#include <benchmark/benchmark.h>

#include "rppg/spectrogram.hpp"
#include "rppg/synthetic.hpp"

static void BM_Analyze(benchmark::State& state) {
  const double seconds = static_cast<double>(state.range(0));
  rppg::synth::DistortionSpec d;
  d.additive_noise_sigma = 0.3;
  const auto s = rppg::synth::generate_signal(rppg::synth::HrTrajectory::constant(72), 30.0, seconds, d, 1);
  const rppg::spectral::StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(rppg::spectral::analyze(s.samples, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Analyze)->Arg(60)->Arg(120)->Arg(300)->Arg(600)->Complexity(benchmark::oN);
