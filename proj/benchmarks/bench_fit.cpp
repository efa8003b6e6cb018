#include <benchmark/benchmark.h>

#include "rppg/config.hpp"
#include "rppg/pipeline.hpp"
#include "rppg/polyline_fitter.hpp"
#include "rppg/synthetic.hpp"

namespace {

std::vector<double> ramp_signal(double seconds) {
  const auto traj = rppg::synth::HrTrajectory::ramp(0.0, 60.0, seconds, 100.0);
  rppg::synth::DistortionSpec d;
  d.additive_noise_sigma = 0.3;
  return rppg::synth::generate_signal(traj, 30.0, seconds, d, 1).samples;
}

}  // namespace

static void BM_GradLoss(benchmark::State& state) {
  const double seconds = static_cast<double>(state.range(0));
  const rppg::PipelineConfig cfg;
  const auto spec = rppg::spectral::analyze(ramp_signal(seconds), cfg.stft);
  const auto fc = cfg.fit_for_duration(seconds);
  const auto poly = rppg::fit::init_polyline(spec, fc);
  for (auto _ : state) benchmark::DoNotOptimize(rppg::fit::grad_loss(poly, spec, fc));
}
BENCHMARK(BM_GradLoss)->Arg(60)->Arg(300);

static void BM_Fit(benchmark::State& state) {
  const double seconds = static_cast<double>(state.range(0));
  const rppg::PipelineConfig cfg;
  const auto spec = rppg::spectral::analyze(ramp_signal(seconds), cfg.stft);
  const auto fc = cfg.fit_for_duration(seconds);
  for (auto _ : state) benchmark::DoNotOptimize(rppg::fit::fit(spec, fc));
}
BENCHMARK(BM_Fit)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);

// whole signal-to-curve path; cost should grow linearly with video length
static void BM_ExtractFromSignal(benchmark::State& state) {
  const double seconds = static_cast<double>(state.range(0));
  const auto signal = ramp_signal(seconds);
  const rppg::PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(rppg::pipeline::extract_from_signal(signal, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExtractFromSignal)->Arg(60)->Arg(120)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oN);
