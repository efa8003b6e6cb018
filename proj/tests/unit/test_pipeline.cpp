#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "rppg/error.hpp"
#include "rppg/io.hpp"
#include "rppg/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rppg::pipeline;

rppg::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const rppg::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no rppg::Error thrown";
  return rppg::ErrorCode::kInvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

rppg::PipelineConfig scenario_config(const std::string& name, double duration) {
  rppg::KeyValueConfig kv;
  kv.set("synth.scenario", name);
  kv.set("synth.duration", rppg::io::format_number(duration));
  return rppg::PipelineConfig::from(kv);
}

TEST(Synth, WritesFourSchemaValidFiles) {
  oracle::TempDir dir("synth");
  const auto cfg = scenario_config("const72", 20);
  const SynthOutputs out = run_synth(cfg, 1, dir.path());
  rppg::io::RawFrameReader frames(out.frames);
  EXPECT_EQ(frames.frame_count(), 600u);
  EXPECT_EQ(frames.frame_rate(), 30.0);
  const auto marks = rppg::io::read_landmarks(out.landmarks);
  ASSERT_EQ(marks.size(), 600u);
  for (std::size_t i = 0; i < marks.size(); ++i) {
    ASSERT_EQ(marks[i].frame_index, static_cast<std::int64_t>(i));
    ASSERT_GE(marks[i].points.size(), 400u);
    for (const auto& p : marks[i].points) {
      ASSERT_TRUE(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0);
    }
  }
  const auto truth = rppg::io::read_curve_csv(out.truth);
  EXPECT_EQ(truth.size(), 600u);
  for (double b : truth.bpm) EXPECT_EQ(b, 72.0);
  EXPECT_EQ(slurp(out.signal).substr(0, 19), "time_seconds,value\n");
}

TEST(Synth, SameSeedSameBytes) {
  oracle::TempDir a("sa"), b("sb");
  const auto cfg = scenario_config("noisy72", 18);
  const auto fa = run_synth(cfg, 5, a.path());
  const auto fb = run_synth(cfg, 5, b.path());
  EXPECT_EQ(slurp(fa.frames), slurp(fb.frames));
  EXPECT_EQ(slurp(fa.landmarks), slurp(fb.landmarks));
  EXPECT_EQ(slurp(fa.signal), slurp(fb.signal));
  EXPECT_EQ(slurp(fa.truth), slurp(fb.truth));
}

TEST(Synth, RejectsOutOfBandRate) {
  oracle::TempDir dir("band");
  rppg::KeyValueConfig kv;
  kv.set("synth.bpm", "40");
  const auto cfg = rppg::PipelineConfig::from(kv);
  EXPECT_EQ(code_of([&] { run_synth(cfg, 1, dir.path()); }), rppg::ErrorCode::kInvalidConfig);
}

TEST(Extract, ConstantRateFromFrames) {
  oracle::TempDir dir("ex");
  const auto cfg = scenario_config("const72", 60);
  const auto files = run_synth(cfg, 3, dir.path());
  const ExtractResult r = run_extract(files.frames, files.landmarks, cfg);
  ASSERT_FALSE(r.curve.empty());
  const double mean = std::accumulate(r.curve.bpm.begin(), r.curve.bpm.end(), 0.0) /
                      static_cast<double>(r.curve.size());
  EXPECT_NEAR(mean, 72.0, 1.0);
  EXPECT_EQ(r.frame_count, 1800u);
  EXPECT_LE(r.fit.iterations, 100);
  for (double b : r.curve.bpm) {
    EXPECT_GE(b, 50.0);
    EXPECT_LE(b, 150.0);
  }
}

TEST(Extract, RepeatedRunsAreByteIdentical) {
  oracle::TempDir dir("det");
  const auto cfg = scenario_config("spikes72", 30);
  const auto files = run_synth(cfg, 4, dir.path());
  const auto a = run_extract(files.frames, files.landmarks, cfg);
  const auto b = run_extract(files.frames, files.landmarks, cfg);
  write_extract_outputs(a, cfg, dir / "a", {true, true});
  write_extract_outputs(b, cfg, dir / "b", {true, true});
  EXPECT_EQ(slurp(dir / "a/curve.csv"), slurp(dir / "b/curve.csv"));
  EXPECT_EQ(slurp(dir / "a/spectrogram.bin"), slurp(dir / "b/spectrogram.bin"));
  EXPECT_EQ(slurp(dir / "a/weights.bin"), slurp(dir / "b/weights.bin"));
  EXPECT_TRUE(fs::exists(dir / "a/run.json"));
  const auto dump = rppg::io::read_matrix_dump(dir / "a/weights.bin");
  EXPECT_EQ(std::string(dump.magic.data(), 4), "RPWM");
  EXPECT_EQ(dump.rows, a.spectrogram.bins());
  EXPECT_EQ(dump.cols, a.fit.polyline.size());
}

TEST(Extract, InputErrors) {
  oracle::TempDir dir("err");
  const auto cfg = scenario_config("const72", 20);
  const auto files = run_synth(cfg, 1, dir.path());
  EXPECT_EQ(code_of([&] { run_extract(files.frames, dir / "missing.jsonl", cfg); }),
            rppg::ErrorCode::kInputMissing);
  EXPECT_EQ(code_of([&] { run_extract(dir / "missing.rgb", files.landmarks, cfg); }),
            rppg::ErrorCode::kInputMissing);

  // drop the last landmark record
  auto marks = rppg::io::read_landmarks(files.landmarks);
  marks.pop_back();
  rppg::io::write_landmarks(dir / "short.jsonl", marks);
  EXPECT_EQ(code_of([&] { run_extract(files.frames, dir / "short.jsonl", cfg); }),
            rppg::ErrorCode::kLengthMismatch);

  std::ofstream(dir / "garbage.jsonl") << "{\"frame\": 0, \"points\": [[0.1]]}\n";
  EXPECT_EQ(code_of([&] { run_extract(files.frames, dir / "garbage.jsonl", cfg); }),
            rppg::ErrorCode::kParseError);
}

TEST(Extract, ConstantSignalIsEmptySpectrogram) {
  const auto cfg = rppg::PipelineConfig{};
  EXPECT_EQ(code_of([&] { extract_from_signal(std::vector<double>(2000, 5.0), cfg); }),
            rppg::ErrorCode::kEmptySpectrogram);
}

TEST(Extract, RuntimeScalesLinearly) {
  // wall-clock: doubling the video must not more than double the cost
  oracle::TempDir dir("rt");
  auto time_run = [&](double duration, const std::string& tag) {
    const auto cfg = scenario_config("const72", duration);
    const auto files = run_synth(cfg, 1, dir / tag);
    run_extract(files.frames, files.landmarks, cfg);  // warm caches
    double best = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      run_extract(files.frames, files.landmarks, cfg);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  };
  const double t1 = time_run(30, "short");
  const double t2 = time_run(60, "long");
  EXPECT_LE(t2, 2.0 * t1 + 0.25) << "t(30 s) = " << t1 << ", t(60 s) = " << t2;
}

TEST(Evaluate, IdenticalCurveScoresZero) {
  const rppg::HeartRateCurve c{{1, 2, 3}, {70, 72, 74}};
  const auto e = evaluate_curve(c, c, "x");
  EXPECT_EQ(e.mae, 0.0);
  EXPECT_EQ(e.pairs, 3u);
}

TEST(Evaluate, RawReferenceRecording) {
  oracle::TempDir dir("raw");
  {
    std::ofstream ref(dir / "ref.txt");
    ref << "time_seconds,amplitude\n";
    for (int i = 0; i < 100 * 60; ++i) {
      ref << rppg::io::format_number(i / 100.0) << ','
          << rppg::io::format_number(std::sin(2.0 * std::numbers::pi * 1.25 * i / 100.0)) << '\n';
    }
  }
  const auto hr = load_reference_curve(dir / "ref.txt", rppg::PipelineConfig{});
  for (double b : hr.bpm) EXPECT_NEAR(b, 75.0, 100.0 / 1707.0 * 60.0);
}

TEST(Evaluate, BatchOfStudyOffsetsAveragesToStudyMean) {
  oracle::TempDir dir("batch");
  std::ofstream manifest(dir / "manifest.csv");
  manifest << "experiment,subject,curve,reference\n";
  for (const auto& row : oracle::study_maes()) {
    rppg::HeartRateCurve ref, est;
    for (int i = 0; i < 300; ++i) {
      ref.times.push_back(8.5 + 0.1333 * i);
      ref.bpm.push_back(75.0 + 8.0 * std::sin(i * 0.02));
      est.times.push_back(ref.times.back());
      est.bpm.push_back(ref.bpm.back() + (i % 2 ? row.mae : -row.mae));
    }
    const std::string id = std::to_string(row.experiment);
    rppg::io::write_curve_csv(dir / ("est" + id + ".csv"), est);
    rppg::io::write_curve_csv(dir / ("ref" + id + ".csv"), ref);
    manifest << id << ',' << row.subject << ",est" << id << ".csv,ref" << id << ".csv\n";
  }
  manifest.close();
  const RunReport report = evaluate_batch(dir / "manifest.csv", rppg::PipelineConfig{});
  ASSERT_EQ(report.entries.size(), 26u);
  for (std::size_t i = 0; i < 26; ++i) {
    EXPECT_NEAR(report.entries[i].mae, oracle::study_maes()[i].mae, 0.01);
  }
  EXPECT_NEAR(report.mean_mae, 1.95, 0.01);

  write_report(report, dir / "out");
  const RunReport back = read_report(dir / "out/report.json");
  EXPECT_EQ(back.entries.size(), 26u);
  EXPECT_EQ(back.mean_mae, report.mean_mae);
  const std::string table = format_report(back);
  EXPECT_NE(table.find("MAE, bpm"), std::string::npos);
  EXPECT_NE(table.find("1.94"), std::string::npos);
  EXPECT_EQ(slurp(dir / "out/evaluation.csv").substr(0, 33), "experiment,subject,mae_bpm,pairs\n");
}

TEST(Evaluate, BatchErrors) {
  oracle::TempDir dir("berr");
  EXPECT_EQ(code_of([&] { evaluate_batch(dir / "none.csv", {}); }), rppg::ErrorCode::kInputMissing);
  std::ofstream(dir / "bad.csv") << "a,b\n";
  EXPECT_EQ(code_of([&] { evaluate_batch(dir / "bad.csv", {}); }), rppg::ErrorCode::kParseError);
}

}  // namespace
