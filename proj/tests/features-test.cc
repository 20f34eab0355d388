// tests/features-test.cc

// Copyright 2026  GAZEV-VC Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "gazev/binary-io.h"
#include "gazev/corpus.h"
#include "gazev/eval.h"
#include "gazev/features.h"
#include "gazev/wav.h"
#include "test-util.h"
#include "world/codec.h"
#include "world/constantnumbers.h"

namespace gazev {
namespace {

namespace fs = std::filesystem;

Waveform SynthWave(int speaker, int utterance) {
  SynthConfig cfg;
  SynthUtterance u = RenderSynthUtterance(cfg, MakeSynthVoice(cfg, speaker), utterance);
  Waveform w;
  w.sample_rate = cfg.sample_rate;
  w.samples = u.samples;
  return w;
}

Waveform Silence(double seconds, int fs = 22050) {
  Waveform w;
  w.sample_rate = fs;
  w.samples.assign(static_cast<std::size_t>(seconds * fs), 0.0);
  return w;
}

TEST(Analyze, FrameCountForOneSecond) {
  Waveform w = SynthWave(0, 0);
  w.samples.resize(22050);
  VocoderFeatures f = Analyze(w, AnalysisParams());
  EXPECT_NEAR(f.NumFrames(), 200, 1);
  EXPECT_EQ(f.mcc.cols(), 36);
  EXPECT_EQ(f.mcc.rows(), f.NumFrames());
  EXPECT_EQ(static_cast<int>(f.energy.size()), f.NumFrames());
}

TEST(Analyze, SilenceIsUnvoiced) {
  VocoderFeatures f = Analyze(Silence(0.5), AnalysisParams());
  for (double v : f.f0) EXPECT_EQ(v, 0.0);
}

TEST(Analyze, TooShortInputIsFatal) {
  EXPECT_THROW(Analyze(Silence(0.001), AnalysisParams()), GazevError);
}

TEST(Analyze, ResamplesInput) {
  Waveform w = SynthWave(1, 0);
  Waveform w16;
  w16.sample_rate = 16000;
  w16.samples = Resample(w.samples, w.sample_rate, 16000);
  VocoderFeatures a = Analyze(w, AnalysisParams());
  VocoderFeatures b = Analyze(w16, AnalysisParams());
  EXPECT_EQ(b.sample_rate, 22050);
  EXPECT_NEAR(a.NumFrames(), b.NumFrames(), 1);
}

// Property: frame count tracks duration for arbitrary lengths.
TEST(Analyze, FrameCountFuzz) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 0.05);
  for (int trial = 0; trial < 12; ++trial) {
    int n = 400 + rng() % 20000;
    Waveform w;
    w.sample_rate = 22050;
    for (int i = 0; i < n; ++i) w.samples.push_back(noise(rng));
    VocoderFeatures f = Analyze(w, AnalysisParams());
    double expected = n / 22050.0 * 1000 / 5;
    EXPECT_NEAR(f.NumFrames(), expected, 1.5) << n;
    EXPECT_NO_THROW(f.Check());
  }
}

TEST(Synthesize, DurationAndRoundTripMcd) {
  for (int speaker : {0, 1}) {
    Waveform w = SynthWave(speaker, 2);
    VocoderFeatures f = Analyze(w, AnalysisParams());
    Waveform y = Synthesize(f);
    EXPECT_NEAR(static_cast<double>(y.samples.size()), static_cast<double>(w.samples.size()),
                22050 * 0.005 + 1);
    VocoderFeatures g = Analyze(y, AnalysisParams());
    int n = std::min(f.NumFrames(), g.NumFrames());
    double mcd = Mcd(f.mcc.topRows(n), g.mcc.topRows(n));
    EXPECT_LT(mcd, 1.5) << "speaker " << speaker;
  }
}

TEST(Synthesize, ZeroF0GivesUnvoicedOutput) {
  VocoderFeatures f = Analyze(SynthWave(0, 1), AnalysisParams());
  std::fill(f.f0.begin(), f.f0.end(), 0.0);
  Waveform y = Synthesize(f);
  VocoderFeatures g = Analyze(y, AnalysisParams());
  int voiced = 0;
  for (double v : g.f0) voiced += v > 0;
  EXPECT_LT(voiced, g.NumFrames() / 20);
}

TEST(Synthesize, NonFiniteInputIsFatal) {
  VocoderFeatures f = Analyze(SynthWave(0, 1), AnalysisParams());
  f.mcc(3, 2) = std::nan("");
  EXPECT_THROW(Synthesize(f), GazevError);
  f = Analyze(SynthWave(0, 1), AnalysisParams());
  f.f0[0] = -1;
  EXPECT_THROW(Synthesize(f), GazevError);
}

// Oracle: a known mel-cosine log envelope coded by WORLD comes back as the
// cepstrum times 2*sqrt(2), the factor the feature pipeline removes.
TEST(Codec, CodedScaleMatchesCepstrum) {
  const int fs = 22050, fft = 1024, bins = fft / 2 + 1, dims = 37;
  auto mel = [](double f) { return 1127.01048 * std::log(f / 700.0 + 1); };
  const double c0 = 1.0, c1 = 0.3, c2 = -0.1;
  const double lo = mel(world::kFloorFrequency);
  const double hi = mel(std::min(fs / 2.0, world::kCeilFrequency));
  std::vector<double> sp(bins), coded(dims);
  for (int i = 0; i < bins; ++i) {
    double w = M_PI * (mel(double(i) * fs / fft) - lo) / (hi - lo);
    w = std::clamp(w, 0.0, M_PI);
    sp[i] = std::exp(2 * (c0 + 2 * c1 * std::cos(w) + 2 * c2 * std::cos(2 * w)));
  }
  const double *in = sp.data();
  double *out = coded.data();
  CodeSpectralEnvelope(&in, 1, fs, fft, dims, &out);
  const double k = 2 * std::sqrt(2.0);
  EXPECT_NEAR(coded[1] / k, c1, 0.01);
  EXPECT_NEAR(coded[2] / k, c2, 0.01);
  for (int d = 3; d < 10; ++d) EXPECT_NEAR(coded[d] / k, 0.0, 0.01);
}

FrameMatrix Ramp(int frames, int dim) {
  FrameMatrix m(frames, dim);
  for (int i = 0; i < frames; ++i)
    for (int d = 0; d < dim; ++d) m(i, d) = i * 100 + d;
  return m;
}

TEST(Segment, Examples) {
  auto s = Segment(Ramp(600, 36), 256, 256, SegmentMode::kTraining, 4);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].values.rows(), 36);
  EXPECT_EQ(s[0].values.cols(), 256);
  EXPECT_EQ(s[1].values(0, 0), 256 * 100);
  EXPECT_EQ(s[1].source_speaker, 4);
  EXPECT_TRUE(Segment(Ramp(200, 36), 256, 256, SegmentMode::kTraining).empty());
  auto inf = Segment(Ramp(200, 36), 256, 256, SegmentMode::kInference);
  ASSERT_EQ(inf.size(), 1u);
  EXPECT_EQ(inf[0].valid_frames, 200);
  EXPECT_EQ(inf[0].values(5, 199), 199 * 100 + 5);
  EXPECT_EQ(inf[0].values(5, 200), 0.0);
  EXPECT_EQ(inf[0].values.cols(), 256);
  EXPECT_THROW(Segment(Ramp(10, 2), 0, 1, SegmentMode::kTraining), GazevError);
}

// Property: inference segmentation followed by reassembly is lossless.
TEST(Segment, UnsegmentRoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    int frames = 1 + rng() % 1500;
    FrameMatrix m = FrameMatrix::Random(frames, 36);
    auto s = Segment(m, 256, 256, SegmentMode::kInference);
    EXPECT_EQ(static_cast<int>(s.size()), (frames + 255) / 256);
    EXPECT_EQ(Unsegment(s, frames), m);
  }
}

VocoderFeatures WithF0(std::vector<double> f0) {
  VocoderFeatures f;
  f.sample_rate = 22050;
  f.frame_period_ms = 5;
  f.f0 = f0;
  f.energy.assign(f0.size(), 0.0);
  f.mcc = FrameMatrix::Zero(f0.size(), 2);
  f.ap = FrameMatrix::Zero(f0.size(), 1);
  for (std::size_t i = 0; i < f0.size(); ++i) f.mcc(i, 0) = i, f.mcc(i, 1) = 1;
  return f;
}

TEST(Stats, Examples) {
  VocoderFeatures a = WithF0({100, 0, 100, 400});
  SpeakerStats s = ComputeStats({&a});
  double l1 = std::log(100), l4 = std::log(400);
  EXPECT_NEAR(s.logf0_mean, (2 * l1 + l4) / 3, 1e-12);
  double var = (2 * l1 * l1 + l4 * l4) / 3 - s.logf0_mean * s.logf0_mean;
  EXPECT_NEAR(s.logf0_std, std::sqrt(var), 1e-12);
  EXPECT_NEAR(s.mcc_mean[0], 1.5, 1e-12);
  EXPECT_EQ(s.mcc_std[1], kStatsStdFloor);
  VocoderFeatures c = WithF0({150, 150, 150});
  EXPECT_EQ(ComputeStats({&c}).logf0_std, kStatsStdFloor);
  VocoderFeatures u = WithF0({0, 0});
  EXPECT_THROW(ComputeStats({&u}), GazevError);
  EXPECT_THROW(ComputeStats({}), GazevError);
}

TEST(Stats, MaleMeanBelowFemaleMean) {
  VocoderFeatures m = Analyze(SynthWave(0, 0), AnalysisParams());
  VocoderFeatures f = Analyze(SynthWave(1, 0), AnalysisParams());
  EXPECT_LT(ComputeStats({&m}).logf0_mean, ComputeStats({&f}).logf0_mean);
  EXPECT_EQ(ComputeStats({&m}), ComputeStats({&m}));
}

TEST(TransformF0, ExamplesAndMask) {
  SpeakerStats src, tgt;
  src.logf0_mean = std::log(100);
  src.logf0_std = 0.1;
  tgt.logf0_mean = std::log(200);
  tgt.logf0_std = 0.2;
  auto out = TransformF0({100, 0, 100 * std::exp(0.1)}, src, tgt);
  EXPECT_NEAR(out[0], 200, 1e-9);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_NEAR(out[2], 200 * std::exp(0.2), 1e-9);
  auto same = TransformF0({123, 0, 87}, src, src);
  EXPECT_NEAR(same[0], 123, 1e-9);
  EXPECT_NEAR(same[2], 87, 1e-9);
  src.logf0_std = kStatsStdFloor;
  LogCapture logs;
  auto floored = TransformF0({100}, src, tgt);
  EXPECT_NEAR(floored[0], 200, 1e-9);
  EXPECT_TRUE(logs.Contains("identity"));
}

TEST(Standardize, RoundTrip) {
  SpeakerStats s;
  s.mcc_mean = {1, -2};
  s.mcc_std = {2, 0.5};
  FrameMatrix m = FrameMatrix::Random(7, 2);
  FrameMatrix z = Standardize(m, s);
  EXPECT_NEAR(z(0, 0), (m(0, 0) - 1) / 2, 1e-12);
  EXPECT_TRUE(Destandardize(z, s).isApprox(m, 1e-12));
}

TEST(FeatureCache, RoundTripAndKey) {
  TempDir dir("cache");
  Waveform w = SynthWave(0, 0);
  std::string wav = dir / "a.wav";
  WriteWav(wav, w);
  AnalysisParams p;
  FeatureCache cache((dir.path() / "feat").string(), p);
  fs::create_directories(cache.dir());
  EXPECT_FALSE(cache.Contains(wav));
  VocoderFeatures a = cache.Get(wav);
  EXPECT_TRUE(cache.Contains(wav));
  VocoderFeatures b = cache.Get(wav);
  EXPECT_EQ(a.f0, b.f0);
  EXPECT_EQ(a.mcc, b.mcc);
  AnalysisParams q = p;
  q.mcc_dim = 24;
  EXPECT_NE(FeatureCache(cache.dir(), q).PathFor(wav), cache.PathFor(wav));
  // Corrupt entries are re-analysed with a warning.
  WriteFileAtomic(cache.PathFor(wav), "junk");
  LogCapture logs;
  VocoderFeatures c = cache.Get(wav);
  EXPECT_EQ(c.mcc, a.mcc);
  EXPECT_TRUE(logs.Contains("Re-analysing"));
}

TEST(FeatureFile, ChecksumDetectsCorruption) {
  TempDir dir("featfile");
  VocoderFeatures f = WithF0({100, 120});
  std::string path = dir / "x.feat";
  SaveFeatures(path, f);
  VocoderFeatures g = LoadFeatures(path);
  EXPECT_EQ(g.f0, f.f0);
  EXPECT_EQ(g.mcc, f.mcc);
  std::string bytes = ReadFileBytes(path);
  bytes[20] ^= 1;
  WriteFileAtomic(path, bytes);
  EXPECT_THROW(LoadFeatures(path), GazevError);
}

}  // namespace
}  // namespace gazev
