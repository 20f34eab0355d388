// tests/io-test.cc

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
#include <fstream>
#include <numbers>

#include "gazev/binary-io.h"
#include "gazev/config.h"
#include "gazev/wav.h"
#include "test-util.h"

namespace gazev {
namespace {

TEST(Config, DefaultsCoverTable) {
  Config c = Config::Defaults();
  for (const auto &e : Config::Table()) EXPECT_EQ(c.GetString(e.key), e.value);
  EXPECT_EQ(c.GetInt("train.batch_size"), 32);
  EXPECT_DOUBLE_EQ(c.GetDouble("train.learning_rate"), 1e-4);
  EXPECT_FALSE(c.GetBool("loss.saturating_adv"));
}

TEST(Config, FileOverridesAndComments) {
  TempDir dir("config");
  {
    std::ofstream f(dir / "a.conf");
    f << "# comment\n\ntrain.batch_size = 8   # trailing\n  net.mode=stargan_baseline\n";
  }
  Config c = Config::Defaults();
  c.ReadFile(dir / "a.conf");
  EXPECT_EQ(c.GetInt("train.batch_size"), 8);
  EXPECT_EQ(c.GetString("net.mode"), "stargan_baseline");
  // ToText is accepted by ReadFile.
  {
    std::ofstream f(dir / "b.conf");
    f << c.ToText();
  }
  Config d = Config::Defaults();
  d.ReadFile(dir / "b.conf");
  EXPECT_EQ(c.values(), d.values());
}

TEST(Config, UnknownKeysAndBadValues) {
  Config c = Config::Defaults();
  EXPECT_THROW(c.Set("train.batchsize", "3"), GazevError);
  EXPECT_FALSE(c.Has("train.batchsize"));
  c.Set("train.batch_size", "three");
  EXPECT_THROW(c.GetInt("train.batch_size"), GazevError);
  c.Set("loss.saturating_adv", "maybe");
  EXPECT_THROW(c.GetBool("loss.saturating_adv"), GazevError);
  TempDir dir("config-bad");
  {
    std::ofstream f(dir / "bad.conf");
    f << "no equals sign here\n";
  }
  EXPECT_THROW(c.ReadFile(dir / "bad.conf"), GazevError);
  EXPECT_THROW(c.ReadFile(dir / "missing.conf"), GazevError);
}

TEST(Fnv1a, PublishedVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(HexDigest(0xabcull), "0000000000000abc");
}

TEST(Binary, RoundTripAndOverrun) {
  BinaryWriter w;
  w.Put<std::int32_t>(-5);
  w.PutVector(std::vector<double>{1.5, -2.25});
  w.PutString("hello");
  const std::string &buf = w.buffer();
  BinaryReader r(buf.data(), buf.size(), "test");
  EXPECT_EQ(r.Get<std::int32_t>(), -5);
  EXPECT_EQ(r.GetVector<double>(), (std::vector<double>{1.5, -2.25}));
  EXPECT_EQ(r.GetString(), "hello");
  EXPECT_TRUE(r.AtEnd());
  BinaryReader t(buf.data(), buf.size() - 1, "short");
  t.Get<std::int32_t>();
  t.GetVector<double>();
  EXPECT_THROW(t.GetString(), GazevError);
}

TEST(Binary, AtomicWriteCreatesParents) {
  TempDir dir("atomic");
  std::string path = dir / "x/y/z.bin";
  WriteFileAtomic(path, "abc");
  EXPECT_EQ(ReadFileBytes(path), "abc");
  WriteFileAtomic(path, "defg");
  EXPECT_EQ(ReadFileBytes(path), "defg");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THROW(ReadFileBytes(dir / "nope"), GazevError);
}

TEST(Wav, RoundTripQuantisation) {
  TempDir dir("wav");
  Waveform w;
  w.sample_rate = 16000;
  for (int i = 0; i < 1600; ++i) w.samples.push_back(0.5 * std::sin(0.01 * i));
  WriteWav(dir / "a.wav", w);
  Waveform r = ReadWav(dir / "a.wav");
  EXPECT_EQ(r.sample_rate, 16000);
  ASSERT_EQ(r.samples.size(), w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    EXPECT_NEAR(r.samples[i], w.samples[i], 1.0 / 32768);
  EXPECT_DOUBLE_EQ(r.Seconds(), 0.1);
}

TEST(Wav, StereoIsDownmixed) {
  TempDir dir("wav-stereo");
  // Hand-built 16-bit stereo file, two frames.
  std::string data;
  auto put16 = [&](std::int16_t v) { data.append(reinterpret_cast<char *>(&v), 2); };
  auto put32 = [&](std::uint32_t v) { data.append(reinterpret_cast<char *>(&v), 4); };
  data += "RIFF";
  put32(36 + 8);
  data += "WAVEfmt ";
  put32(16);
  put16(1);
  put16(2);
  put32(8000);
  put32(8000 * 4);
  put16(4);
  put16(16);
  data += "data";
  put32(8);
  put16(16384);
  put16(0);
  put16(-8192);
  put16(-8192);
  WriteFileAtomic(dir / "s.wav", data);
  Waveform w = ReadWav(dir / "s.wav");
  ASSERT_EQ(w.samples.size(), 2u);
  EXPECT_NEAR(w.samples[0], 0.25, 1e-9);
  EXPECT_NEAR(w.samples[1], -0.25, 1e-9);
}

TEST(Wav, RejectsGarbage) {
  TempDir dir("wav-bad");
  WriteFileAtomic(dir / "bad.wav", "not a wav file at all");
  EXPECT_THROW(ReadWav(dir / "bad.wav"), GazevError);
}

TEST(Resample, PreservesInBandTone) {
  const int from = 44100, to = 22050;
  std::vector<double> x(from);
  for (int i = 0; i < from; ++i) x[i] = std::sin(2 * std::numbers::pi * 440.0 * i / from);
  std::vector<double> y = Resample(x, from, to);
  EXPECT_NEAR(static_cast<double>(y.size()), to, 1);
  double err = 0;
  for (int i = 2000; i < to - 2000; ++i)
    err = std::max(err, std::abs(y[i] - std::sin(2 * std::numbers::pi * 440.0 * i / to)));
  EXPECT_LT(err, 1e-2);
  EXPECT_EQ(Resample(x, from, from), x);
}

}  // namespace
}  // namespace gazev
