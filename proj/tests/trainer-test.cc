// tests/trainer-test.cc

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
#include <random>
#include <sstream>

#include "gazev/binary-io.h"
#include "gazev/pipeline.h"
#include "gazev/trainer.h"
#include "test-util.h"
#include "json.hpp"

namespace gazev {
namespace {

namespace fs = std::filesystem;

NetConfig ToyNet(ConditioningMode mode) {
  NetConfig c;
  c.mode = mode;
  c.num_speakers = 3;
  c.gen_channels = 4;
  c.dis_channels = 4;
  c.enc_channels = 4;
  c.prior_hidden = 16;
  return c;
}

SpeakerTable ToyTable() {
  SpeakerTable t;
  t.ids = {"a", "b", "c"};
  t.genders = {Gender::kMale, Gender::kFemale, Gender::kFemale};
  return t;
}

TrainingData ToyData(const NetConfig &net, int segments = 12) {
  TrainingData d;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0, 1);
  SpeakerTable table = ToyTable();
  for (int i = 0; i < segments; ++i) {
    MccSegment s;
    s.values = FrameMatrix(net.mcc_dim, net.num_frames);
    for (Eigen::Index k = 0; k < s.values.size(); ++k) s.values.data()[k] = normal(rng);
    int cls = i % 3;
    d.Add(s, cls, table.genders[cls]);
  }
  return d;
}

TrainState ToyState(ConditioningMode mode, std::uint64_t seed = 5) {
  TrainState s = TrainState::Fresh(ToyNet(mode), AdamOptions(), seed);
  s.speakers = ToyTable();
  s.stats.global.mcc_mean.assign(36, 0.0);
  s.stats.global.mcc_std.assign(36, 1.0);
  return s;
}

TrainConfig ToyTrainConfig(const std::string &out_dir, int steps) {
  TrainConfig c;
  c.batch_size = 2;
  c.total_steps = steps;
  c.checkpoint_every = 5;
  c.out_dir = out_dir;
  c.audit_every = 1;
  return c;
}

TEST(TrainConfig, Checks) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Check());
  c.batch_size = 1;
  EXPECT_THROW(c.Check(), GazevError);
  c = TrainConfig();
  c.total_steps = 0;
  EXPECT_THROW(c.Check(), GazevError);
  c = TrainConfig();
  c.adam.learning_rate = 0;
  EXPECT_THROW(c.Check(), GazevError);
  c = TrainConfig();
  c.checkpoint_every = 0;
  EXPECT_THROW(c.Check(), GazevError);
}

TEST(TrainConfig, Defaults) {
  TrainConfig c = TrainConfig::FromConfig(Config::Defaults());
  EXPECT_EQ(c.batch_size, 32);
  EXPECT_NEAR(c.adam.learning_rate, 1e-4, 1e-12);
  EXPECT_NEAR(c.adam.beta1, 0.5, 1e-12);
  EXPECT_NEAR(c.adam.beta2, 0.999, 1e-12);
}

TEST(SampleBatch, ShapesAndDeterminism) {
  NetConfig net = ToyNet(ConditioningMode::kGazev);
  TrainingData data = ToyData(net);
  std::mt19937_64 a(1), b(1);
  Batch x = SampleBatch(data, ToyTable(), net, 32, &a);
  Batch y = SampleBatch(data, ToyTable(), net, 32, &b);
  EXPECT_EQ(x.size(), 32);
  EXPECT_EQ(x.x.shape(), Shape({32, 1, 36, 256}));
  EXPECT_EQ(x.z1.shape(), Shape({32, net.prior_dim, 1, 1}));
  EXPECT_EQ(x.src_gender, y.src_gender);
  EXPECT_EQ(x.tgt_gender, y.tgt_gender);
  EXPECT_EQ(x.src_class, y.src_class);
  for (std::size_t i = 0; i < x.x.size(); ++i) ASSERT_EQ(x.x[i], y.x[i]);
  for (std::size_t i = 0; i < x.z1.size(); ++i) ASSERT_EQ(x.z1[i], y.z1[i]);
  for (int i = 0; i < 32; ++i)
    EXPECT_EQ(x.src_gender[i], static_cast<int>(ToyTable().genders[x.src_class[i]]));
}

TEST(SampleBatch, TargetGenderIsBalanced) {
  NetConfig net = ToyNet(ConditioningMode::kGazev);
  TrainingData data = ToyData(net, 3);
  std::mt19937_64 rng(2);
  long ones = 0, total = 0;
  while (total < 10000) {
    Batch b = SampleBatch(data, ToyTable(), net, 100, &rng);
    for (int g : b.tgt_gender) ones += g, ++total;
  }
  EXPECT_NEAR(static_cast<double>(ones) / total, 0.5, 0.02);
}

TEST(SampleBatch, BaselineTargetsCoverSpeakers) {
  NetConfig net = ToyNet(ConditioningMode::kStarGanBaseline);
  TrainingData data = ToyData(net, 3);
  std::mt19937_64 rng(2);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 20; ++i)
    for (int c : SampleBatch(data, ToyTable(), net, 30, &rng).tgt_class) ++counts[c];
  for (int c : counts) EXPECT_GT(c, 150);
}

TEST(TrainStep, DeterministicAndPartitioned) {
  for (ConditioningMode mode : {ConditioningMode::kGazev, ConditioningMode::kStarGanBaseline}) {
    NetConfig net = ToyNet(mode);
    TrainingData data = ToyData(net);
    TrainState a = ToyState(mode), b = ToyState(mode);
    LossWeights w;
    for (int step = 0; step < 2; ++step) {
      Batch ba = SampleBatch(data, a.speakers, a.net, 2, &a.rng);
      Batch bb = SampleBatch(data, b.speakers, b.net, 2, &b.rng);
      PartitionAudit audit;
      LossBundle la = TrainStep(&a, ba, w, &audit);
      LossBundle lb = TrainStep(&b, bb, w);
      EXPECT_TRUE(audit.Ok());
      EXPECT_NE(audit.gen_before, 0u);
      EXPECT_NE(audit.critic_before_gen_phase, audit.critic_after == 0 ? 1 : 0);
      EXPECT_EQ(la.total_g, lb.total_g);
      EXPECT_EQ(la.total_dc, lb.total_dc);
      EXPECT_NEAR(la.total_g, TotalGLoss(la, w), 1e-6 * std::max(1.0, std::abs(la.total_g)));
      EXPECT_NEAR(la.total_dc, TotalDcLoss(la, w), 1e-6 * std::max(1.0, std::abs(la.total_dc)));
    }
    EXPECT_EQ(a.step, 2);
    EXPECT_TRUE(StatesEqual(a, b));
  }
}

TEST(TrainStep, EachPhaseMovesOnlyItsSide) {
  NetConfig net = ToyNet(ConditioningMode::kGazev);
  TrainingData data = ToyData(net);
  TrainState s = ToyState(ConditioningMode::kGazev);
  std::uint64_t gen0 = HashParams(s.model->GeneratorSideParams());
  std::uint64_t critic0 = HashParams(s.model->CriticSideParams());
  PartitionAudit audit;
  Batch b = SampleBatch(data, s.speakers, s.net, 2, &s.rng);
  TrainStep(&s, b, LossWeights(), &audit);
  EXPECT_EQ(audit.gen_before, gen0);
  EXPECT_EQ(audit.gen_after_critic_phase, gen0);
  EXPECT_NE(audit.critic_before_gen_phase, critic0);
  EXPECT_NE(HashParams(s.model->GeneratorSideParams()), gen0);
  EXPECT_EQ(HashParams(s.model->CriticSideParams()), audit.critic_after);
}

TEST(Train, NonFiniteLossAborts) {
  TempDir dir("nan");
  NetConfig net = ToyNet(ConditioningMode::kGazev);
  TrainingData data = ToyData(net);
  TrainState s = ToyState(ConditioningMode::kGazev);
  s.model->CriticSideParams()[0].var->value[0] = std::nan("");
  try {
    Train(ToyTrainConfig(dir / "run", 3), data, &s);
    FAIL();
  } catch (const GazevError &e) {
    std::string what = e.what();
    EXPECT_NE(what.find("step 1"), std::string::npos) << what;
    EXPECT_NE(what.find("non-finite"), std::string::npos) << what;
  }
  EXPECT_EQ(LatestCheckpoint(dir / "run"), "");
}

TEST(Checkpoint, RoundTripAndRefusals) {
  TempDir dir("ckpt");
  TrainState s = ToyState(ConditioningMode::kGazev);
  TrainingData data = ToyData(s.net);
  Batch b = SampleBatch(data, s.speakers, s.net, 2, &s.rng);
  TrainStep(&s, b, LossWeights());
  std::string path = dir / "a.ckpt";
  SaveCheckpoint(s, path);
  TrainState t = LoadCheckpoint(path);
  EXPECT_TRUE(StatesEqual(s, t));
  EXPECT_EQ(t.step, 1);
  EXPECT_EQ(t.speakers, s.speakers);

  ConditioningMode baseline = ConditioningMode::kStarGanBaseline;
  try {
    LoadCheckpoint(path, &baseline);
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("mode"), std::string::npos);
  }

  std::string bytes = ReadFileBytes(path);
  std::string corrupt = bytes;
  corrupt[corrupt.size() / 2] ^= 0x10;
  WriteFileAtomic(dir / "corrupt.ckpt", corrupt);
  try {
    LoadCheckpoint(dir / "corrupt.ckpt");
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
  }

  std::string old = bytes;
  std::uint32_t v = kCheckpointVersion + 1;
  std::memcpy(old.data() + 8, &v, 4);
  WriteFileAtomic(dir / "old.ckpt", old);
  try {
    LoadCheckpoint(dir / "old.ckpt");
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  WriteFileAtomic(dir / "junk.ckpt", "hello");
  EXPECT_THROW(LoadCheckpoint(dir / "junk.ckpt"), GazevError);
}

std::vector<std::string> ReadLines(const std::string &path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

TEST(Train, CheckpointsMetricsAndBitIdenticalResume) {
  TempDir dir("train");
  const ConditioningMode mode = ConditioningMode::kGazev;
  TrainingData data = ToyData(ToyNet(mode));

  TrainState full = ToyState(mode);
  TrainResult r = Train(ToyTrainConfig(dir / "full", 10), data, &full, "{}");
  EXPECT_TRUE(fs::exists(CheckpointPath(dir / "full", 5)));
  EXPECT_TRUE(fs::exists(CheckpointPath(dir / "full", 10)));
  EXPECT_EQ(r.final_checkpoint, CheckpointPath(dir / "full", 10));
  EXPECT_EQ(LatestCheckpoint(dir / "full"), CheckpointPath(dir / "full", 10));
  EXPECT_TRUE(fs::exists(dir.path() / "full" / "run_manifest.json"));
  auto lines = ReadLines(r.metrics_path);
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0], MetricsHeader());

  // Interrupted run: stop at 7, resume from the step-5 checkpoint.
  TrainState part = ToyState(mode);
  Train(ToyTrainConfig(dir / "part", 7), data, &part);
  TrainState resumed = LoadCheckpoint(CheckpointPath(dir / "part", 5));
  EXPECT_EQ(resumed.step, 5);
  TrainResult rr = Train(ToyTrainConfig(dir / "part", 10), data, &resumed);
  EXPECT_TRUE(StatesEqual(full, resumed));
  EXPECT_EQ(ReadFileBytes(CheckpointPath(dir / "full", 10)),
            ReadFileBytes(CheckpointPath(dir / "part", 10)));
  EXPECT_EQ(ReadLines(rr.metrics_path), lines);
}

TEST(Train, FinalStepAlwaysCheckpointed) {
  TempDir dir("final");
  TrainingData data = ToyData(ToyNet(ConditioningMode::kStarGanBaseline));
  TrainState s = ToyState(ConditioningMode::kStarGanBaseline);
  TrainResult r = Train(ToyTrainConfig(dir / "run", 3), data, &s);
  EXPECT_EQ(r.final_checkpoint, CheckpointPath(dir / "run", 3));
  EXPECT_TRUE(fs::exists(r.final_checkpoint));
}

TEST(Metrics, Truncate) {
  TempDir dir("metrics");
  std::string path = dir / "m.csv";
  std::ofstream(path) << MetricsHeader() << "\n" << MetricsRow(1, LossBundle()) << "\n"
                      << MetricsRow(2, LossBundle()) << "\n" << MetricsRow(3, LossBundle())
                      << "\n";
  TruncateMetrics(path, 2);
  auto lines = ReadLines(path);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2], MetricsRow(2, LossBundle()));
}

TEST(Manifest, VctkConfigEchoesHyperparameters) {
  Workspace ws;
  ws.config = Config::Defaults();
  ws.config.ReadFile(GAZEV_SOURCE_DIR "/configs/vctk.conf");
  nlohmann::json j = nlohmann::json::parse(RunManifest(ws));
  EXPECT_EQ(j["train"]["batch_size"], 32);
  EXPECT_NEAR(j["train"]["learning_rate"].get<double>(), 1e-4, 1e-15);
  EXPECT_EQ(j["train"]["total_steps"], 1000000);
  EXPECT_EQ(j["config"]["net.gen_channels"], "64");
}

TEST(SpeakerTable, ClassOf) {
  SpeakerTable t = ToyTable();
  EXPECT_EQ(t.ClassOf("b"), 1);
  EXPECT_EQ(t.ClassOf("zz"), -1);
}

}  // namespace
}  // namespace gazev
