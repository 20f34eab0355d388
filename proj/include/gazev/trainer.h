// gazev/trainer.h

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

#ifndef GAZEV_TRAINER_H_
#define GAZEV_TRAINER_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gazev/config.h"
#include "gazev/corpus.h"
#include "gazev/features.h"
#include "gazev/losses.h"
#include "gazev/nets.h"
#include "gazev/optim.h"

namespace gazev {

struct TrainConfig {
  int batch_size = 32;
  AdamOptions adam;
  std::int64_t total_steps = 2000;
  std::int64_t checkpoint_every = 500;
  std::int64_t log_every = 1;
  std::int64_t audit_every = 0;
  std::uint64_t seed = 7;
  LossWeights weights;
  std::string out_dir = "work/train";

  static TrainConfig FromConfig(const Config &config);
  void Check() const;
};

/// Network geometry from the net.* and features.* keys. num_speakers is the
/// number of training speakers (the baseline's one-hot width).
NetConfig NetConfigFromConfig(const Config &config, int num_speakers);

/// Training speakers in class order. The position of a speaker here is its
/// label for the n-way baseline classifier and its one-hot slot.
struct SpeakerTable {
  std::vector<std::string> ids;
  std::vector<Gender> genders;

  int size() const { return static_cast<int>(ids.size()); }
  /// -1 if absent.
  int ClassOf(const std::string &speaker_id) const;
  static SpeakerTable FromPlan(const CorpusIndex &index, const SplitPlan &plan);
  bool operator==(const SpeakerTable &other) const = default;
};

/// Standardised training segments of the training speakers, flattened.
struct TrainingData {
  int mcc_dim = 0, frames = 0;
  std::vector<BaseFloat> values;  // segment-major, mcc_dim x frames each
  std::vector<int> speaker_class;  // SpeakerTable position
  std::vector<Gender> gender;

  int size() const { return static_cast<int>(speaker_class.size()); }
  const BaseFloat *Segment(int i) const {
    return values.data() + static_cast<std::size_t>(i) * mcc_dim * frames;
  }
  void Add(const MccSegment &segment, int speaker_class, Gender gender);
};

TrainingData BuildTrainingData(const CorpusIndex &index, const SplitPlan &plan,
                               const SpeakerTable &table, FeatureCache *cache,
                               const SpeakerStats &normalizer);

struct Batch {
  Tensor x;                        // N x 1 x mcc_dim x frames
  std::vector<int> src_gender, src_class;
  std::vector<int> tgt_gender, tgt_class;
  Tensor z1, z2;                   // N x prior_dim x 1 x 1
  int size() const { return x.n(); }
};

/// Segments uniform over the training set; gazev targets are uniform over
/// the two genders, baseline targets uniform over training speakers.
Batch SampleBatch(const TrainingData &data, const SpeakerTable &table,
                  const NetConfig &net, int batch_size, std::mt19937_64 *rng);

/// Everything needed to continue training or to convert.
struct TrainState {
  NetConfig net;
  AdamOptions adam;
  std::unique_ptr<VcModel> model;
  std::unique_ptr<Adam> gen_opt, critic_opt;
  std::mt19937_64 rng;
  std::int64_t step = 0;
  CorpusStats stats;
  SpeakerTable speakers;

  static TrainState Fresh(const NetConfig &net, const AdamOptions &adam,
                          std::uint64_t seed);
};

/// Hashes of each side's parameters around the two update phases.
struct PartitionAudit {
  std::uint64_t gen_before = 0, gen_after_critic_phase = 0;
  std::uint64_t critic_before_gen_phase = 0, critic_after = 0;
  bool Ok() const {
    return gen_before == gen_after_critic_phase &&
           critic_before_gen_phase == critic_after;
  }
};

std::uint64_t HashParams(const std::vector<NamedParam> &params);

/// One D/C update then one G/F/E update on the same batch; advances
/// state->step.
LossBundle TrainStep(TrainState *state, const Batch &batch,
                     const LossWeights &weights,
                     PartitionAudit *audit = nullptr);

constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const TrainState &state, const std::string &path);
/// Throws on a version or checksum mismatch. With expected_mode set, a
/// checkpoint of the other conditioning mode is refused too.
TrainState LoadCheckpoint(const std::string &path,
                          const ConditioningMode *expected_mode = nullptr);
/// Bitwise equality of all state, for tests.
bool StatesEqual(const TrainState &a, const TrainState &b);

std::string CheckpointPath(const std::string &out_dir, std::int64_t step);
/// Highest-step checkpoint in out_dir, or empty.
std::string LatestCheckpoint(const std::string &out_dir);

/// Header plus one row per logged step.
std::string MetricsHeader();
std::string MetricsRow(std::int64_t step, const LossBundle &bundle);
/// Drops rows beyond step (used on resume).
void TruncateMetrics(const std::string &path, std::int64_t step);

struct TrainResult {
  std::string final_checkpoint;
  std::string metrics_path;
};

/// Trains from state->step up to config.total_steps. A resumed state (step
/// > 0) first drops metrics rows past its step. The state must already
/// carry stats and speakers.
TrainResult Train(const TrainConfig &config, const TrainingData &data,
                  TrainState *state, const std::string &manifest_json = "");

}  // namespace gazev

#endif  // GAZEV_TRAINER_H_
