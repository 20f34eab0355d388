// pipeline.cc

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

#include "gazev/pipeline.h"

#include <filesystem>

#include "gazev/binary-io.h"
#include "json.hpp"

namespace gazev {

namespace fs = std::filesystem;

CorpusIndex MakeCorpus(const Config &config) {
  if (config.GetString("corpus.source") != "synthetic")
    GAZEV_ERR << "make-corpus needs corpus.source = synthetic";
  return SynthCorpus(SynthConfig::FromConfig(config),
                     config.GetString("corpus.root"));
}

Workspace Prepare(const Config &config) {
  Workspace ws;
  ws.config = config;
  const std::string root = config.GetString("corpus.root");
  const std::string source = config.GetString("corpus.source");
  if (source == "synthetic") {
    if (!fs::exists(fs::path(root) / "speaker-info.txt")) {
      GAZEV_LOG << "Generating synthetic corpus in " << root;
      MakeCorpus(config);
    }
  } else if (source != "real") {
    GAZEV_ERR << "corpus.source must be synthetic or real, got '" << source << "'";
  }
  ws.index = LoadCorpus(root, config.GetString("corpus.metadata"));
  ws.plan = SplitSpeakers(ws.index, SplitConfig::FromConfig(config));
  ws.cache = std::make_unique<FeatureCache>(config.GetString("features.cache_dir"),
                                            AnalysisParams::FromConfig(config));
  int analysed = 0;
  for (const SpeakerRecord &spk : ws.index.speakers) {
    if (!ws.plan.IsTrain(spk.numeric_id) && !ws.plan.IsSeen(spk.numeric_id) &&
        !ws.plan.IsUnseen(spk.numeric_id))
      continue;
    for (const std::string &utt : spk.utterance_paths) {
      if (!ws.cache->Contains(utt)) ++analysed;
      ws.cache->Get(utt);
    }
  }
  GAZEV_LOG << "Feature cache ready (" << analysed << " utterances analysed)";
  ws.stats = ComputeCorpusStats(ws.index, ws.plan, ws.cache.get());
  ws.speakers = SpeakerTable::FromPlan(ws.index, ws.plan);
  fs::path dir = ws.cache->dir();
  WriteFileAtomic((dir / "split.json").string(), ws.plan.ToJson());
  WriteFileAtomic((dir / "stats.json").string(), ws.stats.ToJson());
  return ws;
}

TrainState NewTrainState(const Workspace &ws) {
  TrainConfig tc = TrainConfig::FromConfig(ws.config);
  TrainState state = TrainState::Fresh(
      NetConfigFromConfig(ws.config, ws.speakers.size()), tc.adam, tc.seed);
  state.stats = ws.stats;
  state.speakers = ws.speakers;
  return state;
}

std::string RunManifest(const Workspace &ws) {
  nlohmann::json j;
  for (const auto &[k, v] : ws.config.values()) j["config"][k] = v;
  TrainConfig tc = TrainConfig::FromConfig(ws.config);
  j["train"] = {{"batch_size", tc.batch_size},
                {"learning_rate", tc.adam.learning_rate},
                {"total_steps", tc.total_steps},
                {"beta1", tc.adam.beta1},
                {"beta2", tc.adam.beta2}};
  j["corpus"] = {{"speakers", ws.index.n()},
                 {"sample_rate", ws.index.sample_rate},
                 {"synthetic", ws.index.source == CorpusSource::kSynthetic}};
  j["split"] = nlohmann::json::parse(ws.plan.ToJson());
  return j.dump(1) + "\n";
}

TrainResult RunTraining(const Workspace &ws, const std::string &resume_from) {
  TrainConfig tc = TrainConfig::FromConfig(ws.config);
  NetConfig net = NetConfigFromConfig(ws.config, ws.speakers.size());
  TrainState state;
  if (resume_from.empty()) {
    state = NewTrainState(ws);
  } else {
    state = LoadCheckpoint(resume_from, &net.mode);
    if (!(state.net == net))
      GAZEV_ERR << "Checkpoint " << resume_from
                << " was trained with a different network configuration";
    if (!(state.speakers == ws.speakers))
      GAZEV_ERR << "Checkpoint " << resume_from << " has a different speaker table";
    GAZEV_LOG << "Resuming from step " << state.step;
  }
  TrainingData data = BuildTrainingData(ws.index, ws.plan, ws.speakers,
                                        ws.cache.get(), ws.stats.global);
  return Train(tc, data, &state, RunManifest(ws));
}

}  // namespace gazev
