// gazev/pipeline.h

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

#ifndef GAZEV_PIPELINE_H_
#define GAZEV_PIPELINE_H_

#include <memory>
#include <string>

#include "gazev/config.h"
#include "gazev/corpus.h"
#include "gazev/features.h"
#include "gazev/trainer.h"

namespace gazev {

/// Corpus, split, feature cache and statistics for one configuration.
struct Workspace {
  Config config;
  CorpusIndex index;
  SplitPlan plan;
  std::unique_ptr<FeatureCache> cache;
  CorpusStats stats;
  SpeakerTable speakers;
};

/// Synthesizes the corpus described by the synth.* keys into corpus.root.
CorpusIndex MakeCorpus(const Config &config);

/// Loads (or, for a synthetic source that does not exist yet, generates) the
/// corpus, splits it, fills the feature cache for every train and test
/// utterance, and writes split.json and stats.json next to the cache.
Workspace Prepare(const Config &config);

/// A fresh training state carrying the workspace statistics and speaker
/// table.
TrainState NewTrainState(const Workspace &ws);

/// Resolved configuration, corpus summary and split as JSON.
std::string RunManifest(const Workspace &ws);

/// Trains from scratch or resumes from resume_from (empty = fresh).
TrainResult RunTraining(const Workspace &ws, const std::string &resume_from);

}  // namespace gazev

#endif  // GAZEV_PIPELINE_H_
