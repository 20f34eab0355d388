// gazev/corpus.h

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

#ifndef GAZEV_CORPUS_H_
#define GAZEV_CORPUS_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gazev/config.h"
#include "gazev/nets.h"

namespace gazev {

std::string GenderName(Gender g);  // "male" / "female"
Gender ParseGender(const std::string &s);  // m, f, male, female (any case)

enum class CorpusSource { kReal, kSynthetic };

struct SpeakerRecord {
  std::string speaker_id;
  int numeric_id = 0;  // 1..n
  Gender gender = Gender::kMale;
  std::vector<std::string> utterance_paths;  // sorted
};

struct CorpusIndex {
  std::vector<SpeakerRecord> speakers;  // ordered by numeric_id
  int sample_rate = 0;
  CorpusSource source = CorpusSource::kReal;

  int n() const { return static_cast<int>(speakers.size()); }
  const SpeakerRecord &Speaker(int numeric_id) const;
  /// nullptr if absent.
  const SpeakerRecord *Find(const std::string &speaker_id) const;
  bool operator==(const CorpusIndex &other) const;
};

/// Scans root/<speaker_id>/*.wav. metadata is a table of
/// "<speaker_id> <gender>" rows (VCTK speaker-info.txt also parses); an
/// empty path means root/speaker-info.txt. A "# source: synthetic" line
/// marks a generated corpus.
CorpusIndex LoadCorpus(const std::string &root, const std::string &metadata);

struct SplitConfig {
  int train = 6, seen = 2, unseen = 2;
  int test_utterances = 4;
  std::uint64_t seed = 7;

  static SplitConfig FromConfig(const Config &config);
};

struct SplitPlan {
  std::set<int> train_speakers, seen_test, unseen_test;
  int test_utterances = 0;

  bool IsTrain(int id) const { return train_speakers.count(id) != 0; }
  bool IsSeen(int id) const { return seen_test.count(id) != 0; }
  bool IsUnseen(int id) const { return unseen_test.count(id) != 0; }
  /// Seen then unseen, each ascending.
  std::vector<int> TestSpeakers() const;
  /// Throws if any invariant is violated for this corpus.
  void Check(const CorpusIndex &index) const;

  std::string ToJson() const;
  static SplitPlan FromJson(const std::string &json);
  bool operator==(const SplitPlan &other) const = default;
};

SplitPlan SplitSpeakers(const CorpusIndex &index, const SplitConfig &config);

/// The last test_utterances files of a speaker are held out for evaluation;
/// training segments come from the rest.
std::vector<std::string> TrainUtterances(const SpeakerRecord &speaker,
                                         const SplitPlan &plan);
std::vector<std::string> TestUtterances(const SpeakerRecord &speaker,
                                        const SplitPlan &plan);

struct SynthConfig {
  int speakers = 8;
  int utterances = 50;
  double min_seconds = 1.0, max_seconds = 2.0;
  std::uint64_t seed = 7;
  int sample_rate = 22050;

  static SynthConfig FromConfig(const Config &config);
};

/// Per-speaker generator parameters, exposed for oracle checks.
struct SynthVoice {
  int index = 0;
  Gender gender = Gender::kMale;
  double f0_mean = 0;        // Hz
  double formant_scale = 1;  // vocal-tract length factor
  double bandwidth_scale = 1;
  double tilt = 0;           // one-pole lowpass coefficient
  double extra_resonance = 0, extra_gain = 0;
};

/// Speaker k (0-based) of a synthetic corpus; genders alternate, male first.
SynthVoice MakeSynthVoice(const SynthConfig &config, int speaker);
/// Waveform plus the generator's own F0 track (one value per 5 ms frame,
/// 0 where unvoiced).
struct SynthUtterance {
  std::vector<double> samples;
  std::vector<double> f0_track;
};
SynthUtterance RenderSynthUtterance(const SynthConfig &config,
                                    const SynthVoice &voice, int utterance);

/// Writes root/spkNN/uttNNN.wav plus root/speaker-info.txt and returns the
/// index. Fully determined by config.
CorpusIndex SynthCorpus(const SynthConfig &config, const std::string &root);

}  // namespace gazev

#endif  // GAZEV_CORPUS_H_
