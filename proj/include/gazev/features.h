// gazev/features.h

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

#ifndef GAZEV_FEATURES_H_
#define GAZEV_FEATURES_H_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gazev/config.h"
#include "gazev/corpus.h"
#include "gazev/wav.h"

namespace gazev {

using FrameMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AnalysisParams {
  int sample_rate = 22050;
  double frame_period_ms = 5;
  int mcc_dim = 36;
  int segment_frames = 256;

  static AnalysisParams FromConfig(const Config &config);
  /// Stable text form, part of the feature-cache key.
  std::string Fingerprint() const;
};

/// WORLD decomposition of one utterance.  The spectral envelope is coded to
/// mcc_dim + 1 mel-cepstral coefficients; coefficient 0 is kept apart as
/// energy and copied from the source at conversion time.
struct VocoderFeatures {
  int sample_rate = 0;
  double frame_period_ms = 0;
  int fft_size = 0;
  std::vector<double> f0;      // Hz, 0 = unvoiced
  std::vector<double> energy;  // coded coefficient 0
  FrameMatrix mcc;             // frames x mcc_dim
  FrameMatrix ap;              // frames x coded aperiodicity bands

  int NumFrames() const { return static_cast<int>(f0.size()); }
  /// Frame counts agree, f0 >= 0, everything finite.
  void Check() const;
};

/// Resamples to params.sample_rate first if needed.
VocoderFeatures Analyze(const Waveform &wave, const AnalysisParams &params);
/// Output length is NumFrames() * frame_period.
Waveform Synthesize(const VocoderFeatures &features);

enum class SegmentMode { kTraining, kInference };

struct MccSegment {
  FrameMatrix values;  // mcc_dim x length (coefficient x frame)
  int source_speaker = 0;
  int valid_frames = 0;  // < length only for a padded inference tail
};

/// mcc is frames x dim. Training mode drops a tail shorter than length;
/// inference mode zero-pads it (and always yields at least one segment).
std::vector<MccSegment> Segment(const FrameMatrix &mcc, int length, int hop,
                                SegmentMode mode, int source_speaker = 0);
/// Inverse of inference-mode segmentation with hop == length; crops to
/// num_frames.
FrameMatrix Unsegment(const std::vector<MccSegment> &segments, int num_frames);

constexpr double kStatsStdFloor = 1e-6;

struct SpeakerStats {
  double logf0_mean = 0, logf0_std = 1;
  std::vector<double> mcc_mean, mcc_std;
  bool operator==(const SpeakerStats &other) const = default;
};

/// Pools the frames of all utterances. logf0 uses voiced frames only; stds
/// are floored at kStatsStdFloor.
SpeakerStats ComputeStats(const std::vector<const VocoderFeatures *> &utts);

/// Log-Gaussian mapping of voiced frames; unvoiced frames stay 0.
std::vector<double> TransformF0(const std::vector<double> &f0,
                                const SpeakerStats &src,
                                const SpeakerStats &tgt);

void SaveFeatures(const std::string &path, const VocoderFeatures &features);
VocoderFeatures LoadFeatures(const std::string &path);

/// One file per utterance under dir, keyed by a hash of the utterance path
/// and the analysis parameters.
class FeatureCache {
 public:
  FeatureCache(std::string dir, AnalysisParams params);

  std::string PathFor(const std::string &utterance) const;
  bool Contains(const std::string &utterance) const;
  /// Analyses and stores on a miss.
  VocoderFeatures Get(const std::string &utterance);
  const AnalysisParams &params() const { return params_; }
  const std::string &dir() const { return dir_; }

 private:
  std::string dir_;
  AnalysisParams params_;
};

enum class StatsGroup { kPerSpeaker, kPerGender };

/// Statistics over training utterances of training speakers, keyed by
/// speaker_id (per-speaker) or "male"/"female" (per-gender).
std::map<std::string, SpeakerStats> ComputeGroupStats(
    const CorpusIndex &index, const SplitPlan &plan, FeatureCache *cache,
    StatsGroup group);

/// Everything conversion needs besides the networks.
struct CorpusStats {
  SpeakerStats global;  // MCC normalizer (all training frames)
  std::map<std::string, SpeakerStats> per_speaker;
  std::map<std::string, SpeakerStats> per_gender;

  /// Per-speaker stats if known, otherwise the gender pool.
  const SpeakerStats &ForSpeaker(const std::string &speaker_id,
                                 Gender gender) const;
  const SpeakerStats &ForGender(Gender gender) const;

  std::string ToJson() const;
  static CorpusStats FromJson(const std::string &json);
  bool operator==(const CorpusStats &other) const = default;
};

CorpusStats ComputeCorpusStats(const CorpusIndex &index, const SplitPlan &plan,
                               FeatureCache *cache);

/// (mcc - mean) / std per dimension, and its inverse.
FrameMatrix Standardize(const FrameMatrix &mcc, const SpeakerStats &stats);
FrameMatrix Destandardize(const FrameMatrix &mcc, const SpeakerStats &stats);

}  // namespace gazev

#endif  // GAZEV_FEATURES_H_
