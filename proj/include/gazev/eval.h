// gazev/eval.h

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

#ifndef GAZEV_EVAL_H_
#define GAZEV_EVAL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gazev/corpus.h"
#include "gazev/features.h"
#include "gazev/trainer.h"

namespace gazev {

/// Mel-cepstral distortion in dB between equal-length MCC sequences
/// (frames x dims): (10 / ln 10) * sqrt(2) * mean_t ||a_t - b_t||.
double Mcd(const FrameMatrix &a, const FrameMatrix &b);

double CosineSimilarity(const std::vector<double> &a,
                        const std::vector<double> &b);

/// Conversion with a trained model. Holds no mutable state; all calls are
/// deterministic.
class Converter {
 public:
  explicit Converter(const TrainState &state);

  /// Mean of E over the inference segments of all references (gazev only).
  std::vector<double> EncodeReferences(
      const std::vector<VocoderFeatures> &refs, Gender gender) const;
  /// F(z, u) with z drawn from a seeded standard normal (gazev only).
  std::vector<double> PriorEmbedding(std::uint64_t seed, Gender gender) const;
  /// One-hot code of a training speaker (baseline only).
  std::vector<double> SpeakerCode(const std::string &speaker_id) const;

  /// MCC path only: standardise, segment, G, de-standardise, reassemble.
  FrameMatrix ConvertMcc(const FrameMatrix &mcc,
                         const std::vector<double> &cond) const;
  /// Full feature conversion: MCC through G, F0 by the log-Gaussian map,
  /// energy and aperiodicity copied from the source.
  VocoderFeatures ConvertFeatures(const VocoderFeatures &source,
                                  const std::vector<double> &cond,
                                  const SpeakerStats &source_f0,
                                  const SpeakerStats &target_f0) const;

  /// Mean classifier logits over the inference segments.
  std::vector<double> ClassLogits(const VocoderFeatures &features) const;
  /// Predicted gender (baseline: gender of the predicted speaker).
  Gender PredictGender(const VocoderFeatures &features) const;

  /// Generator output for one standardised segment (1 x 1 x D x T).
  Tensor GenerateSegment(const Tensor &segment,
                         const std::vector<double> &cond) const;

  const TrainState &state() const { return state_; }

 private:
  Tensor SegmentBatch(const FrameMatrix &standardized) const;

  const TrainState &state_;
};

struct ConversionRequest {
  std::string source_path;
  std::vector<std::string> target_refs;
  std::optional<std::uint64_t> target_prior_seed;
  Gender target_gender = Gender::kMale;
  /// Optional: a training speaker id selects per-speaker F0 statistics
  /// (and is required in baseline mode).
  std::string target_speaker;

  /// Exactly one target form must be present.
  void Check() const;
};

/// Source F0 statistics come from the source utterance itself.
Waveform Convert(const TrainState &state, const ConversionRequest &request,
                 const AnalysisParams &params);

enum class GenderCategory { kF2F, kF2M, kM2F, kM2M };
enum class SeenCategory { kS2S, kS2U, kU2S, kU2U };
std::string CategoryName(GenderCategory c);
std::string CategoryName(SeenCategory c);
GenderCategory GenderCategoryOf(Gender source, Gender target);
SeenCategory SeenCategoryOf(const SplitPlan &plan, int source, int target);

struct EvalPair {
  int source = 0, target = 0;  // numeric ids
  GenderCategory gender_category;
  SeenCategory seen_category;
};

/// All ordered pairs of test speakers, self-pairs included, seen speakers
/// first, in ascending id order.
std::vector<EvalPair> PlanEvalPairs(const CorpusIndex &index,
                                    const SplitPlan &plan);

struct EvalRow {
  std::string source, target, source_utterance;
  std::string gender_category, seen_category;
  double mcd_identity = 0, mcd_cycle = 0;
  double emb_sim_target = 0, emb_sim_source = 0;
  int gender_correct = 0;
  bool operator==(const EvalRow &other) const = default;
};

struct CategorySummary {
  std::string grouping, category;
  int count = 0;
  double mcd_identity = 0, mcd_cycle = 0;
  double emb_sim_target = 0, emb_sim_source = 0;
  double gender_accuracy = 0;
  double target_wins = 0;  // fraction of non-self rows with target > source
  int contested = 0;       // non-self rows
};

struct EvalReport {
  std::vector<EvalRow> rows;
  /// Gender accuracy of the classifier on genuine held-out utterances of
  /// the test speakers.
  double heldout_gender_accuracy = 0;
  int heldout_utterances = 0;
  /// Mean L1 distance between G outputs for independent prior pairs.
  double diversity = 0;

  std::vector<CategorySummary> Summaries() const;
};

struct EvalConfig {
  int ref_utterances = 4;
  int sources_per_pair = 1;
  int diversity_pairs = 10;
  std::string out_dir = "work/eval";
  bool write_audio = false;
  static EvalConfig FromConfig(const Config &config);
};

EvalReport RunEval(const TrainState &state, const CorpusIndex &index,
                   const SplitPlan &plan, FeatureCache *cache,
                   const EvalConfig &config);

/// Mean L1 distance between G(x, F(z1,u)) and G(x, F(z2,u)) over pairs.
double DiversityProbe(const Converter &converter, const FrameMatrix &source_mcc,
                      Gender gender, int pairs, std::uint64_t seed);

std::string RowsToCsv(const std::vector<EvalRow> &rows);
std::vector<EvalRow> RowsFromCsv(const std::string &csv);
std::string SummaryToCsv(const EvalReport &report);
/// Bar chart of one metric over the four categories of a grouping.
std::string BarChartSvg(const std::vector<CategorySummary> &summaries,
                        const std::string &grouping, const std::string &metric);

/// format: "csv", "svg" or "all". Writes eval_rows.csv, eval_summary.csv
/// and chart_<grouping>_<metric>.svg into out_dir; returns the paths.
std::vector<std::string> EmitReport(const EvalReport &report,
                                    const std::string &out_dir,
                                    const std::string &format);

}  // namespace gazev

#endif  // GAZEV_EVAL_H_
