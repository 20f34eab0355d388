// eval.cc

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

#include "gazev/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "gazev/binary-io.h"
#include "json.hpp"

namespace gazev {

namespace fs = std::filesystem;

double Mcd(const FrameMatrix &a, const FrameMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    GAZEV_ERR << "MCD needs equal shapes, got " << a.rows() << "x" << a.cols()
              << " and " << b.rows() << "x" << b.cols();
  if (a.rows() == 0) GAZEV_ERR << "MCD of empty sequences";
  double sum = 0;
  for (Eigen::Index t = 0; t < a.rows(); ++t) sum += (a.row(t) - b.row(t)).norm();
  return 10.0 / std::numbers::ln10 * std::sqrt(2.0) * sum / a.rows();
}

double CosineSimilarity(const std::vector<double> &a,
                        const std::vector<double> &b) {
  if (a.size() != b.size() || a.empty())
    GAZEV_ERR << "Cosine similarity of vectors sized " << a.size() << " and " << b.size();
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) GAZEV_ERR << "Degenerate zero embedding";
  return ab / std::sqrt(aa * bb);
}

// ---------------------------------------------------------------------------

Converter::Converter(const TrainState &state) : state_(state) {}

Tensor Converter::SegmentBatch(const FrameMatrix &standardized) const {
  const NetConfig &net = state_.net;
  auto segs = Segment(standardized, net.num_frames, net.num_frames,
                      SegmentMode::kInference);
  Tensor x(static_cast<int>(segs.size()), 1, net.mcc_dim, net.num_frames);
  for (std::size_t n = 0; n < segs.size(); ++n) {
    BaseFloat *dst = x.Sample(static_cast<int>(n));
    for (int d = 0; d < net.mcc_dim; ++d)
      for (int t = 0; t < net.num_frames; ++t)
        *dst++ = static_cast<BaseFloat>(segs[n].values(d, t));
  }
  return x;
}

namespace {

Tensor Repeat(const std::vector<double> &v, int n) {
  Tensor t(n, static_cast<int>(v.size()), 1, 1);
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < v.size(); ++k)
      t[i * v.size() + k] = static_cast<BaseFloat>(v[k]);
  return t;
}

Tensor GenderCode(Gender g, int n) {
  return OneHot(std::vector<int>(n, static_cast<int>(g)), 2);
}

// Inference never needs a graph.
struct NoGrad {
  std::vector<NamedParam> params;
  explicit NoGrad(const VcModel &m) : params(m.AllParams()) {
    for (auto &p : params) p.var->requires_grad = false;
  }
  ~NoGrad() {
    for (auto &p : params) p.var->requires_grad = true;
  }
};

}  // namespace

std::vector<double> Converter::EncodeReferences(
    const std::vector<VocoderFeatures> &refs, Gender gender) const {
  if (!state_.model->has_embedders())
    GAZEV_ERR << "Reference encoding needs a gazev-mode model";
  if (refs.empty()) GAZEV_ERR << "No reference utterances";
  NoGrad guard(*state_.model);
  std::vector<double> sum(state_.net.embed_dim, 0.0);
  int count = 0;
  for (const VocoderFeatures &f : refs) {
    Tensor x = SegmentBatch(Standardize(f.mcc, state_.stats.global));
    Var e = state_.model->encoder().Forward(MakeInput(x),
                                            MakeConstant(GenderCode(gender, x.n())));
    for (int n = 0; n < x.n(); ++n)
      for (int k = 0; k < state_.net.embed_dim; ++k)
        sum[k] += e->value[n * state_.net.embed_dim + k];
    count += x.n();
  }
  for (double &v : sum) v /= count;
  return sum;
}

std::vector<double> Converter::PriorEmbedding(std::uint64_t seed,
                                              Gender gender) const {
  if (!state_.model->has_embedders())
    GAZEV_ERR << "Prior sampling needs a gazev-mode model";
  NoGrad guard(*state_.model);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor z(1, state_.net.prior_dim, 1, 1);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = static_cast<BaseFloat>(normal(rng));
  Var s = state_.model->prior().Forward(MakeConstant(z),
                                        MakeConstant(GenderCode(gender, 1)));
  return std::vector<double>(s->value.data(), s->value.data() + s->value.size());
}

std::vector<double> Converter::SpeakerCode(const std::string &speaker_id) const {
  int cls = state_.speakers.ClassOf(speaker_id);
  if (cls < 0)
    GAZEV_ERR << "Speaker '" << speaker_id
              << "' was not a training speaker; the baseline cannot target it";
  std::vector<double> code(state_.speakers.size(), 0.0);
  code[cls] = 1.0;
  return code;
}

Tensor Converter::GenerateSegment(const Tensor &segment,
                                  const std::vector<double> &cond) const {
  NoGrad guard(*state_.model);
  Var y = state_.model->generator().Forward(
      MakeInput(segment), MakeConstant(Repeat(cond, segment.n())));
  return y->value;
}

FrameMatrix Converter::ConvertMcc(const FrameMatrix &mcc,
                                  const std::vector<double> &cond) const {
  const NetConfig &net = state_.net;
  Tensor x = SegmentBatch(Standardize(mcc, state_.stats.global));
  Tensor y = GenerateSegment(x, cond);
  std::vector<MccSegment> segs(y.n());
  for (int n = 0; n < y.n(); ++n) {
    segs[n].values.resize(net.mcc_dim, net.num_frames);
    const BaseFloat *src = y.Sample(n);
    for (int d = 0; d < net.mcc_dim; ++d)
      for (int t = 0; t < net.num_frames; ++t) segs[n].values(d, t) = *src++;
  }
  return Destandardize(Unsegment(segs, static_cast<int>(mcc.rows())),
                       state_.stats.global);
}

VocoderFeatures Converter::ConvertFeatures(const VocoderFeatures &source,
                                           const std::vector<double> &cond,
                                           const SpeakerStats &source_f0,
                                           const SpeakerStats &target_f0) const {
  VocoderFeatures out = source;
  out.mcc = ConvertMcc(source.mcc, cond);
  out.f0 = TransformF0(source.f0, source_f0, target_f0);
  return out;
}

std::vector<double> Converter::ClassLogits(const VocoderFeatures &features) const {
  NoGrad guard(*state_.model);
  Tensor x = SegmentBatch(Standardize(features.mcc, state_.stats.global));
  Var logits = state_.model->discriminator().Classify(MakeInput(x));
  const int classes = state_.net.NumClasses();
  std::vector<double> mean(classes, 0.0);
  for (int n = 0; n < x.n(); ++n)
    for (int k = 0; k < classes; ++k) mean[k] += logits->value[n * classes + k] / x.n();
  return mean;
}

Gender Converter::PredictGender(const VocoderFeatures &features) const {
  auto logits = ClassLogits(features);
  int best = static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                              logits.begin());
  if (state_.net.mode == ConditioningMode::kGazev) return static_cast<Gender>(best);
  return state_.speakers.genders.at(best);
}

void ConversionRequest::Check() const {
  bool refs = !target_refs.empty();
  if (refs == target_prior_seed.has_value())
    GAZEV_ERR << "Give exactly one of target reference audio or a prior seed";
}

Waveform Convert(const TrainState &state, const ConversionRequest &request,
                 const AnalysisParams &params) {
  request.Check();
  Converter conv(state);
  Waveform source_wave = ReadWavAt(request.source_path, params.sample_rate);
  VocoderFeatures source = Analyze(source_wave, params);

  std::vector<double> cond;
  if (state.net.mode == ConditioningMode::kStarGanBaseline) {
    if (request.target_speaker.empty())
      GAZEV_ERR << "Baseline mode converts only to a named training speaker";
    cond = conv.SpeakerCode(request.target_speaker);
  } else if (request.target_prior_seed) {
    cond = conv.PriorEmbedding(*request.target_prior_seed, request.target_gender);
  } else {
    std::vector<VocoderFeatures> refs;
    const int min_frames = std::max(2, params.segment_frames / 4);
    for (const std::string &path : request.target_refs) {
      Waveform w = ReadWavAt(path, params.sample_rate);
      if (w.Seconds() * 1000.0 / params.frame_period_ms < min_frames)
        GAZEV_ERR << "Reference " << path << " is too short to yield a segment ("
                  << w.Seconds() << " s); use a prior seed instead";
      refs.push_back(Analyze(w, params));
    }
    cond = conv.EncodeReferences(refs, request.target_gender);
  }

  bool voiced = std::any_of(source.f0.begin(), source.f0.end(),
                            [](double v) { return v > 0; });
  SpeakerStats source_f0 = voiced ? ComputeStats({&source}) : SpeakerStats{};
  const SpeakerStats &target_f0 =
      state.stats.ForSpeaker(request.target_speaker, request.target_gender);
  VocoderFeatures out = voiced ? conv.ConvertFeatures(source, cond, source_f0, target_f0)
                               : source;
  if (!voiced) out.mcc = conv.ConvertMcc(source.mcc, cond);
  Waveform wave = Synthesize(out);
  wave.samples.resize(source_wave.samples.size(), 0.0);
  return wave;
}

// ---------------------------------------------------------------------------
// Evaluation protocol.

std::string CategoryName(GenderCategory c) {
  static const char *names[] = {"F2F", "F2M", "M2F", "M2M"};
  return names[static_cast<int>(c)];
}

std::string CategoryName(SeenCategory c) {
  static const char *names[] = {"S2S", "S2U", "U2S", "U2U"};
  return names[static_cast<int>(c)];
}

GenderCategory GenderCategoryOf(Gender source, Gender target) {
  bool sf = source == Gender::kFemale, tf = target == Gender::kFemale;
  if (sf) return tf ? GenderCategory::kF2F : GenderCategory::kF2M;
  return tf ? GenderCategory::kM2F : GenderCategory::kM2M;
}

SeenCategory SeenCategoryOf(const SplitPlan &plan, int source, int target) {
  bool ss = plan.IsTrain(source), ts = plan.IsTrain(target);
  if (ss) return ts ? SeenCategory::kS2S : SeenCategory::kS2U;
  return ts ? SeenCategory::kU2S : SeenCategory::kU2U;
}

std::vector<EvalPair> PlanEvalPairs(const CorpusIndex &index,
                                    const SplitPlan &plan) {
  std::vector<EvalPair> pairs;
  auto speakers = plan.TestSpeakers();
  for (int s : speakers)
    for (int t : speakers) {
      EvalPair p;
      p.source = s;
      p.target = t;
      p.gender_category =
          GenderCategoryOf(index.Speaker(s).gender, index.Speaker(t).gender);
      p.seen_category = SeenCategoryOf(plan, s, t);
      pairs.push_back(p);
    }
  return pairs;
}

EvalConfig EvalConfig::FromConfig(const Config &config) {
  EvalConfig c;
  c.ref_utterances = config.GetInt("eval.ref_utterances");
  c.sources_per_pair = config.GetInt("eval.sources_per_pair");
  c.diversity_pairs = config.GetInt("eval.diversity_pairs");
  c.out_dir = config.GetString("eval.out_dir");
  c.write_audio = config.GetBool("eval.write_audio");
  if (c.ref_utterances < 1 || c.sources_per_pair < 1 || c.diversity_pairs < 1)
    GAZEV_ERR << "eval.ref_utterances, eval.sources_per_pair and "
                 "eval.diversity_pairs must be >= 1";
  return c;
}

double DiversityProbe(const Converter &converter, const FrameMatrix &source_mcc,
                      Gender gender, int pairs, std::uint64_t seed) {
  const TrainState &s = converter.state();
  double total = 0;
  for (int p = 0; p < pairs; ++p) {
    auto e1 = converter.PriorEmbedding(seed + 2 * p, gender);
    auto e2 = converter.PriorEmbedding(seed + 2 * p + 1, gender);
    FrameMatrix std_mcc = Standardize(source_mcc, s.stats.global);
    Tensor x(1, 1, s.net.mcc_dim, s.net.num_frames);
    auto segs = Segment(std_mcc, s.net.num_frames, s.net.num_frames,
                        SegmentMode::kInference);
    for (int d = 0; d < s.net.mcc_dim; ++d)
      for (int t = 0; t < s.net.num_frames; ++t)
        x.at(0, 0, d, t) = static_cast<BaseFloat>(segs[0].values(d, t));
    Tensor y1 = converter.GenerateSegment(x, e1);
    Tensor y2 = converter.GenerateSegment(x, e2);
    double l1 = 0;
    for (std::size_t k = 0; k < y1.size(); ++k) l1 += std::abs(y1[k] - y2[k]);
    total += l1 / y1.size();
  }
  return total / pairs;
}

EvalReport RunEval(const TrainState &state, const CorpusIndex &index,
                   const SplitPlan &plan, FeatureCache *cache,
                   const EvalConfig &config) {
  if (state.net.mode != ConditioningMode::kGazev)
    GAZEV_ERR << "Evaluation uses the speaker encoder and needs a gazev-mode model";
  plan.Check(index);
  Converter conv(state);
  const AnalysisParams &params = cache->params();

  struct SpeakerData {
    std::vector<std::string> source_paths;
    std::vector<VocoderFeatures> sources;
    std::vector<double> embedding;
  };
  std::map<int, SpeakerData> data;
  EvalReport report;
  for (int id : plan.TestSpeakers()) {
    const SpeakerRecord &spk = index.Speaker(id);
    auto utts = TestUtterances(spk, plan);
    int n_src = std::min<int>(config.sources_per_pair, static_cast<int>(utts.size()));
    SpeakerData &d = data[id];
    d.source_paths.assign(utts.end() - n_src, utts.end());
    std::vector<std::string> ref_paths(utts.begin(), utts.end() - n_src);
    if (ref_paths.empty()) ref_paths = utts;
    if (static_cast<int>(ref_paths.size()) > config.ref_utterances)
      ref_paths.resize(config.ref_utterances);
    std::vector<VocoderFeatures> refs;
    for (const auto &p : ref_paths) refs.push_back(cache->Get(p));
    d.embedding = conv.EncodeReferences(refs, spk.gender);
    for (const auto &p : d.source_paths) d.sources.push_back(cache->Get(p));
    for (const auto &p : utts) {
      report.heldout_utterances++;
      report.heldout_gender_accuracy += conv.PredictGender(cache->Get(p)) == spk.gender;
    }
  }
  if (report.heldout_utterances > 0)
    report.heldout_gender_accuracy /= report.heldout_utterances;

  std::map<std::string, double> identity_cache;
  for (const EvalPair &pair : PlanEvalPairs(index, plan)) {
    const SpeakerRecord &src = index.Speaker(pair.source);
    const SpeakerRecord &tgt = index.Speaker(pair.target);
    const SpeakerData &sd = data.at(pair.source);
    const SpeakerData &td = data.at(pair.target);
    const SpeakerStats &src_f0 = state.stats.ForSpeaker(src.speaker_id, src.gender);
    const SpeakerStats &tgt_f0 = state.stats.ForSpeaker(tgt.speaker_id, tgt.gender);
    for (std::size_t u = 0; u < sd.sources.size(); ++u) {
      const VocoderFeatures &x = sd.sources[u];
      EvalRow row;
      row.source = src.speaker_id;
      row.target = tgt.speaker_id;
      row.source_utterance = fs::path(sd.source_paths[u]).stem().string();
      row.gender_category = CategoryName(pair.gender_category);
      row.seen_category = CategoryName(pair.seen_category);

      std::string id_key = row.source + "/" + row.source_utterance;
      if (!identity_cache.count(id_key))
        identity_cache[id_key] = Mcd(x.mcc, conv.ConvertMcc(x.mcc, sd.embedding));
      row.mcd_identity = identity_cache[id_key];

      VocoderFeatures y = conv.ConvertFeatures(x, td.embedding, src_f0, tgt_f0);
      row.mcd_cycle = Mcd(x.mcc, conv.ConvertMcc(y.mcc, sd.embedding));

      Waveform wave = Synthesize(y);
      VocoderFeatures heard = Analyze(wave, params);
      auto e = conv.EncodeReferences({heard}, tgt.gender);
      row.emb_sim_target = CosineSimilarity(e, td.embedding);
      row.emb_sim_source = CosineSimilarity(e, sd.embedding);
      row.gender_correct = conv.PredictGender(heard) == tgt.gender;
      if (config.write_audio)
        WriteWav((fs::path(config.out_dir) / "audio" /
                  (row.source + "_to_" + row.target + "_" + row.source_utterance + ".wav"))
                     .string(),
                 wave);
      report.rows.push_back(row);
    }
  }

  if (!data.empty()) {
    int first = plan.TestSpeakers().front();
    report.diversity = DiversityProbe(conv, data.at(first).sources.at(0).mcc,
                                      index.Speaker(first).gender,
                                      config.diversity_pairs, 7);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports.

std::vector<CategorySummary> EvalReport::Summaries() const {
  std::vector<CategorySummary> out;
  auto add = [&](const std::string &grouping, const std::string &category,
                 auto member) {
    CategorySummary s;
    s.grouping = grouping;
    s.category = category;
    for (const EvalRow &r : rows) {
      if (!member(r)) continue;
      ++s.count;
      s.mcd_identity += r.mcd_identity;
      s.mcd_cycle += r.mcd_cycle;
      s.emb_sim_target += r.emb_sim_target;
      s.emb_sim_source += r.emb_sim_source;
      s.gender_accuracy += r.gender_correct;
      if (r.source != r.target) {
        ++s.contested;
        s.target_wins += r.emb_sim_target > r.emb_sim_source;
      }
    }
    if (s.count == 0) {
      GAZEV_WARN << "Category " << grouping << "/" << category << " has no pairs";
    } else {
      s.mcd_identity /= s.count;
      s.mcd_cycle /= s.count;
      s.emb_sim_target /= s.count;
      s.emb_sim_source /= s.count;
      s.gender_accuracy /= s.count;
    }
    if (s.contested > 0) s.target_wins /= s.contested;
    out.push_back(s);
  };
  add("all", "all", [](const EvalRow &) { return true; });
  for (const char *c : {"F2F", "F2M", "M2F", "M2M"})
    add("gender", c, [c](const EvalRow &r) { return r.gender_category == c; });
  for (const char *c : {"S2S", "S2U", "U2S", "U2U"})
    add("seen", c, [c](const EvalRow &r) { return r.seen_category == c; });
  return out;
}

namespace {

const char *kRowHeader =
    "source,target,source_utterance,gender_category,seen_category,"
    "mcd_identity,mcd_cycle,emb_sim_target,emb_sim_source,gender_correct";

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string RowsToCsv(const std::vector<EvalRow> &rows) {
  std::string out = std::string(kRowHeader) + "\n";
  for (const EvalRow &r : rows) {
    for (const std::string *f : {&r.source, &r.target, &r.source_utterance})
      if (f->find(',') != std::string::npos)
        GAZEV_ERR << "Field '" << *f << "' contains a comma";
    out += r.source + "," + r.target + "," + r.source_utterance + "," +
           r.gender_category + "," + r.seen_category + "," + Num(r.mcd_identity) +
           "," + Num(r.mcd_cycle) + "," + Num(r.emb_sim_target) + "," +
           Num(r.emb_sim_source) + "," + std::to_string(r.gender_correct) + "\n";
  }
  return out;
}

std::vector<EvalRow> RowsFromCsv(const std::string &csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kRowHeader)
    GAZEV_ERR << "Unexpected eval rows header";
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = SplitCsv(line);
    if (f.size() != 10) GAZEV_ERR << "Bad eval row: " << line;
    EvalRow r;
    r.source = f[0];
    r.target = f[1];
    r.source_utterance = f[2];
    r.gender_category = f[3];
    r.seen_category = f[4];
    r.mcd_identity = std::stod(f[5]);
    r.mcd_cycle = std::stod(f[6]);
    r.emb_sim_target = std::stod(f[7]);
    r.emb_sim_source = std::stod(f[8]);
    r.gender_correct = std::stoi(f[9]);
    rows.push_back(r);
  }
  return rows;
}

std::string SummaryToCsv(const EvalReport &report) {
  std::string out =
      "grouping,category,count,mcd_identity,mcd_cycle,emb_sim_target,"
      "emb_sim_source,gender_accuracy,target_wins,contested\n";
  for (const CategorySummary &s : report.Summaries()) {
    out += s.grouping + "," + s.category + "," + std::to_string(s.count);
    if (s.count == 0) {
      out += ",,,,,,,0\n";  // empty category
      continue;
    }
    out += "," + Num(s.mcd_identity) + "," + Num(s.mcd_cycle) + "," +
           Num(s.emb_sim_target) + "," + Num(s.emb_sim_source) + "," +
           Num(s.gender_accuracy) + "," + Num(s.target_wins) + "," +
           std::to_string(s.contested) + "\n";
  }
  return out;
}

namespace {
double MetricOf(const CategorySummary &s, const std::string &metric) {
  if (metric == "mcd_identity") return s.mcd_identity;
  if (metric == "mcd_cycle") return s.mcd_cycle;
  if (metric == "emb_sim_target") return s.emb_sim_target;
  if (metric == "emb_sim_source") return s.emb_sim_source;
  if (metric == "gender_accuracy") return s.gender_accuracy;
  if (metric == "target_wins") return s.target_wins;
  GAZEV_ERR << "Unknown metric '" << metric << "'";
  return 0;
}
const char *kChartMetrics[] = {"mcd_identity", "mcd_cycle", "emb_sim_target",
                               "emb_sim_source", "gender_accuracy"};
}  // namespace

std::string BarChartSvg(const std::vector<CategorySummary> &summaries,
                        const std::string &grouping, const std::string &metric) {
  std::vector<const CategorySummary *> bars;
  for (const auto &s : summaries)
    if (s.grouping == grouping) bars.push_back(&s);
  if (bars.empty()) GAZEV_ERR << "No categories for grouping '" << grouping << "'";
  double lo = 0, hi = 0;
  for (const auto *b : bars) {
    double v = b->count ? MetricOf(*b, metric) : 0;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) hi = lo + 1;
  const int width = 480, height = 300, left = 60, top = 30, plot_h = 220;
  const int slot = (width - left - 20) / static_cast<int>(bars.size());
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\">"
     << metric << " by " << grouping << " category</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << y_of(0) << "\" x2=\"" << width - 20
     << "\" y2=\"" << y_of(0) << "\" stroke=\"black\"/>\n";
  char buf[64];
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const CategorySummary &b = *bars[i];
    double v = b.count ? MetricOf(b, metric) : 0;
    double x = left + slot * static_cast<double>(i) + slot * 0.15;
    double y0 = y_of(std::max(0.0, v)), y1 = y_of(std::min(0.0, v));
    os << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y0 << "\" width=\""
       << slot * 0.7 << "\" height=\"" << std::max(0.0, y1 - y0)
       << "\" fill=\"#4a7ab5\"/>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    os << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << y0 - 4
       << "\" text-anchor=\"middle\">" << (b.count ? buf : "empty") << "</text>\n";
    os << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << top + plot_h + 20
       << "\" text-anchor=\"middle\">" << b.category << " (n=" << b.count
       << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> EmitReport(const EvalReport &report,
                                    const std::string &out_dir,
                                    const std::string &format) {
  bool csv = format == "csv" || format == "all";
  bool svg = format == "svg" || format == "all";
  if (!csv && !svg)
    GAZEV_ERR << "Unknown report format '" << format << "' (csv, svg or all)";
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto put = [&](const std::string &name, const std::string &text) {
    std::string path = (fs::path(out_dir) / name).string();
    WriteFileAtomic(path, text);
    written.push_back(path);
  };
  if (csv) {
    put("eval_rows.csv", RowsToCsv(report.rows));
    put("eval_summary.csv", SummaryToCsv(report));
    nlohmann::json probes = {
        {"heldout_gender_accuracy", report.heldout_gender_accuracy},
        {"heldout_utterances", report.heldout_utterances},
        {"diversity", report.diversity}};
    put("eval_probes.json", probes.dump(1) + "\n");
  }
  if (svg) {
    auto summaries = report.Summaries();
    for (const char *grouping : {"gender", "seen"})
      for (const char *metric : kChartMetrics)
        put(std::string("chart_") + grouping + "_" + metric + ".svg",
            BarChartSvg(summaries, grouping, metric));
  }
  return written;
}

}  // namespace gazev
