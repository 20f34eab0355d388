// tests/eval-test.cc

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
#include "gazev/eval.h"
#include "gazev/pipeline.h"
#include "test-util.h"

namespace gazev {
namespace {

namespace fs = std::filesystem;

TEST(Mcd, Examples) {
  FrameMatrix a = FrameMatrix::Random(10, 36);
  EXPECT_EQ(Mcd(a, a), 0.0);
  FrameMatrix b = a;
  b.col(3).array() += 1.0;
  EXPECT_NEAR(Mcd(a, b), 10.0 / std::log(10.0) * std::sqrt(2.0), 1e-9);
  b = a;
  b.row(0).array() += 2.0;  // ||.|| = 12 on one of ten frames
  EXPECT_NEAR(Mcd(a, b), 10.0 / std::log(10.0) * std::sqrt(2.0) * 12.0 / 10, 1e-9);
  EXPECT_THROW(Mcd(a, a.topRows(5)), GazevError);
  EXPECT_THROW(Mcd(FrameMatrix(0, 36), FrameMatrix(0, 36)), GazevError);
}

TEST(CosineSimilarity, Properties) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(64), b(64);
    for (auto &v : a) v = n(rng);
    for (auto &v : b) v = n(rng);
    EXPECT_NEAR(CosineSimilarity(a, a), 1.0, 1e-12);
    std::vector<double> scaled = a;
    for (auto &v : scaled) v *= 3.7;
    EXPECT_NEAR(CosineSimilarity(scaled, b), CosineSimilarity(a, b), 1e-12);
    double c = CosineSimilarity(a, b);
    EXPECT_LE(std::abs(c), 1.0 + 1e-12);
  }
  EXPECT_NEAR(CosineSimilarity({1, 0}, {0, 2}), 0.0, 1e-15);
  EXPECT_NEAR(CosineSimilarity({1, 0}, {-1, 0}), -1.0, 1e-15);
  EXPECT_THROW(CosineSimilarity({0, 0}, {1, 0}), GazevError);
  EXPECT_THROW(CosineSimilarity({1}, {1, 0}), GazevError);
}

TEST(Categories, Functions) {
  EXPECT_EQ(GenderCategoryOf(Gender::kFemale, Gender::kMale), GenderCategory::kF2M);
  EXPECT_EQ(GenderCategoryOf(Gender::kMale, Gender::kMale), GenderCategory::kM2M);
  EXPECT_EQ(CategoryName(GenderCategory::kM2F), "M2F");
  EXPECT_EQ(CategoryName(SeenCategory::kU2S), "U2S");
  SplitPlan p;
  p.train_speakers = {1, 2, 3};
  p.seen_test = {2};
  p.unseen_test = {4};
  EXPECT_EQ(SeenCategoryOf(p, 2, 4), SeenCategory::kS2U);
  EXPECT_EQ(SeenCategoryOf(p, 4, 2), SeenCategory::kU2S);
  EXPECT_EQ(SeenCategoryOf(p, 4, 4), SeenCategory::kU2U);
}

CorpusIndex FakeIndex(int males, int females) {
  CorpusIndex idx;
  for (int i = 0; i < males + females; ++i) {
    SpeakerRecord r;
    r.speaker_id = "s" + std::to_string(100 + i);
    r.numeric_id = i + 1;
    r.gender = i < males ? Gender::kMale : Gender::kFemale;
    r.utterance_paths = {"a.wav", "b.wav"};
    idx.speakers.push_back(r);
  }
  return idx;
}

TEST(PlanEvalPairs, FourHundredPairsSixteenCells) {
  CorpusIndex idx = FakeIndex(47, 62);
  SplitConfig cfg;
  cfg.train = 80;
  cfg.seen = 10;
  cfg.unseen = 10;
  SplitPlan plan = SplitSpeakers(idx, cfg);
  auto pairs = PlanEvalPairs(idx, plan);
  ASSERT_EQ(pairs.size(), 400u);
  std::map<std::pair<int, int>, int> cells;
  std::set<std::pair<int, int>> unique;
  for (const EvalPair &p : pairs) {
    ++cells[{static_cast<int>(p.gender_category), static_cast<int>(p.seen_category)}];
    unique.insert({p.source, p.target});
    EXPECT_EQ(p.gender_category,
              GenderCategoryOf(idx.Speaker(p.source).gender, idx.Speaker(p.target).gender));
    EXPECT_EQ(p.seen_category, SeenCategoryOf(plan, p.source, p.target));
  }
  EXPECT_EQ(unique.size(), 400u);
  ASSERT_EQ(cells.size(), 16u);
  for (auto &[cell, n] : cells) EXPECT_EQ(n, 25);
}

EvalRow RandomRow(std::mt19937_64 *rng, int i) {
  std::uniform_real_distribution<double> u(-1, 10);
  static const char *g[] = {"F2F", "F2M", "M2F", "M2M"};
  static const char *s[] = {"S2S", "S2U", "U2S", "U2U"};
  EvalRow r;
  r.source = "p" + std::to_string((*rng)() % 4);
  r.target = "p" + std::to_string((*rng)() % 4);
  r.source_utterance = "utt" + std::to_string(i);
  r.gender_category = g[(*rng)() % 4];
  r.seen_category = s[(*rng)() % 4];
  r.mcd_identity = u(*rng);
  r.mcd_cycle = u(*rng) / 3;
  r.emb_sim_target = u(*rng) / 10;
  r.emb_sim_source = u(*rng) / 10;
  r.gender_correct = (*rng)() % 2;
  return r;
}

TEST(Report, CsvRoundTrip) {
  std::mt19937_64 rng(4);
  std::vector<EvalRow> rows;
  for (int i = 0; i < 40; ++i) rows.push_back(RandomRow(&rng, i));
  EXPECT_EQ(RowsFromCsv(RowsToCsv(rows)), rows);
  rows[0].source = "a,b";
  EXPECT_THROW(RowsToCsv(rows), GazevError);
  EXPECT_THROW(RowsFromCsv("nope\n"), GazevError);
}

// Property: each category aggregate is the plain mean of its member rows.
TEST(Report, AggregatesAreMeans) {
  std::mt19937_64 rng(8);
  EvalReport report;
  for (int i = 0; i < 200; ++i) report.rows.push_back(RandomRow(&rng, i));
  auto summaries = report.Summaries();
  ASSERT_EQ(summaries.size(), 9u);
  for (const CategorySummary &s : summaries) {
    double mcd = 0, acc = 0, wins = 0;
    int n = 0, contested = 0;
    for (const EvalRow &r : report.rows) {
      bool member = s.grouping == "all" ||
                    (s.grouping == "gender" && r.gender_category == s.category) ||
                    (s.grouping == "seen" && r.seen_category == s.category);
      if (!member) continue;
      ++n;
      mcd += r.mcd_identity;
      acc += r.gender_correct;
      if (r.source != r.target) ++contested, wins += r.emb_sim_target > r.emb_sim_source;
    }
    EXPECT_EQ(s.count, n);
    EXPECT_EQ(s.contested, contested);
    EXPECT_NEAR(s.mcd_identity, mcd / n, 1e-12);
    EXPECT_NEAR(s.gender_accuracy, acc / n, 1e-12);
    EXPECT_NEAR(s.target_wins, wins / contested, 1e-12);
  }
}

TEST(Report, EmptyCategoryWarns) {
  std::mt19937_64 rng(8);
  EvalReport report;
  report.rows.push_back(RandomRow(&rng, 0));
  LogCapture logs;
  report.Summaries();
  EXPECT_TRUE(logs.Contains("has no pairs"));
}

TEST(Report, ChartsAndFormats) {
  std::mt19937_64 rng(9);
  EvalReport report;
  for (int i = 0; i < 50; ++i) report.rows.push_back(RandomRow(&rng, i));
  auto summaries = report.Summaries();
  std::string svg = BarChartSvg(summaries, "gender", "mcd_identity");
  int bars = 0;
  for (std::size_t pos = 0; (pos = svg.find("<rect class=\"bar\"", pos)) != std::string::npos; ++pos)
    ++bars;
  EXPECT_EQ(bars, 4);
  for (const char *c : {"F2F", "F2M", "M2F", "M2M"}) EXPECT_NE(svg.find(c), std::string::npos);
  EXPECT_THROW(BarChartSvg(summaries, "gender", "bogus"), GazevError);

  TempDir dir("report");
  auto csv = EmitReport(report, dir / "csv", "csv");
  EXPECT_TRUE(fs::exists(dir.path() / "csv" / "eval_rows.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "csv" / "eval_summary.csv"));
  auto svgs = EmitReport(report, dir / "svg", "svg");
  EXPECT_TRUE(fs::exists(dir.path() / "svg" / "chart_seen_emb_sim_target.svg"));
  EXPECT_FALSE(fs::exists(dir.path() / "svg" / "eval_rows.csv"));
  EXPECT_EQ(EmitReport(report, dir / "all", "all").size(), csv.size() + svgs.size());
  EXPECT_THROW(EmitReport(report, dir / "x", "pdf"), GazevError);
  EXPECT_EQ(RowsFromCsv(ReadFileBytes((dir.path() / "csv" / "eval_rows.csv").string())), report.rows);
}

TEST(ConversionRequest, ExactlyOneTarget) {
  ConversionRequest r;
  EXPECT_THROW(r.Check(), GazevError);
  r.target_refs = {"x.wav"};
  EXPECT_NO_THROW(r.Check());
  r.target_prior_seed = 3;
  EXPECT_THROW(r.Check(), GazevError);
  r.target_refs.clear();
  EXPECT_NO_THROW(r.Check());
}

// Small prepared synthetic workspace shared by the conversion tests.
class ConversionTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("convert");
    Config c = Config::Defaults();
    c.Set("corpus.root", *dir_ / "corpus");
    c.Set("features.cache_dir", *dir_ / "features");
    c.Set("train.out_dir", *dir_ / "train");
    c.Set("eval.out_dir", *dir_ / "eval");
    c.Set("synth.utterances", "7");
    c.Set("synth.min_seconds", "1.4");
    c.Set("split.test_utterances", "3");
    c.Set("eval.ref_utterances", "2");
    c.Set("eval.diversity_pairs", "2");
    c.Set("net.prior_hidden", "16");
    ws_ = new Workspace(Prepare(c));
    state_ = new TrainState(NewTrainState(*ws_));
  }
  static void TearDownTestSuite() {
    delete state_;
    delete ws_;
    delete dir_;
  }
  static std::string Utt(int speaker_index, int u) {
    return ws_->index.speakers[speaker_index].utterance_paths[u];
  }
  static int FirstOf(Gender g) {
    for (int i = 0; i < ws_->index.n(); ++i)
      if (ws_->index.speakers[i].gender == g) return i;
    return -1;
  }
  static TempDir *dir_;
  static Workspace *ws_;
  static TrainState *state_;
};
TempDir *ConversionTest::dir_ = nullptr;
Workspace *ConversionTest::ws_ = nullptr;
TrainState *ConversionTest::state_ = nullptr;

TEST_F(ConversionTest, DurationAndDeterminism) {
  AnalysisParams params = AnalysisParams::FromConfig(ws_->config);
  ConversionRequest r;
  r.source_path = Utt(0, 0);
  r.target_refs = {Utt(1, 0), Utt(1, 1)};
  r.target_gender = ws_->index.speakers[1].gender;
  Waveform a = Convert(*state_, r, params);
  Waveform b = Convert(*state_, r, params);
  Waveform src = ReadWavAt(r.source_path, params.sample_rate);
  EXPECT_EQ(a.samples.size(), src.samples.size());
  EXPECT_EQ(a.samples, b.samples);
  r.target_refs.clear();
  r.target_prior_seed = 11;
  Waveform p = Convert(*state_, r, params);
  EXPECT_EQ(p.samples.size(), src.samples.size());
  EXPECT_EQ(p.samples, Convert(*state_, r, params).samples);
}

TEST_F(ConversionTest, MaleToFemaleF0LandsInFemaleBand) {
  AnalysisParams params = AnalysisParams::FromConfig(ws_->config);
  ConversionRequest r;
  r.source_path = Utt(FirstOf(Gender::kMale), 0);
  r.target_prior_seed = 1;
  r.target_gender = Gender::kFemale;
  VocoderFeatures out = Analyze(Convert(*state_, r, params), params);
  double sum = 0;
  int n = 0;
  for (double v : out.f0)
    if (v > 0) sum += v, ++n;
  ASSERT_GT(n, 0);
  EXPECT_GE(sum / n, 180);
  EXPECT_LE(sum / n, 260);
}

TEST_F(ConversionTest, TooShortReferenceIsFatal) {
  AnalysisParams params = AnalysisParams::FromConfig(ws_->config);
  Waveform w = ReadWavAt(Utt(1, 0), params.sample_rate);
  w.samples.resize(params.sample_rate / 20);  // 50 ms
  std::string shortref = *dir_ / "short.wav";
  WriteWav(shortref, w);
  ConversionRequest r;
  r.source_path = Utt(0, 0);
  r.target_refs = {shortref};
  r.target_gender = Gender::kFemale;
  try {
    Convert(*state_, r, params);
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("too short"), std::string::npos);
  }
}

TEST_F(ConversionTest, EvalProducesAllPairs) {
  FeatureCache cache(ws_->cache->dir(), ws_->cache->params());
  EvalConfig ec = EvalConfig::FromConfig(ws_->config);
  EvalReport rep = RunEval(*state_, ws_->index, ws_->plan, &cache, ec);
  ASSERT_EQ(rep.rows.size(), 16u);
  EXPECT_EQ(rep.heldout_utterances, 4 * 3);
  EXPECT_GE(rep.heldout_gender_accuracy, 0.0);
  EXPECT_LE(rep.heldout_gender_accuracy, 1.0);
  EXPECT_GT(rep.diversity, 0.0);
  for (const EvalRow &r : rep.rows) {
    EXPECT_TRUE(std::isfinite(r.mcd_identity));
    EXPECT_GE(r.mcd_cycle, 0.0);
    EXPECT_LE(std::abs(r.emb_sim_target), 1.0 + 1e-9);
  }
  EvalReport again = RunEval(*state_, ws_->index, ws_->plan, &cache, ec);
  EXPECT_EQ(again.rows, rep.rows);
  TrainState baseline = TrainState::Fresh(
      [] {
        NetConfig n = state_->net;
        n.mode = ConditioningMode::kStarGanBaseline;
        return n;
      }(),
      AdamOptions(), 1);
  EXPECT_THROW(RunEval(baseline, ws_->index, ws_->plan, &cache, ec), GazevError);
}

}  // namespace
}  // namespace gazev
