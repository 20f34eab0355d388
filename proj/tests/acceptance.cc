// tests/acceptance.cc

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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Arguments select a subset ("1 4 7").

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "gazev/binary-io.h"
#include "gazev/eval.h"
#include "gazev/losses.h"
#include "gazev/nets.h"
#include "gazev/pipeline.h"
#include "gazev/trainer.h"

namespace gazev {
namespace {

namespace fs = std::filesystem;

const std::string kSourceDir = GAZEV_SOURCE_DIR;
const std::string kWorkDir = GAZEV_ACCEPTANCE_WORK;

// Accumulates sub-checks of one criterion.
class Verdict {
 public:
  void Check(bool ok, const std::string &what) {
    if (!ok) pass_ = false;
    notes_.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void Note(const std::string &what) { notes_.push_back("     " + what); }
  bool pass() const { return pass_; }
  const std::vector<std::string> &notes() const { return notes_; }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
};

std::string Fmt(const char *format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char *format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof(buf), format, ap);
  va_end(ap);
  return buf;
}

Tensor Gaussian(const Shape &shape, std::mt19937_64 *rng, double scale = 1) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<BaseFloat>(normal(*rng));
  return t;
}

NetConfig ToyNet(ConditioningMode mode, int speakers = 3) {
  NetConfig c;
  c.mode = mode;
  c.num_speakers = speakers;
  c.gen_channels = 4;
  c.dis_channels = 4;
  c.enc_channels = 4;
  c.prior_hidden = 16;
  return c;
}

Config DeskConfig(const std::string &work) {
  Config c = Config::Defaults();
  c.ReadFile(kSourceDir + "/configs/desk.conf");
  c.Set("corpus.root", work + "/corpus");
  c.Set("features.cache_dir", work + "/features");
  c.Set("train.out_dir", work + "/train");
  c.Set("eval.out_dir", work + "/eval");
  return c;
}

TrainingData RandomData(const NetConfig &net, int speakers, int segments) {
  TrainingData d;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0, 1);
  for (int i = 0; i < segments; ++i) {
    MccSegment s;
    s.values = FrameMatrix(net.mcc_dim, net.num_frames);
    for (Eigen::Index k = 0; k < s.values.size(); ++k) s.values.data()[k] = normal(rng);
    d.Add(s, i % speakers, i % 2 ? Gender::kFemale : Gender::kMale);
  }
  return d;
}

TrainState RandomState(const NetConfig &net, std::uint64_t seed) {
  TrainState s = TrainState::Fresh(net, AdamOptions(), seed);
  for (int i = 0; i < net.num_speakers; ++i) {
    s.speakers.ids.push_back("spk" + std::to_string(i));
    s.speakers.genders.push_back(i % 2 ? Gender::kFemale : Gender::kMale);
  }
  return s;
}

// Runs argv to completion with output appended to log; returns exit status.
int Run(const std::vector<std::string> &argv, const std::string &log, pid_t *spawned = nullptr) {
  pid_t pid = fork();
  if (pid < 0) GAZEV_ERR << "fork failed";
  if (pid == 0) {
    int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd >= 0) {
      dup2(fd, 1);
      dup2(fd, 2);
    }
    std::vector<char *> args;
    for (const auto &a : argv) args.push_back(const_cast<char *>(a.c_str()));
    args.push_back(nullptr);
    execv(args[0], args.data());
    _exit(127);
  }
  if (spawned) {
    *spawned = pid;
    return 0;
  }
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- 1 ---------------------------------------------------------------------

void Shapes(Verdict *v) {
  NetConfig c;  // full width
  VcModel m(c, 3);
  std::mt19937_64 rng(1);
  Var x = MakeInput(Gaussian({1, 1, 36, 256}, &rng));
  GeneratorProbe probe;
  Var y = m.generator().Forward(x, MakeConstant(Gaussian({1, 64, 1, 1}, &rng)), &probe);
  v->Check(y->value.shape() == Shape({1, 1, 36, 256}),
           "generator 1x36x256 -> " + y->value.shape().ToString());
  v->Check(probe.bottleneck == Shape({1, 256, 9, 64}),
           "bottleneck " + probe.bottleneck.ToString());
  Tensor d = m.discriminator().Score(x, MakeConstant(OneHot({0}, 2)))->value;
  v->Check(d.shape() == Shape({1, 1, 2, 8}), "discriminator grid " + d.shape().ToString());
  Tensor e = m.encoder().Forward(x, MakeConstant(OneHot({1}, 2)))->value;
  v->Check(e.shape() == Shape({1, 64, 1, 1}), "E output " + e.shape().ToString());
  Tensor f = m.prior().Forward(MakeConstant(Gaussian({1, 16, 1, 1}, &rng)),
                               MakeConstant(OneHot({0}, 2)))->value;
  v->Check(f.shape() == Shape({1, 64, 1, 1}), "F output " + f.shape().ToString());
}

// ---- 2 ---------------------------------------------------------------------

void AdainStatistics(Verdict *v) {
  std::mt19937_64 rng(9);
  const int channels = 8, e = 64, h = 9, w = 64;
  AdainLayer layer;
  layer.scale_map.weight = MakeParameter(Gaussian({channels, e, 1, 1}, &rng, 0.2));
  layer.scale_map.bias = MakeParameter(Gaussian({1, channels, 1, 1}, &rng));
  layer.shift_map.weight = MakeParameter(Gaussian({channels, e, 1, 1}, &rng, 0.2));
  layer.shift_map.bias = MakeParameter(Gaussian({1, channels, 1, 1}, &rng));
  std::uniform_real_distribution<double> sig(0.1, 3.0), mu(-5, 5);
  std::normal_distribution<double> normal(0, 1);
  double worst_mean = 0, worst_std = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x(1, channels, h, w);
    for (int ch = 0; ch < channels; ++ch) {
      double s = sig(rng), m = mu(rng);
      for (int i = 0; i < h * w; ++i) x.Plane(0, ch)[i] = static_cast<BaseFloat>(m + s * normal(rng));
    }
    Tensor s = Gaussian({1, e, 1, 1}, &rng);
    Tensor y = ApplyAdain(MakeInput(x), MakeConstant(s), layer, 1e-5)->value;
    for (int ch = 0; ch < channels; ++ch) {
      double f = layer.scale_map.bias->value[ch], g = layer.shift_map.bias->value[ch];
      for (int k = 0; k < e; ++k) {
        f += layer.scale_map.weight->value[ch * e + k] * s[k];
        g += layer.shift_map.weight->value[ch * e + k] * s[k];
      }
      double mean = 0, var = 0;
      const BaseFloat *p = y.Plane(0, ch);
      for (int i = 0; i < h * w; ++i) mean += p[i];
      mean /= h * w;
      for (int i = 0; i < h * w; ++i) var += (p[i] - mean) * (p[i] - mean);
      worst_mean = std::max(worst_mean, std::abs(mean - g));
      worst_std = std::max(worst_std, std::abs(std::sqrt(var / (h * w)) - std::abs(f)));
    }
  }
  v->Check(worst_mean < 1e-4, Fmt("max |mean - g(s)| = %.3g (< 1e-4)", worst_mean));
  v->Check(worst_std < 1e-3, Fmt("max |std - |f(s)|| = %.3g (< 1e-3)", worst_std));
}

// ---- 3 ---------------------------------------------------------------------

Var Filled(const Shape &s, BaseFloat value) { return MakeInput(Tensor(s, value)); }

void LossExamples(Verdict *v) {
  const Shape grid{4, 1, 2, 8}, seg{2, 1, 36, 256}, emb{2, 64, 1, 1};
  auto near = [&](double got, double want, double tol, const std::string &what) {
    v->Check(std::abs(got - want) <= tol, Fmt("%s = %.9g (want %.9g)", what.c_str(), got, want));
  };
  auto [d0, g0] = AdvLoss(Filled(grid, 0), Filled(grid, 0));
  near(ScalarValue(d0), 2 * std::log(2.0), 1e-6, "adv_d at zero logits");
  near(ScalarValue(g0), std::log(2.0), 1e-6, "adv_g at zero logits");
  near(ScalarValue(DiscriminatorAdvLoss(Filled(grid, 40), Filled(grid, -40))), 0, 1e-6,
       "adv_d, perfect discriminator");
  near(ScalarValue(ClsLossReal(Filled({3, 2, 1, 1}, 0.3f), {0, 1, 1})), std::log(2.0), 1e-6,
       "cls, uniform 2-way logits");
  Tensor confident(2, 2, 1, 1);
  confident[0] = 50;
  confident[3] = 50;
  near(ScalarValue(ClsLossReal(MakeInput(confident), {0, 1})), 0, 1e-6, "cls, confident");

  VcModel m(ToyNet(ConditioningMode::kGazev), 12);
  std::mt19937_64 rng(13);
  double total = 0;
  for (int r = 0; r < 1000; ++r) {
    Var logits = m.discriminator().Classify(MakeInput(Gaussian({1, 1, 36, 256}, &rng)));
    total += ScalarValue(ClsLossReal(logits, {static_cast<int>(rng() % 2)}));
  }
  near(total / 1000, std::log(2.0), 1e-2, "C chance-level CE over 1000 inputs");

  Tensor x = Gaussian(seg, &rng);
  Tensor up = x;
  for (std::size_t i = 0; i < up.size(); ++i) up[i] += 0.5f;
  near(ScalarValue(CycLoss(MakeInput(x), MakeInput(x))), 0, 0, "cyc, identical");
  near(ScalarValue(CycLoss(MakeInput(x), MakeInput(up))), 0.5, 1e-6, "cyc, offset 0.5");
  near(ScalarValue(IdLoss(MakeInput(x), MakeInput(x))), 0, 0, "id, identical");
  near(ScalarValue(IdLoss(MakeInput(x), MakeInput(up))), 0.5, 1e-6, "id, offset 0.5");
  SpeakerLossTerms spk =
      SpkLoss(Filled(seg, 1.5f), Filled(seg, 2.5f), Filled(emb, 0.25f), Filled(emb, 0.25f));
  near(ScalarValue(spk.match), 0, 0, "spk match, equal embeddings");
  near(ScalarValue(spk.div), 1.0, 1e-6, "spk diversity, outputs 1 apart");

  LossBundle b;
  b.adv_g = 0.7;
  b.cls_g = b.cyc = b.id = b.spk_match = 0.1;
  near(TotalGLoss(b, LossWeights()), 4.7, 1e-6, "total_g arithmetic");
  b = LossBundle();
  b.spk_div = 50;
  near(TotalGLoss(b, LossWeights()), -10, 1e-6, "total_g, diversity clamp");
  near(TotalGLoss(LossBundle(), LossWeights()), 0, 0, "total_g of zero terms");
}

// ---- 4 ---------------------------------------------------------------------

void GradientChecks(Verdict *v) {
  // (a) finite differences, double precision, in a separate binary.
  const std::string log = kWorkDir + "/gradcheck.txt";
  fs::remove(log);
  int status = Run({GAZEV_GRADCHECK_PROBE, "1"}, log);
  v->Check(status == 0, Fmt("gradcheck-probe exit status %d", status));
  std::ifstream in(log);
  int terms = 0;
  double worst = 0;
  std::string worst_term;
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    std::string term, param;
    double rel;
    int checked;
    if (!(ls >> term >> rel >> checked >> param)) continue;
    ++terms;
    v->Check(rel < 1e-3 && checked > 0,
             Fmt("(a) %-17s max rel err %.2e over %d directions", term.c_str(), rel, checked));
    if (!(rel <= worst)) worst = rel, worst_term = term;
  }
  v->Check(terms == 15, Fmt("(a) %d loss terms checked", terms));

  // (b) partition hashes, several steps in each mode.
  for (ConditioningMode mode : {ConditioningMode::kGazev, ConditioningMode::kStarGanBaseline}) {
    NetConfig net = ToyNet(mode);
    TrainingData data = RandomData(net, 3, 8);
    TrainState s = RandomState(net, 3);
    bool ok = true, moved = true;
    for (int step = 0; step < 5; ++step) {
      PartitionAudit a;
      Batch b = SampleBatch(data, s.speakers, s.net, 2, &s.rng);
      std::uint64_t critic0 = HashParams(s.model->CriticSideParams());
      TrainStep(&s, b, LossWeights(), &a);
      ok = ok && a.Ok();
      moved = moved && a.critic_before_gen_phase != critic0 &&
              HashParams(s.model->GeneratorSideParams()) != a.gen_before;
    }
    v->Check(ok && moved, "(b) " + ModeName(mode) +
                              ": frozen side unchanged in each phase over 5 steps, "
                              "updated side changed");
  }

  // (c) every parameter tensor gets a non-zero gradient from its total.
  for (ConditioningMode mode : {ConditioningMode::kGazev, ConditioningMode::kStarGanBaseline}) {
    Config desk = DeskConfig(kWorkDir + "/unused");
    desk.Set("net.mode", ModeName(mode));
    NetConfig net = NetConfigFromConfig(desk, 6);
    TrainingData data = RandomData(net, 6, 8);
    TrainState s = RandomState(net, 4);
    Batch b = SampleBatch(data, s.speakers, s.net, 4, &s.rng);
    TrainStep(&s, b, LossWeights());
    int total = 0;
    std::vector<std::string> dead;
    for (const auto &p : s.model->AllParams()) {
      ++total;
      if (!p.var->HasGrad() || !(p.var->grad.SumAbs() > 0)) dead.push_back(p.name);
    }
    std::string detail = Fmt("(c) %s: %d/%d tensors with non-zero gradient", ModeName(mode).c_str(),
                             total - static_cast<int>(dead.size()), total);
    for (const auto &d : dead) detail += " [" + d + "]";
    v->Check(dead.empty(), detail);
  }
}

// ---- 5 ---------------------------------------------------------------------

void StyleIsolation(Verdict *v) {
  VcModel m(NetConfig(), 6);
  std::mt19937_64 rng(4);
  auto weights = m.generator().AdainWeights();
  std::vector<Tensor> saved;
  for (auto &w : weights) {
    saved.push_back(w->value);
    w->value.SetZero();
  }
  Var x = MakeInput(Gaussian({1, 1, 36, 256}, &rng));
  Tensor s1 = Gaussian({1, 64, 1, 1}, &rng), s2 = Gaussian({1, 64, 1, 1}, &rng);
  Tensor a = m.generator().Forward(x, MakeConstant(s1))->value;
  Tensor b = m.generator().Forward(x, MakeConstant(s2))->value;
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];
  v->Check(same, Fmt("%zu AdaIN weights zeroed: outputs bit-identical for distinct s",
                     weights.size()));
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k]->value = saved[k];
  Tensor c = m.generator().Forward(x, MakeConstant(s1))->value;
  Tensor d = m.generator().Forward(x, MakeConstant(s2))->value;
  d.AddScaled(c, -1);
  v->Check(d.SumAbs() > 0, Fmt("weights restored: mean |difference| = %.3g",
                               d.SumAbs() / d.size()));
}

// ---- 6 ---------------------------------------------------------------------

std::vector<double> MetricColumn(const std::string &path, const std::string &name,
                                 std::vector<std::int64_t> *steps) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string f; std::getline(hs, f, ',');) header.push_back(f);
  int col = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) col = static_cast<int>(i);
  if (col < 0) GAZEV_ERR << path << " has no column " << name;
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::vector<std::string> f;
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    steps->push_back(std::stoll(f[0]));
    out.push_back(std::stod(f[col]));
  }
  return out;
}

void DeskTraining(Verdict *v) {
  const std::string work = kWorkDir + "/desk";
  Config config = DeskConfig(work);
  Workspace ws = Prepare(config);
  TrainConfig tc = TrainConfig::FromConfig(config);
  v->Note(Fmt("corpus %d speakers, split %zu train / %zu seen / %zu unseen, %lld steps, "
              "batch %d, lr %g",
              ws.index.n(), ws.plan.train_speakers.size(), ws.plan.seen_test.size(),
              ws.plan.unseen_test.size(), static_cast<long long>(tc.total_steps),
              tc.batch_size, tc.adam.learning_rate));
  std::string latest = LatestCheckpoint(tc.out_dir);
  if (!latest.empty()) v->Note("resuming from " + latest);
  auto start = std::chrono::steady_clock::now();
  TrainResult result = RunTraining(ws, latest);
  double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60;
  v->Note(Fmt("training wall time in this invocation: %.1f min", minutes));

  std::vector<std::int64_t> steps;
  std::vector<double> id = MetricColumn(result.metrics_path, "id", &steps);
  double first = 0, last = 0;
  int nf = 0, nl = 0;
  for (std::size_t i = 0; i < id.size(); ++i) {
    if (steps[i] <= 100) first += id[i], ++nf;
    if (steps[i] > tc.total_steps - 100) last += id[i], ++nl;
  }
  v->Check(nf == 100 && nl == 100, Fmt("metrics rows: %d in steps 1-100, %d in final 100", nf, nl));
  first /= std::max(nf, 1);
  last /= std::max(nl, 1);
  v->Check(last <= 0.5 * first,
           Fmt("(a) mean id loss: first 100 steps %.4f, final 100 steps %.4f (ratio %.3f, need <= 0.5)",
               first, last, last / first));

  TrainState state = LoadCheckpoint(result.final_checkpoint);
  EvalConfig ec = EvalConfig::FromConfig(config);
  EvalReport report = RunEval(state, ws.index, ws.plan, ws.cache.get(), ec);
  EmitReport(report, ec.out_dir, "all");
  v->Check(report.heldout_gender_accuracy >= 0.9,
           Fmt("(b) held-out gender accuracy %.3f over %d utterances (need >= 0.9)",
               report.heldout_gender_accuracy, report.heldout_utterances));
  const CategorySummary *all = nullptr, *u2u = nullptr;
  auto summaries = report.Summaries();
  for (const auto &s : summaries) {
    if (s.grouping == "all") all = &s;
    if (s.category == "U2U") u2u = &s;
    if (s.grouping != "all")
      v->Note(Fmt("%s/%s: n=%d mcd_id %.2f mcd_cyc %.2f sim_t %.3f sim_s %.3f wins %.2f of %d, "
                  "gender acc %.2f",
                  s.grouping.c_str(), s.category.c_str(), s.count, s.mcd_identity, s.mcd_cycle,
                  s.emb_sim_target, s.emb_sim_source, s.target_wins, s.contested,
                  s.gender_accuracy));
  }
  v->Check(all && u2u && u2u->contested > 0 && all->target_wins >= 0.7,
           Fmt("(c) emb_sim_target > emb_sim_source in %.3f of %d cross-speaker conversions "
               "(U2U %.2f of %d; need >= 0.7 overall)",
               all ? all->target_wins : 0.0, all ? all->contested : 0,
               u2u ? u2u->target_wins : 0.0, u2u ? u2u->contested : 0));
  v->Check(report.diversity > 1e-3,
           Fmt("(d) diversity: mean L1 between outputs of %d prior pairs = %.4g (> 1e-3)",
               ec.diversity_pairs, report.diversity));
}

// ---- 7 ---------------------------------------------------------------------

void ProtocolFidelity(Verdict *v) {
  Config vctk = Config::Defaults();
  vctk.ReadFile(kSourceDir + "/configs/vctk.conf");
  CorpusIndex idx;  // VCTK: 109 speakers, 47 male / 62 female
  for (int i = 0; i < 109; ++i) {
    SpeakerRecord r;
    r.speaker_id = "p" + std::to_string(225 + i);
    r.numeric_id = i + 1;
    r.gender = i < 47 ? Gender::kMale : Gender::kFemale;
    r.utterance_paths = {"a.wav", "b.wav"};
    idx.speakers.push_back(r);
  }
  int males = 0;
  for (const auto &s : idx.speakers) males += s.gender == Gender::kMale;
  SplitPlan plan = SplitSpeakers(idx, SplitConfig::FromConfig(vctk));
  auto pairs = PlanEvalPairs(idx, plan);
  std::map<std::pair<int, int>, int> cells;
  for (const auto &p : pairs)
    ++cells[{static_cast<int>(p.gender_category), static_cast<int>(p.seen_category)}];
  v->Note(Fmt("index: 109 speakers (%d M / %d F); split %zu/%zu/%zu", males, 109 - males,
              plan.train_speakers.size(), plan.seen_test.size(), plan.unseen_test.size()));
  v->Check(pairs.size() == 400, Fmt("%zu conversions enumerated (want 400)", pairs.size()));
  int smallest = pairs.size();
  for (auto &[cell, n] : cells) smallest = std::min(smallest, n);
  v->Check(cells.size() == 16 && smallest > 0,
           Fmt("%zu of 16 gender x seen cells populated (smallest %d)", cells.size(), smallest));
}

// ---- 8 ---------------------------------------------------------------------

void DeterminismAndResume(Verdict *v) {
  const std::string work = kWorkDir + "/resume";
  fs::remove_all(work);
  fs::create_directories(work);
  Config c = DeskConfig(work);
  c.Set("synth.utterances", "7");
  c.Set("synth.min_seconds", "1.4");
  c.Set("split.test_utterances", "3");
  c.Set("net.gen_channels", "4");
  c.Set("net.dis_channels", "4");
  c.Set("net.prior_hidden", "16");
  c.Set("train.batch_size", "4");
  c.Set("train.total_steps", "30");
  c.Set("train.checkpoint_every", "5");
  const std::string conf = work + "/run.conf";
  WriteFileAtomic(conf, c.ToText());
  const std::string log = work + "/log.txt";
  auto cli = [&](const std::string &out_dir, std::vector<std::string> extra) {
    std::vector<std::string> argv = {GAZEV_CLI, "--config", conf, "--train.out_dir", out_dir};
    argv.insert(argv.end(), extra.begin(), extra.end());
    return argv;
  };
  v->Check(Run(cli(work + "/a", {"prep"}), log) == 0, "prep");
  v->Check(Run(cli(work + "/a", {"train"}), log) == 0, "uninterrupted run A");
  v->Check(Run(cli(work + "/b", {"train"}), log) == 0, "uninterrupted run B");
  std::string a = ReadFileBytes(work + "/a/metrics.csv");
  v->Check(a == ReadFileBytes(work + "/b/metrics.csv"),
           "same seed: metrics.csv of A and B bit-identical");
  v->Check(ReadFileBytes(CheckpointPath(work + "/a", 30)) ==
               ReadFileBytes(CheckpointPath(work + "/b", 30)),
           "same seed: final checkpoints bit-identical");

  // Kill run K with SIGKILL once its first checkpoint exists, then resume.
  pid_t pid = 0;
  Run(cli(work + "/k", {"train"}), log, &pid);
  const std::string first = CheckpointPath(work + "/k", 5);
  int status = 0;
  bool exited = false;
  while (!fs::exists(first)) {
    if (waitpid(pid, &status, WNOHANG) == pid) {
      exited = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!exited) {
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
  }
  std::string latest = LatestCheckpoint(work + "/k");
  v->Check(!exited && WIFSIGNALED(status), "run K killed mid-training, latest checkpoint " +
                                               fs::path(latest).filename().string());
  v->Check(Run(cli(work + "/k", {"--checkpoint", latest, "train"}), log) == 0,
           "run K resumed to completion");
  v->Check(ReadFileBytes(work + "/k/metrics.csv") == a,
           "killed-and-resumed metrics.csv bit-identical to uninterrupted run");
  v->Check(ReadFileBytes(CheckpointPath(work + "/k", 30)) ==
               ReadFileBytes(CheckpointPath(work + "/a", 30)),
           "killed-and-resumed final checkpoint bit-identical");
}

// ---- 9 ---------------------------------------------------------------------

void BaselineMode(Verdict *v) {
  const std::string work = kWorkDir + "/desk";
  Config config = DeskConfig(work);
  config.Set("net.mode", "stargan_baseline");
  config.Set("train.out_dir", kWorkDir + "/baseline");
  config.Set("train.total_steps", "100");
  config.Set("train.checkpoint_every", "100");
  fs::remove_all(kWorkDir + "/baseline");
  Workspace ws = Prepare(config);
  const int n = ws.speakers.size();
  NetConfig net = NetConfigFromConfig(config, n);
  VcModel model(net, 1);
  std::vector<int> labels(4);
  for (int i = 0; i < 4; ++i) labels[i] = i % n;
  double ce = ScalarValue(ClsLossFake(Filled({4, n, 1, 1}, 0), labels));
  v->Check(std::abs(ce - std::log(static_cast<double>(n))) < 1e-6,
           Fmt("uniform-logit CE %.9f = ln %d = %.9f", ce, n, std::log(static_cast<double>(n))));
  std::mt19937_64 rng(2);
  Tensor logits = model.discriminator().Classify(MakeInput(Gaussian({2, 1, 36, 256}, &rng)))->value;
  v->Check(logits.shape() == Shape({2, n, 1, 1}),
           "classifier head is " + std::to_string(n) + "-way: " + logits.shape().ToString());
  TrainResult r = RunTraining(ws, "");
  TrainState s = LoadCheckpoint(r.final_checkpoint);
  v->Check(s.step == 100 && s.net.mode == ConditioningMode::kStarGanBaseline,
           Fmt("trained %lld steps in stargan_baseline mode without error",
               static_cast<long long>(s.step)));
  std::vector<std::int64_t> steps;
  auto cls = MetricColumn(r.metrics_path, "cls_c", &steps);
  v->Check(steps.size() == 100, Fmt("metrics rows %zu, initial cls_c %.3f (ln %d = %.3f)",
                                    steps.size(), cls.empty() ? 0.0 : cls[0], n,
                                    std::log(static_cast<double>(n))));
}

}  // namespace
}  // namespace gazev

int main(int argc, char **argv) {
  using namespace gazev;
  const std::vector<std::pair<int, std::function<void(Verdict *)>>> criteria = {
      {1, Shapes}, {2, AdainStatistics}, {3, LossExamples}, {4, GradientChecks},
      {5, StyleIsolation}, {6, DeskTraining}, {7, ProtocolFidelity},
      {8, DeterminismAndResume}, {9, BaselineMode}};
  const char *names[] = {"", "shape suite", "AdaIN statistics", "loss unit examples",
                         "gradient checks", "style-path isolation", "desk-scale training",
                         "protocol fidelity", "determinism and resumability",
                         "baseline-mode equivalence"};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  std::filesystem::create_directories(kWorkDir);
  int failed = 0;
  for (const auto &[id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    auto start = std::chrono::steady_clock::now();
    try {
      fn(&v);
    } catch (const std::exception &e) {
      v.Check(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto &n : v.notes()) std::printf("    %s\n", n.c_str());
    std::printf("criterion %d %s: %s (%.1f s)\n", id, v.pass() ? "PASS" : "FAIL", names[id], secs);
    std::fflush(stdout);
    failed += !v.pass();
  }
  return failed == 0 ? 0 : 1;
}
