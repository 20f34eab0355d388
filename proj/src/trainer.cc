// trainer.cc

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

#include "gazev/trainer.h"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gazev/binary-io.h"
#include "json.hpp"

namespace gazev {

namespace fs = std::filesystem;

TrainConfig TrainConfig::FromConfig(const Config &config) {
  TrainConfig c;
  c.batch_size = config.GetInt("train.batch_size");
  c.adam.learning_rate = config.GetDouble("train.learning_rate");
  c.adam.beta1 = config.GetDouble("train.beta1");
  c.adam.beta2 = config.GetDouble("train.beta2");
  c.total_steps = config.GetInt64("train.total_steps");
  c.checkpoint_every = config.GetInt64("train.checkpoint_every");
  c.log_every = config.GetInt64("train.log_every");
  c.audit_every = config.GetInt64("train.audit_every");
  c.seed = static_cast<std::uint64_t>(config.GetInt64("seed"));
  c.out_dir = config.GetString("train.out_dir");
  c.weights.adv = config.GetDouble("loss.adv");
  c.weights.cls = config.GetDouble("loss.cls");
  c.weights.cyc = config.GetDouble("loss.cyc");
  c.weights.id = config.GetDouble("loss.id");
  c.weights.spk = config.GetDouble("loss.spk");
  c.weights.div_margin = config.GetDouble("loss.div_margin");
  c.weights.saturating_adv = config.GetBool("loss.saturating_adv");
  c.Check();
  return c;
}

void TrainConfig::Check() const {
  if (batch_size < 2)
    GAZEV_ERR << "batch_size must be >= 2 (the diversity term pairs samples), got "
              << batch_size;
  if (total_steps < 1) GAZEV_ERR << "total_steps must be >= 1";
  if (checkpoint_every < 1 || log_every < 1 || audit_every < 0)
    GAZEV_ERR << "checkpoint_every and log_every must be >= 1";
  if (!(adam.learning_rate > 0)) GAZEV_ERR << "learning_rate must be > 0";
  weights.Check();
}

NetConfig NetConfigFromConfig(const Config &config, int num_speakers) {
  NetConfig net;
  net.mode = ParseMode(config.GetString("net.mode"));
  net.num_speakers = num_speakers;
  net.mcc_dim = config.GetInt("features.mcc_dim");
  net.num_frames = config.GetInt("features.segment_frames");
  net.gen_channels = config.GetInt("net.gen_channels");
  net.dis_channels = config.GetInt("net.dis_channels");
  net.enc_channels = config.GetInt("net.enc_channels");
  net.prior_hidden = config.GetInt("net.prior_hidden");
  net.prior_layers = config.GetInt("net.prior_layers");
  net.prior_dim = config.GetInt("net.prior_dim");
  net.embed_dim = config.GetInt("net.embed_dim");
  net.Check();
  return net;
}

int SpeakerTable::ClassOf(const std::string &speaker_id) const {
  for (int i = 0; i < size(); ++i)
    if (ids[i] == speaker_id) return i;
  return -1;
}

SpeakerTable SpeakerTable::FromPlan(const CorpusIndex &index,
                                    const SplitPlan &plan) {
  SpeakerTable t;
  for (int id : plan.train_speakers) {
    const SpeakerRecord &s = index.Speaker(id);
    t.ids.push_back(s.speaker_id);
    t.genders.push_back(s.gender);
  }
  return t;
}

void TrainingData::Add(const MccSegment &segment, int cls, Gender g) {
  const int dim = static_cast<int>(segment.values.rows());
  const int len = static_cast<int>(segment.values.cols());
  if (size() == 0 && mcc_dim == 0) {
    mcc_dim = dim;
    frames = len;
  }
  if (dim != mcc_dim || len != frames)
    GAZEV_ERR << "Segment shape " << dim << "x" << len << " differs from "
              << mcc_dim << "x" << frames;
  for (int d = 0; d < dim; ++d)
    for (int t = 0; t < len; ++t)
      values.push_back(static_cast<BaseFloat>(segment.values(d, t)));
  speaker_class.push_back(cls);
  gender.push_back(g);
}

TrainingData BuildTrainingData(const CorpusIndex &index, const SplitPlan &plan,
                               const SpeakerTable &table, FeatureCache *cache,
                               const SpeakerStats &normalizer) {
  TrainingData data;
  const int length = cache->params().segment_frames;
  for (int id : plan.train_speakers) {
    const SpeakerRecord &s = index.Speaker(id);
    int cls = table.ClassOf(s.speaker_id);
    if (cls < 0) GAZEV_ERR << "Speaker " << s.speaker_id << " missing from speaker table";
    for (const std::string &u : TrainUtterances(s, plan)) {
      FrameMatrix mcc = Standardize(cache->Get(u).mcc, normalizer);
      for (const MccSegment &seg :
           Segment(mcc, length, length, SegmentMode::kTraining, id))
        data.Add(seg, cls, s.gender);
    }
  }
  if (data.size() == 0)
    GAZEV_ERR << "No training segments: every training utterance is shorter than "
              << length << " frames";
  return data;
}

Batch SampleBatch(const TrainingData &data, const SpeakerTable &table,
                  const NetConfig &net, int batch_size, std::mt19937_64 *rng) {
  if (data.size() == 0) GAZEV_ERR << "Empty training data";
  if (data.mcc_dim != net.mcc_dim || data.frames != net.num_frames)
    GAZEV_ERR << "Training segments are " << data.mcc_dim << "x" << data.frames
              << ", network expects " << net.mcc_dim << "x" << net.num_frames;
  Batch b;
  b.x = Tensor(batch_size, 1, data.mcc_dim, data.frames);
  const std::size_t seg = static_cast<std::size_t>(data.mcc_dim) * data.frames;
  std::uniform_int_distribution<int> pick(0, data.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> speaker(0, std::max(0, table.size() - 1));
  const bool gazev = net.mode == ConditioningMode::kGazev;
  for (int n = 0; n < batch_size; ++n) {
    int i = pick(*rng);
    std::copy(data.Segment(i), data.Segment(i) + seg, b.x.Sample(n));
    b.src_class.push_back(data.speaker_class[i]);
    b.src_gender.push_back(static_cast<int>(data.gender[i]));
    if (gazev) {
      b.tgt_gender.push_back(coin(*rng));
      b.tgt_class.push_back(-1);
    } else {
      int c = speaker(*rng);
      b.tgt_class.push_back(c);
      b.tgt_gender.push_back(static_cast<int>(table.genders.at(c)));
    }
  }
  if (gazev) {
    std::normal_distribution<double> normal(0.0, 1.0);
    b.z1 = Tensor(batch_size, net.prior_dim, 1, 1);
    b.z2 = Tensor(batch_size, net.prior_dim, 1, 1);
    for (std::size_t k = 0; k < b.z1.size(); ++k) {
      b.z1[k] = static_cast<BaseFloat>(normal(*rng));
      b.z2[k] = static_cast<BaseFloat>(normal(*rng));
    }
  }
  return b;
}

TrainState TrainState::Fresh(const NetConfig &net, const AdamOptions &adam,
                             std::uint64_t seed) {
  TrainState s;
  s.net = net;
  s.adam = adam;
  s.model = std::make_unique<VcModel>(net, seed);
  s.gen_opt = std::make_unique<Adam>(s.model->GeneratorSideParams(), adam);
  s.critic_opt = std::make_unique<Adam>(s.model->CriticSideParams(), adam);
  // Sampling stream is separate from the initialisation stream.
  s.rng.seed(seed ^ 0x9e3779b97f4a7c15ull);
  return s;
}

std::uint64_t HashParams(const std::vector<NamedParam> &params) {
  std::uint64_t h = Fnv1a64(nullptr, 0);
  for (const NamedParam &p : params)
    h = Fnv1a64(p.var->value.data(), p.var->value.size() * sizeof(BaseFloat), h);
  return h;
}

namespace {

void SetTrainable(const std::vector<NamedParam> &params, bool trainable) {
  for (const NamedParam &p : params) p.var->requires_grad = trainable;
}

std::string DescribeBundle(const LossBundle &b) {
  std::ostringstream os;
  const auto &names = LossColumnNames();
  auto values = LossColumns(b);
  for (std::size_t i = 0; i < names.size(); ++i)
    os << (i ? " " : "") << names[i] << "=" << values[i];
  return os.str();
}

void CheckFinite(const LossBundle &b, std::int64_t step,
                 std::initializer_list<std::pair<const char *, double>> terms) {
  for (auto [name, v] : terms)
    if (!std::isfinite(v))
      GAZEV_ERR << "Non-finite loss term '" << name << "' at step " << step
                << "; terms so far: " << DescribeBundle(b);
}

}  // namespace

LossBundle TrainStep(TrainState *state, const Batch &batch,
                     const LossWeights &weights, PartitionAudit *audit) {
  const VcModel &m = *state->model;
  const NetConfig &net = state->net;
  const bool gazev = net.mode == ConditioningMode::kGazev;
  const std::int64_t step = state->step + 1;
  const auto gen_params = m.GeneratorSideParams();
  const auto critic_params = m.CriticSideParams();
  const int classes = net.NumClasses();

  Var x = MakeInput(batch.x);
  Var ux = MakeConstant(OneHot(batch.src_gender, 2));
  Var uy = MakeConstant(OneHot(batch.tgt_gender, 2));
  // D's conditioning code and C's labels: gender (gazev) or speaker (baseline).
  Var cond_src = gazev ? ux : MakeConstant(OneHot(batch.src_class, classes));
  Var cond_tgt = gazev ? uy : MakeConstant(OneHot(batch.tgt_class, classes));
  const std::vector<int> &label_src = gazev ? batch.src_gender : batch.src_class;
  const std::vector<int> &label_tgt = gazev ? batch.tgt_gender : batch.tgt_class;
  Var z1, z2;
  if (gazev) {
    z1 = MakeConstant(batch.z1);
    z2 = MakeConstant(batch.z2);
  }

  LossBundle bundle;

  // Phase 1: D and C, with G, F, E frozen.
  SetTrainable(gen_params, false);
  SetTrainable(critic_params, true);
  if (audit) audit->gen_before = HashParams(gen_params);
  {
    Var s_y = gazev ? m.prior().Forward(z1, uy) : cond_tgt;
    Var fake = Detach(m.generator().Forward(x, s_y));
    Var adv_d = DiscriminatorAdvLoss(m.discriminator().Score(x, cond_src),
                                     m.discriminator().Score(fake, cond_tgt));
    Var cls_c = ClsLossReal(m.discriminator().Classify(x), label_src);
    Var total_dc = TotalDcLoss(adv_d, cls_c, weights);
    bundle.adv_d = ScalarValue(adv_d);
    bundle.cls_c = ScalarValue(cls_c);
    bundle.total_dc = ScalarValue(total_dc);
    CheckFinite(bundle, step, {{"adv_d", bundle.adv_d}, {"cls_c", bundle.cls_c},
                               {"total_dc", bundle.total_dc}});
    state->critic_opt->ZeroGrad();
    Backward(total_dc);
    state->critic_opt->Step();
  }
  if (audit) audit->gen_after_critic_phase = HashParams(gen_params);

  // Phase 2: G, F, E, with D and C frozen.
  SetTrainable(critic_params, false);
  SetTrainable(gen_params, true);
  if (audit) audit->critic_before_gen_phase = HashParams(critic_params);
  {
    GeneratorTerms terms;
    Var y1;
    if (gazev) {
      Var s1 = m.prior().Forward(z1, uy);
      Var s2 = m.prior().Forward(z2, uy);
      Var sx = m.encoder().Forward(x, ux);
      y1 = m.generator().Forward(x, s1);
      Var y2 = m.generator().Forward(x, s2);
      terms.cyc = CycLoss(x, m.generator().Forward(y1, sx));
      terms.id = IdLoss(x, m.generator().Forward(x, sx));
      SpeakerLossTerms spk = SpkLoss(y1, y2, m.encoder().Forward(y1, uy), s1,
                                     &batch.z1, &batch.z2);
      terms.spk_match = spk.match;
      terms.spk_div = spk.div;
    } else {
      y1 = m.generator().Forward(x, cond_tgt);
      terms.cyc = CycLoss(x, m.generator().Forward(y1, cond_src));
      terms.id = IdLoss(x, m.generator().Forward(x, cond_src));
    }
    terms.adv_g = GeneratorAdvLoss(m.discriminator().Score(y1, cond_tgt),
                                   weights.saturating_adv);
    terms.cls_g = ClsLossFake(m.discriminator().Classify(y1), label_tgt);
    Var total_g = TotalGLoss(terms, weights);
    bundle.adv_g = ScalarValue(terms.adv_g);
    bundle.cls_g = ScalarValue(terms.cls_g);
    bundle.cyc = ScalarValue(terms.cyc);
    bundle.id = ScalarValue(terms.id);
    if (terms.spk_match) bundle.spk_match = ScalarValue(terms.spk_match);
    if (terms.spk_div) bundle.spk_div = ScalarValue(terms.spk_div);
    bundle.total_g = ScalarValue(total_g);
    CheckFinite(bundle, step,
                {{"adv_g", bundle.adv_g}, {"cls_g", bundle.cls_g},
                 {"cyc", bundle.cyc}, {"id", bundle.id},
                 {"spk_match", bundle.spk_match}, {"spk_div", bundle.spk_div},
                 {"total_g", bundle.total_g}});
    state->gen_opt->ZeroGrad();
    Backward(total_g);
    state->gen_opt->Step();
  }
  if (audit) audit->critic_after = HashParams(critic_params);
  SetTrainable(critic_params, true);
  state->step = step;
  return bundle;
}

// ---------------------------------------------------------------------------
// Checkpoints.

namespace {

constexpr char kCheckpointMagic[8] = {'G', 'Z', 'V', 'C', 'K', 'P', 'T', '\0'};

void PutTensor(BinaryWriter *w, const Tensor &t) {
  const Shape &s = t.shape();
  for (int d : {s.n, s.c, s.h, s.w}) w->Put<std::int32_t>(d);
  w->PutVector(std::vector<BaseFloat>(t.data(), t.data() + t.size()));
}

Tensor GetTensor(BinaryReader *r) {
  Shape s;
  s.n = r->Get<std::int32_t>();
  s.c = r->Get<std::int32_t>();
  s.h = r->Get<std::int32_t>();
  s.w = r->Get<std::int32_t>();
  auto data = r->GetVector<BaseFloat>();
  if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0 || data.size() != s.Size())
    GAZEV_ERR << "Corrupt tensor in checkpoint";
  Tensor t(s);
  std::copy(data.begin(), data.end(), t.data());
  return t;
}

void PutOptimizer(BinaryWriter *w, const Adam &opt) {
  w->Put<std::int64_t>(opt.step_count());
  w->Put<std::uint32_t>(static_cast<std::uint32_t>(opt.first_moments().size()));
  for (std::size_t i = 0; i < opt.first_moments().size(); ++i) {
    PutTensor(w, opt.first_moments()[i]);
    PutTensor(w, opt.second_moments()[i]);
  }
}

void GetOptimizer(BinaryReader *r, Adam *opt) {
  auto steps = r->Get<std::int64_t>();
  auto count = r->Get<std::uint32_t>();
  std::vector<Tensor> m, v;
  for (std::uint32_t i = 0; i < count; ++i) {
    m.push_back(GetTensor(r));
    v.push_back(GetTensor(r));
  }
  opt->Restore(steps, std::move(m), std::move(v));
}

std::string SpeakersToJson(const SpeakerTable &t) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < t.size(); ++i)
    j.push_back({{"id", t.ids[i]}, {"gender", GenderName(t.genders[i])}});
  return j.dump();
}

SpeakerTable SpeakersFromJson(const std::string &s) {
  SpeakerTable t;
  for (const auto &e : nlohmann::json::parse(s)) {
    t.ids.push_back(e.at("id").get<std::string>());
    t.genders.push_back(ParseGender(e.at("gender").get<std::string>()));
  }
  return t;
}

}  // namespace

void SaveCheckpoint(const TrainState &state, const std::string &path) {
  BinaryWriter w;
  for (char c : kCheckpointMagic) w.Put(c);
  w.Put<std::uint32_t>(kCheckpointVersion);
  w.Put<std::uint32_t>(sizeof(BaseFloat));
  w.PutString(ModeName(state.net.mode));
  w.PutString(state.net.ToJson());
  w.Put<double>(state.adam.learning_rate);
  w.Put<double>(state.adam.beta1);
  w.Put<double>(state.adam.beta2);
  w.Put<double>(state.adam.epsilon);
  w.Put<std::int64_t>(state.step);
  auto params = state.model->AllParams();
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (const NamedParam &p : params) {
    w.PutString(p.name);
    PutTensor(&w, p.var->value);
  }
  PutOptimizer(&w, *state.gen_opt);
  PutOptimizer(&w, *state.critic_opt);
  std::ostringstream rng;
  rng << state.rng;
  w.PutString(rng.str());
  w.PutString(state.stats.ToJson());
  w.PutString(SpeakersToJson(state.speakers));
  std::string bytes = w.buffer();
  std::uint64_t sum = Fnv1a64(bytes);
  bytes.append(reinterpret_cast<const char *>(&sum), sizeof(sum));
  WriteFileAtomic(path, bytes);
}

TrainState LoadCheckpoint(const std::string &path,
                          const ConditioningMode *expected_mode) {
  std::string bytes = ReadFileBytes(path);
  const std::size_t header = sizeof(kCheckpointMagic) + 4;
  if (bytes.size() < header + 8 ||
      bytes.compare(0, sizeof(kCheckpointMagic), kCheckpointMagic,
                    sizeof(kCheckpointMagic)) != 0)
    GAZEV_ERR << path << ": not a checkpoint file";
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + sizeof(kCheckpointMagic), 4);
  if (version != kCheckpointVersion)
    GAZEV_ERR << path << ": checkpoint format version " << version
              << ", this build reads version " << kCheckpointVersion;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (Fnv1a64(bytes.data(), bytes.size() - 8) != stored)
    GAZEV_ERR << path << ": checksum mismatch (corrupted checkpoint)";

  BinaryReader r(bytes.data() + header, bytes.size() - header - 8, path);
  auto float_size = r.Get<std::uint32_t>();
  if (float_size != sizeof(BaseFloat))
    GAZEV_ERR << path << ": stored with " << 8 * float_size
              << "-bit parameters, this build uses " << 8 * sizeof(BaseFloat);
  ConditioningMode mode = ParseMode(r.GetString());
  if (expected_mode && mode != *expected_mode)
    GAZEV_ERR << path << ": checkpoint mode is " << ModeName(mode)
              << " but this run uses " << ModeName(*expected_mode);
  NetConfig net = NetConfig::FromJson(r.GetString());
  if (net.mode != mode) GAZEV_ERR << path << ": inconsistent mode tags";
  AdamOptions adam;
  adam.learning_rate = r.Get<double>();
  adam.beta1 = r.Get<double>();
  adam.beta2 = r.Get<double>();
  adam.epsilon = r.Get<double>();
  TrainState state = TrainState::Fresh(net, adam, 0);
  state.step = r.Get<std::int64_t>();
  auto params = state.model->AllParams();
  auto count = r.Get<std::uint32_t>();
  if (count != params.size())
    GAZEV_ERR << path << ": " << count << " parameter blocks, model has "
              << params.size();
  for (const NamedParam &p : params) {
    std::string name = r.GetString();
    Tensor t = GetTensor(&r);
    if (name != p.name || !(t.shape() == p.var->value.shape()))
      GAZEV_ERR << path << ": parameter " << name << " " << t.shape().ToString()
                << " does not match " << p.name << " "
                << p.var->value.shape().ToString();
    p.var->value = std::move(t);
  }
  GetOptimizer(&r, state.gen_opt.get());
  GetOptimizer(&r, state.critic_opt.get());
  std::istringstream rng(r.GetString());
  rng >> state.rng;
  if (!rng) GAZEV_ERR << path << ": bad RNG state";
  state.stats = CorpusStats::FromJson(r.GetString());
  try {
    state.speakers = SpeakersFromJson(r.GetString());
  } catch (const nlohmann::json::exception &e) {
    GAZEV_ERR << path << ": bad speaker table: " << e.what();
  }
  if (!r.AtEnd()) GAZEV_ERR << path << ": trailing data";
  return state;
}

namespace {
bool TensorsEqual(const Tensor &a, const Tensor &b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(BaseFloat)) == 0;
}
bool OptimizersEqual(const Adam &a, const Adam &b) {
  if (a.step_count() != b.step_count() ||
      a.first_moments().size() != b.first_moments().size())
    return false;
  for (std::size_t i = 0; i < a.first_moments().size(); ++i)
    if (!TensorsEqual(a.first_moments()[i], b.first_moments()[i]) ||
        !TensorsEqual(a.second_moments()[i], b.second_moments()[i]))
      return false;
  return true;
}
}  // namespace

bool StatesEqual(const TrainState &a, const TrainState &b) {
  if (!(a.net == b.net) || a.step != b.step || a.rng != b.rng ||
      !(a.stats == b.stats) || !(a.speakers == b.speakers) ||
      a.adam.learning_rate != b.adam.learning_rate ||
      a.adam.beta1 != b.adam.beta1 || a.adam.beta2 != b.adam.beta2 ||
      a.adam.epsilon != b.adam.epsilon)
    return false;
  auto pa = a.model->AllParams(), pb = b.model->AllParams();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i].name != pb[i].name || !TensorsEqual(pa[i].var->value, pb[i].var->value))
      return false;
  return OptimizersEqual(*a.gen_opt, *b.gen_opt) &&
         OptimizersEqual(*a.critic_opt, *b.critic_opt);
}

std::string CheckpointPath(const std::string &out_dir, std::int64_t step) {
  char name[64];
  std::snprintf(name, sizeof(name), "ckpt-%08" PRId64 ".bin", step);
  return (fs::path(out_dir) / name).string();
}

std::string LatestCheckpoint(const std::string &out_dir) {
  if (!fs::is_directory(out_dir)) return {};
  std::string best;
  for (const auto &e : fs::directory_iterator(out_dir)) {
    std::string name = e.path().filename().string();
    if (name.rfind("ckpt-", 0) == 0 && e.path().extension() == ".bin" &&
        e.path().string() > best)
      best = e.path().string();
  }
  return best;
}

// ---------------------------------------------------------------------------
// Metrics and the training loop.

std::string MetricsHeader() {
  std::string h = "step";
  for (const std::string &n : LossColumnNames()) h += "," + n;
  return h;
}

std::string MetricsRow(std::int64_t step, const LossBundle &bundle) {
  std::string row = std::to_string(step);
  char buf[32];
  for (double v : LossColumns(bundle)) {
    std::snprintf(buf, sizeof(buf), ",%.9g", v);
    row += buf;
  }
  return row;
}

void TruncateMetrics(const std::string &path, std::int64_t step) {
  std::ifstream in(path);
  std::string out = MetricsHeader() + "\n";
  if (in) {
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        continue;
      }
      if (line.empty()) continue;
      if (std::stoll(line.substr(0, line.find(','))) <= step) out += line + "\n";
    }
  }
  WriteFileAtomic(path, out);
}

TrainResult Train(const TrainConfig &config, const TrainingData &data,
                  TrainState *state, const std::string &manifest_json) {
  config.Check();
  fs::create_directories(config.out_dir);
  TrainResult result;
  result.metrics_path = (fs::path(config.out_dir) / "metrics.csv").string();
  if (state->step == 0)
    WriteFileAtomic(result.metrics_path, MetricsHeader() + "\n");
  else
    TruncateMetrics(result.metrics_path, state->step);
  if (!manifest_json.empty())
    WriteFileAtomic((fs::path(config.out_dir) / "run_manifest.json").string(),
                    manifest_json);

  std::ofstream metrics(result.metrics_path, std::ios::app);
  if (!metrics) GAZEV_ERR << "Cannot append to " << result.metrics_path;
  auto start = std::chrono::steady_clock::now();
  const std::int64_t first = state->step;
  while (state->step < config.total_steps) {
    Batch batch = SampleBatch(data, state->speakers, state->net,
                              config.batch_size, &state->rng);
    const std::int64_t step = state->step + 1;
    PartitionAudit audit;
    bool audited = config.audit_every > 0 && step % config.audit_every == 0;
    LossBundle bundle;
    try {
      bundle = TrainStep(state, batch, config.weights, audited ? &audit : nullptr);
    } catch (const GazevError &e) {
      GAZEV_ERR << "Training aborted at step " << step << ": " << e.what();
    }
    if (audited && !audit.Ok())
      GAZEV_ERR << "Update partition violated at step " << step;
    if (step % config.log_every == 0) {
      metrics << MetricsRow(step, bundle) << "\n";
      metrics.flush();
      if (!metrics) GAZEV_ERR << "Write failed for " << result.metrics_path;
    }
    if (step % config.checkpoint_every == 0 || step == config.total_steps) {
      result.final_checkpoint = CheckpointPath(config.out_dir, step);
      SaveCheckpoint(*state, result.final_checkpoint);
    }
    if (step % 50 == 0 || step == config.total_steps) {
      double secs = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start).count();
      GAZEV_LOG << "step " << step << "/" << config.total_steps
                << " total_g=" << bundle.total_g << " total_dc=" << bundle.total_dc
                << " id=" << bundle.id << " ("
                << secs / static_cast<double>(step - first) << " s/step)";
    }
  }
  if (result.final_checkpoint.empty())
    result.final_checkpoint = CheckpointPath(config.out_dir, state->step);
  return result;
}

}  // namespace gazev
