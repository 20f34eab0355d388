// nets.cc

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

#include "gazev/nets.h"

#include <cmath>

#include "json.hpp"

namespace gazev {

std::string ModeName(ConditioningMode mode) {
  return mode == ConditioningMode::kGazev ? "gazev" : "stargan_baseline";
}

ConditioningMode ParseMode(const std::string &name) {
  if (name == "gazev") return ConditioningMode::kGazev;
  if (name == "stargan_baseline") return ConditioningMode::kStarGanBaseline;
  GAZEV_ERR << "Unknown mode '" << name
            << "' (expected gazev or stargan_baseline)";
  return ConditioningMode::kGazev;
}

int NetConfig::CondDim() const {
  return mode == ConditioningMode::kGazev ? 2 : num_speakers;
}

int NetConfig::NumClasses() const { return CondDim(); }

void NetConfig::Check() const {
  if (mcc_dim % 4 != 0 || num_frames % 4 != 0)
    GAZEV_ERR << "Segment " << mcc_dim << "x" << num_frames
              << " does not halve exactly twice";
  if (gen_channels < 1 || dis_channels < 1 || enc_channels < 1 ||
      prior_hidden < 1 || embed_dim < 1 || prior_dim < 1)
    GAZEV_ERR << "Network widths must be positive";
  if (dis_blocks < 1 || prior_layers < 1 || enc_blocks < 1)
    GAZEV_ERR << "Network depths must be positive";
  if (mode == ConditioningMode::kStarGanBaseline && num_speakers < 2)
    GAZEV_ERR << "Baseline mode needs num_speakers >= 2, got " << num_speakers;
  if (norm_eps <= 0) GAZEV_ERR << "norm_eps must be positive";
}

std::string NetConfig::ToJson() const {
  nlohmann::json j;
  j["mode"] = ModeName(mode);
  j["num_speakers"] = num_speakers;
  j["mcc_dim"] = mcc_dim;
  j["num_frames"] = num_frames;
  j["gen_channels"] = gen_channels;
  j["gen_down_kernel"] = {gen_down_kernel_h, gen_down_kernel_w};
  j["gen_res_kernel"] = gen_res_kernel;
  j["gen_plain_blocks"] = gen_plain_blocks;
  j["gen_adain_blocks"] = gen_adain_blocks;
  j["gen_up_kernel"] = {gen_up_kernel_h, gen_up_kernel_w};
  j["gen_out_kernel"] = gen_out_kernel;
  j["dis_channels"] = dis_channels;
  j["dis_blocks"] = dis_blocks;
  j["dis_kernel"] = dis_kernel;
  j["dis_head_kernel"] = dis_head_kernel;
  j["prior_dim"] = prior_dim;
  j["embed_dim"] = embed_dim;
  j["prior_hidden"] = prior_hidden;
  j["prior_layers"] = prior_layers;
  j["enc_channels"] = enc_channels;
  j["enc_blocks"] = enc_blocks;
  j["enc_kernel"] = enc_kernel;
  j["norm_eps"] = norm_eps;
  j["leaky_slope"] = leaky_slope;
  return j.dump();
}

NetConfig NetConfig::FromJson(const std::string &json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const std::exception &e) {
    GAZEV_ERR << "Bad NetConfig json: " << e.what();
  }
  NetConfig c;
  try {
    c.mode = ParseMode(j.at("mode").get<std::string>());
    c.num_speakers = j.at("num_speakers");
    c.mcc_dim = j.at("mcc_dim");
    c.num_frames = j.at("num_frames");
    c.gen_channels = j.at("gen_channels");
    c.gen_down_kernel_h = j.at("gen_down_kernel").at(0);
    c.gen_down_kernel_w = j.at("gen_down_kernel").at(1);
    c.gen_res_kernel = j.at("gen_res_kernel");
    c.gen_plain_blocks = j.at("gen_plain_blocks");
    c.gen_adain_blocks = j.at("gen_adain_blocks");
    c.gen_up_kernel_h = j.at("gen_up_kernel").at(0);
    c.gen_up_kernel_w = j.at("gen_up_kernel").at(1);
    c.gen_out_kernel = j.at("gen_out_kernel");
    c.dis_channels = j.at("dis_channels");
    c.dis_blocks = j.at("dis_blocks");
    c.dis_kernel = j.at("dis_kernel");
    c.dis_head_kernel = j.at("dis_head_kernel");
    c.prior_dim = j.at("prior_dim");
    c.embed_dim = j.at("embed_dim");
    c.prior_hidden = j.at("prior_hidden");
    c.prior_layers = j.at("prior_layers");
    c.enc_channels = j.at("enc_channels");
    c.enc_blocks = j.at("enc_blocks");
    c.enc_kernel = j.at("enc_kernel");
    c.norm_eps = j.at("norm_eps");
    c.leaky_slope = j.at("leaky_slope");
  } catch (const nlohmann::json::exception &e) {
    GAZEV_ERR << "Incomplete NetConfig json: " << e.what();
  }
  return c;
}

void Network::SetTrainable(bool trainable) {
  for (auto &p : params_) p.var->requires_grad = trainable;
}

std::size_t Network::NumParameters() const {
  std::size_t total = 0;
  for (const auto &p : params_) total += p.var->value.size();
  return total;
}

Var Network::AddParam(const std::string &name, Tensor value) {
  Var v = MakeParameter(std::move(value));
  params_.push_back({name, v});
  return v;
}

Var Network::AddUniform(const std::string &name, const Shape &shape,
                        int fan_in, std::mt19937_64 *rng) {
  Tensor t(shape);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<BaseFloat>(dist(*rng));
  return AddParam(name, std::move(t));
}

Var ApplyAdain(const Var &x, const Var &embedding, const AdainLayer &layer,
               BaseFloat eps) {
  Var scale = layer.scale_map.Apply(embedding);
  Var shift = layer.shift_map.Apply(embedding);
  return ChannelAffine(InstanceNorm(x, eps), scale, shift);
}

Tensor OneHot(const std::vector<int> &labels, int classes) {
  Tensor t(static_cast<int>(labels.size()), classes, 1, 1);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] < 0 || labels[n] >= classes)
      GAZEV_ERR << "Label " << labels[n] << " outside [0, " << classes << ")";
    t[n * classes + labels[n]] = 1;
  }
  return t;
}

void CheckSegmentShape(const Tensor &x, const NetConfig &config,
                       const char *stage) {
  if (x.c() != 1 || x.h() != config.mcc_dim || x.w() != config.num_frames ||
      x.n() < 1)
    GAZEV_ERR << stage << ": expected N x 1 x " << config.mcc_dim << " x "
              << config.num_frames << ", got " << x.shape().ToString();
}

namespace {

void CheckCode(const Tensor &code, int batch, int dim, const char *stage) {
  if (code.n() != batch || code.c() != dim || code.h() * code.w() != 1)
    GAZEV_ERR << stage << ": expected conditioning " << batch << " x " << dim
              << " x 1 x 1, got " << code.shape().ToString();
}

void ExpectShape(const Tensor &t, const Shape &expected, const char *stage) {
  if (!(t.shape() == expected))
    GAZEV_ERR << stage << ": produced " << t.shape().ToString()
              << ", expected " << expected.ToString();
}

}  // namespace

// ---------------------------------------------------------------- Generator

Generator::Generator(const NetConfig &config, std::mt19937_64 *rng)
    : config_(config) {
  config_.Check();
  const int c = config.gen_channels;
  const int kh = config.gen_down_kernel_h, kw = config.gen_down_kernel_w;
  const int in_channels =
      config.mode == ConditioningMode::kGazev ? 1 : 1 + config.num_speakers;
  entry_ = MakeConvNorm("gen.entry", in_channels, c, kh, kw, 1, rng);
  down1_ = MakeConvNorm("gen.down1", c, 2 * c, kh, kw, 2, rng);
  down2_ = MakeConvNorm("gen.down2", 2 * c, 4 * c, kh, kw, 2, rng);
  const int width = 4 * c, k = config.gen_res_kernel;
  const int total = config.gen_plain_blocks + config.gen_adain_blocks;
  for (int b = 0; b < total; ++b) {
    ResBlock block;
    block.adaptive = b >= config.gen_plain_blocks &&
                     config.mode == ConditioningMode::kGazev;
    const std::string name =
        "gen." + std::string(b < config.gen_plain_blocks ? "res" : "adain_res") +
        std::to_string(b);
    block.conv1.weight =
        AddUniform(name + ".conv1.weight", {width, width, k, k}, width * k * k, rng);
    block.conv1.geom = ConvGeometry::Same(k, k, 1, 1);
    block.conv2.weight =
        AddUniform(name + ".conv2.weight", {width, width, k, k}, width * k * k, rng);
    block.conv2.geom = ConvGeometry::Same(k, k, 1, 1);
    if (block.adaptive) {
      block.adain1 = MakeAdain(name + ".adain1", width, rng);
      block.adain2 = MakeAdain(name + ".adain2", width, rng);
    } else {
      block.norm1 = MakeNorm(name + ".norm1", width);
      block.norm2 = MakeNorm(name + ".norm2", width);
    }
    blocks_.push_back(block);
  }
  const int uh = config.gen_up_kernel_h, uw = config.gen_up_kernel_w;
  up1_ = MakeConvNorm("gen.up1", 4 * c, 2 * c, uh, uw, 1, rng);
  up2_ = MakeConvNorm("gen.up2", 2 * c, c, uh, uw, 1, rng);
  const int ok = config.gen_out_kernel;
  out_.weight = AddUniform("gen.out.weight", {1, c, ok, ok}, c * ok * ok, rng);
  out_.bias = AddUniform("gen.out.bias", {1, 1, 1, 1}, c * ok * ok, rng);
  out_.geom = ConvGeometry::Same(ok, ok, 1, 1);
}

Generator::ConvNormBlock Generator::MakeConvNorm(const std::string &name,
                                                 int in, int out, int kh,
                                                 int kw, int stride,
                                                 std::mt19937_64 *rng) {
  ConvNormBlock block;
  // No conv bias: the following normalisation removes it.
  block.conv.weight =
      AddUniform(name + ".conv.weight", {out, in, kh, kw}, in * kh * kw, rng);
  block.conv.geom = ConvGeometry::Same(kh, kw, stride, stride);
  block.norm = MakeNorm(name + ".norm", out);
  return block;
}

NormLayer Generator::MakeNorm(const std::string &name, int channels) {
  NormLayer norm;
  norm.gamma = AddParam(name + ".gamma", Tensor(1, channels, 1, 1, 1));
  norm.beta = AddParam(name + ".beta", Tensor(1, channels, 1, 1, 0));
  return norm;
}

AdainLayer Generator::MakeAdain(const std::string &name, int channels,
                                std::mt19937_64 *rng) {
  const int e = config_.embed_dim;
  AdainLayer layer;
  layer.scale_map.weight =
      AddUniform(name + ".scale.weight", {channels, e, 1, 1}, e, rng);
  layer.scale_map.bias = AddParam(name + ".scale.bias", Tensor(1, channels, 1, 1, 1));
  layer.shift_map.weight =
      AddUniform(name + ".shift.weight", {channels, e, 1, 1}, e, rng);
  layer.shift_map.bias = AddParam(name + ".shift.bias", Tensor(1, channels, 1, 1, 0));
  return layer;
}

Var Generator::ApplyNorm(const Var &x, const NormLayer &norm) const {
  return ChannelAffine(InstanceNorm(x, config_.norm_eps), norm.gamma, norm.beta);
}

Var Generator::ApplyConvNorm(const Var &x, const ConvNormBlock &block) const {
  return Relu(ApplyNorm(block.conv.Apply(x), block.norm));
}

Var Generator::Forward(const Var &x, const Var &cond,
                       GeneratorProbe *probe) const {
  CheckSegmentShape(x->value, config_, "generator input");
  const int batch = x->value.n(), c = config_.gen_channels;
  const int h = config_.mcc_dim, w = config_.num_frames;
  Var hidden = x;
  if (config_.mode == ConditioningMode::kGazev) {
    CheckCode(cond->value, batch, config_.embed_dim, "generator embedding");
  } else {
    CheckCode(cond->value, batch, config_.num_speakers, "generator speaker code");
    hidden = ConcatCode(x, cond);
  }
  hidden = ApplyConvNorm(hidden, entry_);
  ExpectShape(hidden->value, {batch, c, h, w}, "generator entry");
  if (probe) probe->entry = hidden->value.shape();
  hidden = ApplyConvNorm(hidden, down1_);
  ExpectShape(hidden->value, {batch, 2 * c, h / 2, w / 2}, "generator down1");
  if (probe) probe->down1 = hidden->value.shape();
  hidden = ApplyConvNorm(hidden, down2_);
  ExpectShape(hidden->value, {batch, 4 * c, h / 4, w / 4}, "generator down2");
  if (probe) probe->bottleneck = hidden->value.shape();

  for (const ResBlock &block : blocks_) {
    Var r = block.conv1.Apply(hidden);
    r = block.adaptive ? ApplyAdain(r, cond, block.adain1, config_.norm_eps)
                       : ApplyNorm(r, block.norm1);
    r = block.conv2.Apply(Relu(r));
    r = block.adaptive ? ApplyAdain(r, cond, block.adain2, config_.norm_eps)
                       : ApplyNorm(r, block.norm2);
    hidden = Add(hidden, r);
  }

  hidden = ApplyConvNorm(UpsampleNearest2x(hidden), up1_);
  ExpectShape(hidden->value, {batch, 2 * c, h / 2, w / 2}, "generator up1");
  if (probe) probe->up1 = hidden->value.shape();
  hidden = ApplyConvNorm(UpsampleNearest2x(hidden), up2_);
  ExpectShape(hidden->value, {batch, c, h, w}, "generator up2");
  Var y = out_.Apply(hidden);
  ExpectShape(y->value, {batch, 1, h, w}, "generator output");
  if (probe) probe->output = y->value.shape();
  return y;
}

std::vector<Var> Generator::AdainWeights() const {
  std::vector<Var> out;
  for (const ResBlock &b : blocks_) {
    if (!b.adaptive) continue;
    for (const AdainLayer *l : {&b.adain1, &b.adain2}) {
      out.push_back(l->scale_map.weight);
      out.push_back(l->shift_map.weight);
    }
  }
  return out;
}

// ------------------------------------------------------- PatchDiscriminator

PatchDiscriminator::PatchDiscriminator(const NetConfig &config,
                                       std::mt19937_64 *rng)
    : config_(config) {
  config_.Check();
  const int k = config.dis_kernel;
  int in = 1 + config.CondDim();
  int out = config.dis_channels;
  for (int b = 0; b < config.dis_blocks; ++b) {
    ConvLayer layer;
    const std::string name = "dis.block" + std::to_string(b);
    layer.weight = AddUniform(name + ".weight", {out, in, k, k}, in * k * k, rng);
    layer.bias = AddUniform(name + ".bias", {1, out, 1, 1}, in * k * k, rng);
    layer.geom = ConvGeometry::Same(k, k, 2, 2);
    trunk_.push_back(layer);
    in = out;
    out *= 2;
  }
  const int hk = config.dis_head_kernel;
  score_head_.weight =
      AddUniform("dis.score_head.weight", {1, in, hk, hk}, in * hk * hk, rng);
  score_head_.bias =
      AddUniform("dis.score_head.bias", {1, 1, 1, 1}, in * hk * hk, rng);
  score_head_.geom = ConvGeometry::Same(hk, hk, 1, 1);
  const int classes = config.NumClasses();
  class_head_.weight =
      AddUniform("cls.head.weight", {classes, in, 1, 1}, in, rng);
  class_head_.bias = AddUniform("cls.head.bias", {1, classes, 1, 1}, in, rng);
}

Var PatchDiscriminator::Trunk(const Var &x, const Var &cond) const {
  Var hidden = ConcatCode(x, cond);
  for (const ConvLayer &layer : trunk_)
    hidden = LeakyRelu(layer.Apply(hidden), config_.leaky_slope);
  return hidden;
}

Var PatchDiscriminator::Score(const Var &x, const Var &cond) const {
  CheckSegmentShape(x->value, config_, "discriminator input");
  CheckCode(cond->value, x->value.n(), config_.CondDim(),
            "discriminator conditioning");
  return score_head_.Apply(Trunk(x, cond));
}

Var PatchDiscriminator::Classify(const Var &x) const {
  CheckSegmentShape(x->value, config_, "classifier input");
  Var zeros = MakeConstant(Tensor(x->value.n(), config_.CondDim(), 1, 1));
  return class_head_.Apply(GlobalAvgPool(Trunk(x, zeros)));
}

// ------------------------------------------------------------ PriorEmbedder

PriorEmbedder::PriorEmbedder(const NetConfig &config, std::mt19937_64 *rng) {
  int in = config.prior_dim + 2;
  for (int l = 0; l < config.prior_layers; ++l) {
    const std::string name = "prior.fc" + std::to_string(l);
    LinearLayer layer;
    layer.weight =
        AddUniform(name + ".weight", {config.prior_hidden, in, 1, 1}, in, rng);
    layer.bias = AddUniform(name + ".bias", {1, config.prior_hidden, 1, 1}, in, rng);
    hidden_.push_back(layer);
    in = config.prior_hidden;
  }
  head_.weight = AddUniform("prior.head.weight", {config.embed_dim, in, 1, 1}, in, rng);
  head_.bias = AddUniform("prior.head.bias", {1, config.embed_dim, 1, 1}, in, rng);
}

Var PriorEmbedder::Forward(const Var &z, const Var &gender) const {
  if (gender->value.c() != 2 || gender->value.n() != z->value.n())
    GAZEV_ERR << "prior embedder: gender code " << gender->value.shape().ToString()
              << " for prior " << z->value.shape().ToString();
  Var hidden = ConcatCode(z, gender);
  for (const LinearLayer &layer : hidden_) hidden = Relu(layer.Apply(hidden));
  return head_.Apply(hidden);
}

// --------------------------------------------------------- UtteranceEncoder

UtteranceEncoder::UtteranceEncoder(const NetConfig &config,
                                   std::mt19937_64 *rng)
    : config_(config) {
  const int c = config.enc_channels, k = config.enc_kernel;
  stem_.weight = AddUniform("enc.stem.weight", {c, 3, k, k}, 3 * k * k, rng);
  stem_.bias = AddUniform("enc.stem.bias", {1, c, 1, 1}, 3 * k * k, rng);
  stem_.geom = ConvGeometry::Same(k, k, 1, 1);
  for (int b = 0; b < config.enc_blocks; ++b) {
    const std::string name = "enc.block" + std::to_string(b);
    PreActBlock block;
    for (auto [layer, tag] : {std::pair{&block.conv1, ".conv1"},
                              std::pair{&block.conv2, ".conv2"}}) {
      layer->weight = AddUniform(name + tag + ".weight", {c, c, k, k}, c * k * k, rng);
      layer->bias = AddUniform(name + tag + ".bias", {1, c, 1, 1}, c * k * k, rng);
      layer->geom = ConvGeometry::Same(k, k, 1, 1);
    }
    blocks_.push_back(block);
  }
  head_.weight = AddUniform("enc.head.weight", {config.embed_dim, c, 1, 1}, c, rng);
  head_.bias = AddUniform("enc.head.bias", {1, config.embed_dim, 1, 1}, c, rng);
}

Var UtteranceEncoder::Forward(const Var &x, const Var &gender) const {
  CheckSegmentShape(x->value, config_, "encoder input");
  CheckCode(gender->value, x->value.n(), 2, "encoder gender code");
  const BaseFloat slope = config_.leaky_slope;
  Var hidden = stem_.Apply(ConcatCode(x, gender));
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    Var r = blocks_[b].conv1.Apply(LeakyRelu(hidden, slope));
    r = blocks_[b].conv2.Apply(LeakyRelu(r, slope));
    hidden = Add(hidden, r);
    // Spatial reduction after the second and fourth blocks.
    if (b == 1 || b == 3) hidden = AvgPool2x2(hidden);
  }
  return head_.Apply(GlobalAvgPool(LeakyRelu(hidden, slope)));
}

// ------------------------------------------------------------------ VcModel

VcModel::VcModel(const NetConfig &config, std::uint64_t seed)
    : config_(config) {
  config_.Check();
  std::mt19937_64 rng(seed);
  generator_ = std::make_unique<Generator>(config_, &rng);
  discriminator_ = std::make_unique<PatchDiscriminator>(config_, &rng);
  if (config_.mode == ConditioningMode::kGazev) {
    prior_ = std::make_unique<PriorEmbedder>(config_, &rng);
    encoder_ = std::make_unique<UtteranceEncoder>(config_, &rng);
  }
}

const PriorEmbedder &VcModel::prior() const {
  if (!prior_) GAZEV_ERR << "Model F is not part of a baseline-mode model";
  return *prior_;
}

const UtteranceEncoder &VcModel::encoder() const {
  if (!encoder_) GAZEV_ERR << "Model E is not part of a baseline-mode model";
  return *encoder_;
}

std::vector<NamedParam> VcModel::GeneratorSideParams() const {
  std::vector<NamedParam> out = generator_->params();
  if (prior_) out.insert(out.end(), prior_->params().begin(), prior_->params().end());
  if (encoder_)
    out.insert(out.end(), encoder_->params().begin(), encoder_->params().end());
  return out;
}

std::vector<NamedParam> VcModel::CriticSideParams() const {
  return discriminator_->params();
}

std::vector<NamedParam> VcModel::AllParams() const {
  std::vector<NamedParam> out = GeneratorSideParams();
  auto critic = CriticSideParams();
  out.insert(out.end(), critic.begin(), critic.end());
  return out;
}

}  // namespace gazev
