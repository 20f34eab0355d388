// tests/nets-test.cc

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
#include <random>

#include "gazev/autograd.h"
#include "gazev/losses.h"
#include "gazev/nets.h"

namespace gazev {
namespace {

Tensor RandomTensor(const Shape &shape, std::mt19937_64 *rng, double scale = 1) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<BaseFloat>(normal(*rng));
  return t;
}

NetConfig Narrow() {
  NetConfig c;
  c.gen_channels = 4;
  c.dis_channels = 4;
  c.enc_channels = 4;
  c.prior_hidden = 16;
  return c;
}

TEST(NetConfig, FullWidthDefaults) {
  NetConfig c;
  EXPECT_EQ(c.mcc_dim, 36);
  EXPECT_EQ(c.num_frames, 256);
  EXPECT_EQ(c.gen_channels, 64);
  EXPECT_EQ(c.BottleneckChannels(), 256);
  EXPECT_EQ(c.gen_plain_blocks + c.gen_adain_blocks, 6);
  EXPECT_EQ(c.dis_channels, 64);
  EXPECT_EQ(c.dis_blocks, 5);
  EXPECT_EQ(c.prior_dim, 16);
  EXPECT_EQ(c.embed_dim, 64);
  EXPECT_EQ(c.prior_hidden, 512);
  EXPECT_EQ(c.prior_layers, 5);
  EXPECT_EQ(c.enc_channels, 32);
  EXPECT_EQ(c.enc_blocks, 5);
  EXPECT_FLOAT_EQ(c.norm_eps, 1e-5f);
  EXPECT_NO_THROW(c.Check());
}

TEST(NetConfig, RejectsGeometryThatCannotRoundTrip) {
  NetConfig c;
  c.mcc_dim = 35;
  EXPECT_THROW(c.Check(), GazevError);
  c = NetConfig();
  c.num_frames = 250;
  EXPECT_THROW(c.Check(), GazevError);
}

TEST(NetConfig, JsonRoundTrip) {
  NetConfig c = Narrow();
  c.mode = ConditioningMode::kStarGanBaseline;
  c.num_speakers = 6;
  EXPECT_EQ(NetConfig::FromJson(c.ToJson()), c);
  EXPECT_EQ(c.NumClasses(), 6);
  EXPECT_EQ(c.CondDim(), 6);
  EXPECT_EQ(NetConfig().NumClasses(), 2);
}

TEST(Generator, ShapesAtFullWidth) {
  NetConfig c;
  VcModel m(c, 3);
  std::mt19937_64 rng(1);
  GeneratorProbe probe;
  Var y = m.generator().Forward(MakeInput(RandomTensor({1, 1, 36, 256}, &rng)),
                                MakeConstant(RandomTensor({1, 64, 1, 1}, &rng)),
                                &probe);
  EXPECT_EQ(y->value.shape(), (Shape{1, 1, 36, 256}));
  EXPECT_EQ(probe.bottleneck, (Shape{1, 256, 9, 64}));
  EXPECT_EQ(probe.down1, (Shape{1, 128, 18, 128}));
  EXPECT_EQ(probe.up1, (Shape{1, 128, 18, 128}));
}

TEST(Generator, ShapeMismatchNamesStage) {
  VcModel m(Narrow(), 3);
  try {
    m.generator().Forward(MakeInput(Tensor(1, 1, 36, 128)),
                          MakeConstant(Tensor(1, 64, 1, 1)));
    FAIL() << "expected an error";
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("generator"), std::string::npos) << e.what();
  }
}

TEST(Generator, DifferentEmbeddingsGiveDifferentOutputs) {
  VcModel m(Narrow(), 5);
  std::mt19937_64 rng(2);
  Var x = MakeInput(RandomTensor({1, 1, 36, 256}, &rng));
  Tensor a = m.generator().Forward(x, MakeConstant(RandomTensor({1, 64, 1, 1}, &rng)))->value;
  Tensor b = m.generator().Forward(x, MakeConstant(RandomTensor({1, 64, 1, 1}, &rng)))->value;
  b.AddScaled(a, -1);
  EXPECT_GT(b.SumAbs() / b.size(), 1e-4);
}

TEST(Generator, ZeroedAdainWeightsIsolateStyle) {
  VcModel m(Narrow(), 6);
  std::mt19937_64 rng(4);
  auto weights = m.generator().AdainWeights();
  ASSERT_EQ(weights.size(), 12u);  // 3 blocks x 2 layers x (f, g)
  std::vector<Tensor> saved;
  for (auto &w : weights) {
    saved.push_back(w->value);
    w->value.SetZero();
  }
  Var x = MakeInput(RandomTensor({1, 1, 36, 256}, &rng));
  Tensor a = m.generator().Forward(x, MakeConstant(RandomTensor({1, 64, 1, 1}, &rng)))->value;
  Tensor b = m.generator().Forward(x, MakeConstant(RandomTensor({1, 64, 1, 1}, &rng)))->value;
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << i;
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k]->value = saved[k];
  Tensor c = m.generator().Forward(x, MakeConstant(RandomTensor({1, 64, 1, 1}, &rng)))->value;
  c.AddScaled(a, -1);
  EXPECT_GT(c.SumAbs(), 0);
}

TEST(Generator, BaselineModeUsesSpeakerCodes) {
  NetConfig c = Narrow();
  c.mode = ConditioningMode::kStarGanBaseline;
  c.num_speakers = 5;
  VcModel m(c, 8);
  EXPECT_FALSE(m.has_embedders());
  EXPECT_TRUE(m.generator().AdainWeights().empty());
  EXPECT_THROW(m.prior(), GazevError);
  std::mt19937_64 rng(1);
  Var x = MakeInput(RandomTensor({2, 1, 36, 256}, &rng));
  Var y = m.generator().Forward(x, MakeConstant(OneHot({0, 4}, 5)));
  EXPECT_EQ(y->value.shape(), (Shape{2, 1, 36, 256}));
  Var logits = m.discriminator().Classify(x);
  EXPECT_EQ(logits->value.shape(), (Shape{2, 5, 1, 1}));
}

// Oracle: statistics of the AdaIN output against f(s), g(s) computed by
// hand from the layer weights.
TEST(Adain, OutputStatisticsFollowAffineMaps) {
  std::mt19937_64 rng(9);
  const int channels = 8, e = 16;
  AdainLayer layer;
  layer.scale_map.weight = MakeParameter(RandomTensor({channels, e, 1, 1}, &rng, 0.3));
  layer.scale_map.bias = MakeParameter(RandomTensor({1, channels, 1, 1}, &rng));
  layer.shift_map.weight = MakeParameter(RandomTensor({channels, e, 1, 1}, &rng, 0.3));
  layer.shift_map.bias = MakeParameter(RandomTensor({1, channels, 1, 1}, &rng));
  std::uniform_real_distribution<double> sig(0.1, 3.0), mu(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x(1, channels, 9, 64);
    std::normal_distribution<double> normal(0, 1);
    for (int ch = 0; ch < channels; ++ch) {
      double s = sig(rng), m = mu(rng);
      for (int i = 0; i < 9 * 64; ++i)
        x.Plane(0, ch)[i] = static_cast<BaseFloat>(m + s * normal(rng));
    }
    Tensor s = RandomTensor({1, e, 1, 1}, &rng);
    Tensor y = ApplyAdain(MakeInput(x), MakeConstant(s), layer, 1e-5)->value;
    for (int ch = 0; ch < channels; ++ch) {
      double f = layer.scale_map.bias->value[ch], g = layer.shift_map.bias->value[ch];
      for (int k = 0; k < e; ++k) {
        f += layer.scale_map.weight->value[ch * e + k] * s[k];
        g += layer.shift_map.weight->value[ch * e + k] * s[k];
      }
      double mean = 0, var = 0;
      const BaseFloat *p = y.Plane(0, ch);
      for (int i = 0; i < 9 * 64; ++i) mean += p[i];
      mean /= 9 * 64;
      for (int i = 0; i < 9 * 64; ++i) var += (p[i] - mean) * (p[i] - mean);
      double sd = std::sqrt(var / (9 * 64));
      ASSERT_LT(std::abs(mean - g), 1e-4) << "trial " << trial << " ch " << ch;
      ASSERT_LT(std::abs(sd - std::abs(f)), 1e-3) << "trial " << trial << " ch " << ch;
    }
  }
}

TEST(Adain, UnitMapsStandardize) {
  AdainLayer layer;
  layer.scale_map.weight = MakeParameter(Tensor(2, 4, 1, 1));
  layer.scale_map.bias = MakeParameter(Tensor(1, 2, 1, 1, 1));
  layer.shift_map.weight = MakeParameter(Tensor(2, 4, 1, 1));
  layer.shift_map.bias = MakeParameter(Tensor(1, 2, 1, 1, 0));
  std::mt19937_64 rng(3);
  Tensor x = RandomTensor({1, 2, 6, 10}, &rng, 4.0);
  Tensor y = ApplyAdain(MakeInput(x), MakeConstant(Tensor(1, 4, 1, 1)), layer, 1e-5)->value;
  for (int ch = 0; ch < 2; ++ch) {
    double mean = 0, sq = 0;
    for (int i = 0; i < 60; ++i) mean += y.Plane(0, ch)[i];
    mean /= 60;
    for (int i = 0; i < 60; ++i) sq += std::pow(y.Plane(0, ch)[i] - mean, 2);
    EXPECT_NEAR(mean, 0, 1e-5);
    EXPECT_NEAR(std::sqrt(sq / 60), 1, 1e-4);
  }
}

TEST(Adain, ConstantChannelGivesShift) {
  AdainLayer layer;
  layer.scale_map.weight = MakeParameter(Tensor(1, 2, 1, 1, 0.5));
  layer.scale_map.bias = MakeParameter(Tensor(1, 1, 1, 1, 7));
  layer.shift_map.weight = MakeParameter(Tensor(1, 2, 1, 1, 0));
  layer.shift_map.bias = MakeParameter(Tensor(1, 1, 1, 1, 3));
  Tensor y = ApplyAdain(MakeInput(Tensor(1, 1, 4, 4, 2.5)),
                        MakeConstant(Tensor(1, 2, 1, 1, 1)), layer, 1e-5)->value;
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_FLOAT_EQ(y[i], 3);
}

TEST(Discriminator, PatchGridAndConditioning) {
  NetConfig c;
  VcModel m(c, 2);
  std::mt19937_64 rng(5);
  Var x = MakeInput(RandomTensor({1, 1, 36, 256}, &rng));
  Tensor male = m.discriminator().Score(x, MakeConstant(OneHot({0}, 2)))->value;
  Tensor female = m.discriminator().Score(x, MakeConstant(OneHot({1}, 2)))->value;
  EXPECT_EQ(male.shape(), (Shape{1, 1, 2, 8}));
  female.AddScaled(male, -1);
  EXPECT_GT(female.SumAbs(), 0);
}

TEST(Discriminator, ZeroInputAndZeroHeadGiveZeroGrid) {
  VcModel m(Narrow(), 2);
  for (const auto &p : m.discriminator().params())
    if (p.name.rfind("dis.score_head", 0) == 0) p.var->value.SetZero();
  Tensor s = m.discriminator().Score(MakeInput(Tensor(1, 1, 36, 256)),
                                     MakeConstant(OneHot({1}, 2)))->value;
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], 0);
}

TEST(Classifier, ChanceLevelAtInit) {
  VcModel m(Narrow(), 12);
  std::mt19937_64 rng(13);
  double total = 0;
  const int rounds = 1000;
  for (int r = 0; r < rounds; ++r) {
    Var logits = m.discriminator().Classify(MakeInput(RandomTensor({1, 1, 36, 256}, &rng)));
    total += ScalarValue(SoftmaxCrossEntropy(logits, {static_cast<int>(rng() % 2)}));
  }
  EXPECT_NEAR(total / rounds, std::log(2.0), 1e-2);
}

TEST(Classifier, FiniteForExtremeInputs) {
  VcModel m(Narrow(), 12);
  for (BaseFloat v : {1e3f, -1e3f}) {
    Tensor l = m.discriminator().Classify(MakeInput(Tensor(1, 1, 36, 256, v)))->value;
    EXPECT_TRUE(l.AllFinite());
  }
}

TEST(PriorEmbedder, DeterministicAndGenderSensitive) {
  VcModel m(Narrow(), 21);
  std::mt19937_64 rng(1);
  Tensor z = RandomTensor({1, 16, 1, 1}, &rng);
  Tensor a = m.prior().Forward(MakeConstant(z), MakeConstant(OneHot({0}, 2)))->value;
  Tensor b = m.prior().Forward(MakeConstant(z), MakeConstant(OneHot({0}, 2)))->value;
  Tensor c = m.prior().Forward(MakeConstant(z), MakeConstant(OneHot({1}, 2)))->value;
  EXPECT_EQ(a.shape(), (Shape{1, 64, 1, 1}));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  c.AddScaled(a, -1);
  EXPECT_GT(c.SumAbs(), 0);
}

TEST(UtteranceEncoder, OutputDimension) {
  VcModel m(NetConfig(), 21);
  std::mt19937_64 rng(1);
  Tensor e = m.encoder().Forward(MakeInput(RandomTensor({2, 1, 36, 256}, &rng)),
                                 MakeConstant(OneHot({0, 1}, 2)))->value;
  EXPECT_EQ(e.shape(), (Shape{2, 64, 1, 1}));
  EXPECT_TRUE(e.AllFinite());
}

TEST(VcModel, SameSeedSameParameters) {
  VcModel a(Narrow(), 99), b(Narrow(), 99);
  auto pa = a.AllParams(), pb = b.AllParams();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t k = 0; k < pa.size(); ++k) {
    EXPECT_EQ(pa[k].name, pb[k].name);
    for (std::size_t i = 0; i < pa[k].var->value.size(); ++i)
      ASSERT_EQ(pa[k].var->value[i], pb[k].var->value[i]);
  }
}

TEST(VcModel, ParameterPartitionCoversEverything) {
  VcModel m(Narrow(), 1);
  auto gen = m.GeneratorSideParams(), crit = m.CriticSideParams();
  EXPECT_EQ(gen.size() + crit.size(), m.AllParams().size());
  for (const auto &p : gen)
    EXPECT_TRUE(p.name.rfind("gen.", 0) == 0 || p.name.rfind("prior.", 0) == 0 ||
                p.name.rfind("enc.", 0) == 0) << p.name;
  for (const auto &p : crit)
    EXPECT_TRUE(p.name.rfind("dis.", 0) == 0 || p.name.rfind("cls.", 0) == 0) << p.name;
}

TEST(OneHot, RejectsOutOfRangeLabels) {
  Tensor t = OneHot({1, 0}, 2);
  EXPECT_EQ(t[1], 1);
  EXPECT_EQ(t[2], 1);
  EXPECT_THROW(OneHot({2}, 2), GazevError);
}

}  // namespace
}  // namespace gazev
