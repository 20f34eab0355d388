// tests/losses-test.cc

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
#include "test-util.h"

namespace gazev {
namespace {

Var Filled(const Shape &s, BaseFloat v) { return MakeInput(Tensor(s, v)); }

const Shape kGrid{4, 1, 2, 8};
const Shape kSeg{2, 1, 36, 256};

TEST(AdvLoss, ZeroLogits) {
  auto [d, g] = AdvLoss(Filled(kGrid, 0), Filled(kGrid, 0));
  EXPECT_NEAR(ScalarValue(d), 2 * std::log(2.0), 1e-6);
  EXPECT_NEAR(ScalarValue(g), std::log(2.0), 1e-6);
}

TEST(AdvLoss, PerfectDiscriminatorLimit) {
  double d = ScalarValue(DiscriminatorAdvLoss(Filled(kGrid, 40), Filled(kGrid, -40)));
  EXPECT_LT(d, 1e-12);
  EXPECT_GE(d, 0);
}

TEST(AdvLoss, GeneratorTermDecreasesWithFakeLogit) {
  double prev = INFINITY;
  for (BaseFloat v = -10; v <= 10; v += 0.5f) {
    double g = ScalarValue(GeneratorAdvLoss(Filled(kGrid, v)));
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(AdvLoss, SaturatingForm) {
  // log(1 - sigmoid(0)) = -ln 2
  EXPECT_NEAR(ScalarValue(GeneratorAdvLoss(Filled(kGrid, 0), true)), -std::log(2.0), 1e-6);
}

TEST(AdvLoss, NonFiniteScoresRejected) {
  EXPECT_THROW(DiscriminatorAdvLoss(Filled(kGrid, NAN), Filled(kGrid, 0)), GazevError);
}

TEST(ClsLoss, ConfidentCorrectLogits) {
  Tensor logits(2, 2, 1, 1);
  logits[0] = 50;   // sample 0 -> class 0
  logits[3] = 50;   // sample 1 -> class 1
  EXPECT_LT(ScalarValue(ClsLossReal(MakeInput(logits), {0, 1})), 1e-12);
}

TEST(ClsLoss, UniformLogits) {
  EXPECT_NEAR(ScalarValue(ClsLossReal(Filled({3, 2, 1, 1}, 0.3f), {0, 1, 1})),
              std::log(2.0), 1e-6);
  std::vector<int> labels(80);
  for (int i = 0; i < 80; ++i) labels[i] = i;
  double ce = ScalarValue(ClsLossFake(Filled({80, 80, 1, 1}, 0), labels));
  EXPECT_NEAR(ce, std::log(80.0), 1e-6);
  EXPECT_NEAR(ce, 4.382, 1e-3);
}

TEST(ClsLoss, LabelOutOfRange) {
  EXPECT_THROW(ClsLossReal(Filled({1, 2, 1, 1}, 0), {2}), GazevError);
  EXPECT_THROW(ClsLossFake(Filled({1, 2, 1, 1}, 0), {-1}), GazevError);
}

TEST(ReconstructionLoss, Examples) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Tensor x(kSeg);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<BaseFloat>(normal(rng));
  Tensor up = x, down = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    up[i] += 0.5f;
    down[i] -= 0.5f;
  }
  for (auto fn : {&CycLoss, &IdLoss}) {
    EXPECT_EQ(ScalarValue(fn(MakeInput(x), MakeInput(x))), 0);
    EXPECT_NEAR(ScalarValue(fn(MakeInput(x), MakeInput(up))), 0.5, 1e-6);
    EXPECT_NEAR(ScalarValue(fn(MakeInput(x), MakeInput(down))), 0.5, 1e-6);
    EXPECT_THROW(fn(MakeInput(x), Filled({2, 1, 36, 128}, 0)), GazevError);
  }
}

TEST(SpkLoss, Examples) {
  Var e = Filled({2, 64, 1, 1}, 0.25f);
  Var y = Filled(kSeg, 1.5f);
  SpeakerLossTerms t = SpkLoss(y, Filled(kSeg, 2.5f), e, Filled({2, 64, 1, 1}, 0.25f));
  EXPECT_EQ(ScalarValue(t.match), 0);
  EXPECT_NEAR(ScalarValue(t.div), 1.0, 1e-6);
}

TEST(SpkLoss, CoincidentPriorSamplesWarn) {
  Tensor z(2, 16, 1, 1, 0.3f);
  LogCapture logs;
  SpeakerLossTerms t = SpkLoss(Filled(kSeg, 1), Filled(kSeg, 1), Filled({2, 64, 1, 1}, 0),
                               Filled({2, 64, 1, 1}, 0), &z, &z);
  EXPECT_EQ(ScalarValue(t.div), 0);
  EXPECT_TRUE(logs.Contains("coincide"));
}

// Finite differences on a 2x2 map: the diversity gradient moves y1 away
// from y2.
TEST(SpkLoss, DiversityGradientPushesApart) {
  Tensor a(1, 1, 2, 2), b(1, 1, 2, 2);
  const float va[] = {0.3f, -1.2f, 2.0f, 0.1f}, vb[] = {0.5f, -2.0f, 1.0f, 0.4f};
  for (int i = 0; i < 4; ++i) {
    a[i] = va[i];
    b[i] = vb[i];
  }
  Var y1 = MakeParameter(a);
  Var div = SpkLoss(y1, MakeInput(b), Filled({1, 4, 1, 1}, 0), Filled({1, 4, 1, 1}, 0)).div;
  Backward(div);
  for (int i = 0; i < 4; ++i) {
    const float h = 1e-2f;
    Tensor p = a, m = a;
    p[i] += h;
    m[i] -= h;
    double fd = (ScalarValue(MeanAbsDiff(MakeInput(p), MakeInput(b))) -
                 ScalarValue(MeanAbsDiff(MakeInput(m), MakeInput(b)))) / (2 * h);
    EXPECT_NEAR(y1->grad[i], fd, 1e-4);
    // Ascending the gradient increases |y1 - y2|.
    EXPECT_GT(y1->grad[i] * (a[i] - b[i]), 0);
  }
}

TEST(TotalLoss, ZeroBundle) {
  LossBundle b;
  LossWeights w;
  EXPECT_EQ(TotalGLoss(b, w), 0);
  EXPECT_EQ(TotalDcLoss(b, w), 0);
}

TEST(TotalLoss, DefaultWeightsArithmetic) {
  LossBundle b;
  b.adv_g = 0.7;
  b.cls_g = b.cyc = b.id = b.spk_match = 0.1;
  b.spk_div = 0;
  EXPECT_NEAR(TotalGLoss(b, LossWeights()), 4.7, 1e-6);

  // Same through the graph.
  GeneratorTerms t;
  t.adv_g = Filled({1, 1, 1, 1}, 0.7f);
  t.cls_g = t.cyc = t.id = t.spk_match = Filled({1, 1, 1, 1}, 0.1f);
  t.spk_div = Filled({1, 1, 1, 1}, 0);
  EXPECT_NEAR(ScalarValue(TotalGLoss(t, LossWeights())), 4.7, 1e-6);
}

TEST(TotalLoss, LinearInCycWeight) {
  LossBundle b;
  b.adv_g = 0.3;
  b.cls_g = 0.2;
  b.cyc = 0.4;
  b.id = 0.05;
  b.spk_match = 0.01;
  b.spk_div = 0.3;
  LossWeights w, w2;
  w2.cyc = 2 * w.cyc;
  EXPECT_NEAR(TotalGLoss(b, w2) - TotalGLoss(b, w), w.cyc * b.cyc, 1e-9);
}

TEST(TotalLoss, DiversityClamped) {
  LossBundle b;
  b.spk_div = 50;
  LossWeights w;
  EXPECT_NEAR(TotalGLoss(b, w), -w.spk * w.div_margin, 1e-9);
}

TEST(TotalLoss, NegativeWeightsRejected) {
  LossWeights w;
  w.cyc = -1;
  EXPECT_THROW(TotalGLoss(LossBundle(), w), GazevError);
  EXPECT_THROW(TotalDcLoss(LossBundle(), w), GazevError);
}

TEST(LossColumns, MatchMetricsHeader) {
  std::vector<std::string> expected = {"adv_d", "adv_g", "cls_c", "cls_g", "cyc",
                                       "id", "spk_match", "spk_div", "total_g", "total_dc"};
  EXPECT_EQ(LossColumnNames(), expected);
  LossBundle b;
  b.cyc = 3;
  EXPECT_EQ(LossColumns(b)[4], 3);
}

}  // namespace
}  // namespace gazev
