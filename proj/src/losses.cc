// losses.cc

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

#include "gazev/losses.h"

#include <algorithm>
#include <cmath>

namespace gazev {

void LossWeights::Check() const {
  for (auto [name, v] : {std::pair{"adv", adv}, std::pair{"cls", cls},
                         std::pair{"cyc", cyc}, std::pair{"id", id},
                         std::pair{"spk", spk}}) {
    if (!(v >= 0)) GAZEV_ERR << "Loss weight " << name << " must be >= 0, got " << v;
  }
  if (!(div_margin >= 0))
    GAZEV_ERR << "Diversity margin must be >= 0, got " << div_margin;
}

const std::vector<std::string> &LossColumnNames() {
  static const std::vector<std::string> names = {
      "adv_d", "adv_g", "cls_c", "cls_g", "cyc",
      "id", "spk_match", "spk_div", "total_g", "total_dc"};
  return names;
}

std::vector<double> LossColumns(const LossBundle &b) {
  return {b.adv_d, b.adv_g, b.cls_c, b.cls_g, b.cyc,
          b.id, b.spk_match, b.spk_div, b.total_g, b.total_dc};
}

bool LossBundle::AllFinite() const { return FirstNonFinite().empty(); }

std::string LossBundle::FirstNonFinite() const {
  auto values = LossColumns(*this);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) return LossColumnNames()[i];
  return {};
}

Var DiscriminatorAdvLoss(const Var &real_scores, const Var &fake_scores) {
  return Add(BceWithLogits(real_scores, 1), BceWithLogits(fake_scores, 0));
}

Var GeneratorAdvLoss(const Var &fake_scores, bool saturating) {
  // log(1 - sigmoid(l)) = -softplus(l) = -BCE(l, target 0).
  if (saturating) return Scale(BceWithLogits(fake_scores, 0), -1);
  return BceWithLogits(fake_scores, 1);
}

std::pair<Var, Var> AdvLoss(const Var &real_scores, const Var &fake_scores,
                            bool saturating) {
  return {DiscriminatorAdvLoss(real_scores, fake_scores),
          GeneratorAdvLoss(fake_scores, saturating)};
}

Var ClsLossReal(const Var &logits, const std::vector<int> &labels) {
  return SoftmaxCrossEntropy(logits, labels);
}

Var ClsLossFake(const Var &logits, const std::vector<int> &targets) {
  return SoftmaxCrossEntropy(logits, targets);
}

Var CycLoss(const Var &x, const Var &x_roundtrip) {
  return MeanAbsDiff(x_roundtrip, x);
}

Var IdLoss(const Var &x, const Var &x_same) { return MeanAbsDiff(x_same, x); }

SpeakerLossTerms SpkLoss(const Var &y1, const Var &y2,
                         const Var &embedding_of_y1, const Var &target,
                         const Tensor *z1, const Tensor *z2) {
  if (z1 && z2 && z1->shape() == z2->shape()) {
    const int batch = z1->n();
    const std::size_t dim = z1->size() / std::max(batch, 1);
    for (int n = 0; n < batch; ++n) {
      if (std::equal(z1->data() + n * dim, z1->data() + (n + 1) * dim,
                     z2->data() + n * dim)) {
        GAZEV_WARN << "Prior samples z1 and z2 coincide for example " << n
                   << "; the diversity term degenerates to 0";
        break;
      }
    }
  }
  return {MeanAbsDiff(embedding_of_y1, target), MeanAbsDiff(y1, y2)};
}

Var TotalGLoss(const GeneratorTerms &t, const LossWeights &w) {
  w.Check();
  std::vector<std::pair<BaseFloat, Var>> parts = {
      {w.adv, t.adv_g}, {w.cls, t.cls_g}, {w.cyc, t.cyc}, {w.id, t.id}};
  if (t.spk_match) parts.push_back({w.spk, t.spk_match});
  if (t.spk_div) parts.push_back({-w.spk, MinScalar(t.spk_div, w.div_margin)});
  return WeightedSum(parts);
}

Var TotalDcLoss(const Var &adv_d, const Var &cls_c, const LossWeights &w) {
  w.Check();
  return WeightedSum({{w.adv, adv_d}, {w.cls, cls_c}});
}

double TotalGLoss(const LossBundle &b, const LossWeights &w) {
  w.Check();
  return w.adv * b.adv_g + w.cls * b.cls_g + w.cyc * b.cyc + w.id * b.id +
         w.spk * (b.spk_match - std::min<double>(b.spk_div, w.div_margin));
}

double TotalDcLoss(const LossBundle &b, const LossWeights &w) {
  w.Check();
  return w.adv * b.adv_d + w.cls * b.cls_c;
}

}  // namespace gazev
