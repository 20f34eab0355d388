// gazev/losses.h

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

#ifndef GAZEV_LOSSES_H_
#define GAZEV_LOSSES_H_

#include <string>
#include <utility>
#include <vector>

#include "gazev/autograd.h"

namespace gazev {

/// Mixing coefficients. The discriminator loss carries weight 1 and every
/// other term 10.
struct LossWeights {
  BaseFloat adv = 1;
  BaseFloat cls = 10;
  BaseFloat cyc = 10;
  BaseFloat id = 10;
  BaseFloat spk = 10;
  /// Cap on the diversity reward: the total includes -min(spk_div, margin).
  BaseFloat div_margin = 1;
  /// Use log(1 - D(G(x))) for the generator instead of -log D(G(x)).
  bool saturating_adv = false;

  void Check() const;
};

/// Scalar values of every loss term for one step.
struct LossBundle {
  double adv_d = 0, adv_g = 0;
  double cls_c = 0, cls_g = 0;
  double cyc = 0, id = 0;
  double spk_match = 0, spk_div = 0;
  double total_g = 0, total_dc = 0;

  bool AllFinite() const;
  /// Name of the first non-finite term, or empty.
  std::string FirstNonFinite() const;
};

/// Column names used in metrics logs, in order.
const std::vector<std::string> &LossColumnNames();
/// Values in LossColumnNames() order (after the step column).
std::vector<double> LossColumns(const LossBundle &bundle);

// ---- adversarial ----------------------------------------------------------

/// -E[log sigmoid(real)] - E[log(1 - sigmoid(fake))], patch-averaged.
Var DiscriminatorAdvLoss(const Var &real_scores, const Var &fake_scores);
/// Non-saturating -E[log sigmoid(fake)], or E[log(1 - sigmoid(fake))] when
/// saturating is set.
Var GeneratorAdvLoss(const Var &fake_scores, bool saturating = false);
/// Both terms on the same score grids, returned as (d_term, g_term).
std::pair<Var, Var> AdvLoss(const Var &real_scores, const Var &fake_scores,
                            bool saturating = false);

// ---- classification -------------------------------------------------------

/// Cross-entropy of C(x) against the true label (trains C).
Var ClsLossReal(const Var &logits, const std::vector<int> &labels);
/// Cross-entropy of C(G(x, .)) against the target label (trains G and F).
Var ClsLossFake(const Var &logits, const std::vector<int> &targets);

// ---- reconstruction -------------------------------------------------------

/// Mean L1 between x and G(G(x, s_y), s_x).
Var CycLoss(const Var &x, const Var &x_roundtrip);
/// Mean L1 between x and G(x, s_x).
Var IdLoss(const Var &x, const Var &x_same);

// ---- speaker embedding ----------------------------------------------------

struct SpeakerLossTerms {
  Var match;  // mean L1 between E(y1, u_y) and F(z1, u_y); minimised
  Var div;    // mean L1 between y1 and y2; maximised (capped in the total)
};

/// y1 = G(x, F(z1, u)), y2 = G(x, F(z2, u)), embedding_of_y1 = E(y1, u),
/// target = F(z1, u). When the prior samples are supplied, identical rows
/// trigger a warning since the diversity term then vanishes.
SpeakerLossTerms SpkLoss(const Var &y1, const Var &y2,
                         const Var &embedding_of_y1, const Var &target,
                         const Tensor *z1 = nullptr,
                         const Tensor *z2 = nullptr);

// ---- totals ---------------------------------------------------------------

/// Terms entering the generator-side objective. spk_match/spk_div are null
/// in baseline mode.
struct GeneratorTerms {
  Var adv_g, cls_g, cyc, id, spk_match, spk_div;
};

/// adv*adv_g + cls*cls_g + cyc*cyc + id*id + spk*(spk_match - min(spk_div, m))
Var TotalGLoss(const GeneratorTerms &terms, const LossWeights &weights);
/// adv*adv_d + cls*cls_c
Var TotalDcLoss(const Var &adv_d, const Var &cls_c, const LossWeights &weights);

double TotalGLoss(const LossBundle &bundle, const LossWeights &weights);
double TotalDcLoss(const LossBundle &bundle, const LossWeights &weights);

}  // namespace gazev

#endif  // GAZEV_LOSSES_H_
