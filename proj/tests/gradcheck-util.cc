// tests/gradcheck-util.cc

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

#include "gradcheck-util.h"

#include <cmath>
#include <limits>
#include <functional>
#include <random>

#include "gazev/autograd.h"
#include "gazev/losses.h"
#include "gazev/nets.h"

namespace gazev {

namespace {

static_assert(sizeof(BaseFloat) == sizeof(double),
              "finite differences need the double-precision build");

constexpr double kStep = 1e-6;
constexpr double kGradFloor = 1e-6;

NetConfig ToyConfig(ConditioningMode mode) {
  NetConfig c;
  c.mode = mode;
  c.num_speakers = 3;
  c.gen_channels = 4;
  c.dis_channels = 4;
  c.enc_channels = 4;
  c.prior_hidden = 16;
  c.Check();
  return c;
}

Tensor Gaussian(const Shape &shape, std::mt19937_64 *rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = normal(*rng);
  return t;
}

struct Fixture {
  NetConfig net;
  VcModel model;
  Tensor x, z1, z2;
  std::vector<int> src, tgt;

  Fixture(ConditioningMode mode, std::uint64_t seed)
      : net(ToyConfig(mode)), model(net, seed) {
    std::mt19937_64 rng(seed + 1);
    x = Gaussian({2, 1, net.mcc_dim, net.num_frames}, &rng);
    z1 = Gaussian({2, net.prior_dim, 1, 1}, &rng);
    z2 = Gaussian({2, net.prior_dim, 1, 1}, &rng);
    if (mode == ConditioningMode::kGazev) {
      src = {0, 1};
      tgt = {1, 1};
    } else {
      src = {0, 2};
      tgt = {1, 0};
    }
  }
};

using TermFn = std::function<Var(const Fixture &)>;

GradCheckResult CheckTerm(const std::string &name, Fixture *f, const TermFn &fn,
                          int samples, std::mt19937_64 *rng) {
  auto params = f->model.AllParams();
  for (auto &p : params) {
    p.var->requires_grad = true;
    p.var->grad = Tensor();
  }
  Var loss = fn(*f);
  Backward(loss);
  GradCheckResult r;
  r.term = name;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto &p : params) {
    if (!p.var->HasGrad()) continue;  // term does not reach this tensor
    const Tensor analytic = p.var->grad;
    const Tensor orig = p.var->value;
    if (!analytic.AllFinite()) {
      ++r.checked;
      r.max_rel_error = std::numeric_limits<double>::infinity();
      r.worst_param = p.name + " (non-finite gradient)";
      continue;
    }
    for (int s = 0; s < samples; ++s) {
      // Unit direction mixing the analytic gradient with a random vector: a
      // wrong gradient shows up in both components, and the directional
      // derivative stays well above roundoff.
      Tensor dir(orig.shape());
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = normal(*rng);
      const double gnorm = analytic.Norm(), rnorm = dir.Norm();
      for (std::size_t i = 0; i < dir.size(); ++i)
        dir[i] = (gnorm > 0 ? analytic[i] / gnorm : 0) + 0.5 * dir[i] / rnorm;
      const double dnorm = dir.Norm();
      double a = 0;
      for (std::size_t i = 0; i < dir.size(); ++i) {
        dir[i] /= dnorm;
        a += analytic[i] * dir[i];
      }
      p.var->value = orig;
      p.var->value.AddScaled(dir, kStep);
      double up = ScalarValue(fn(*f));
      p.var->value = orig;
      p.var->value.AddScaled(dir, -kStep);
      double down = ScalarValue(fn(*f));
      p.var->value = orig;
      double numeric = (up - down) / (2 * kStep);
      double rel = std::abs(a - numeric) /
                   std::max({std::abs(a), std::abs(numeric), kGradFloor});
      ++r.checked;
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst_param = p.name;
      }
    }
  }
  return r;
}

Var Code(const std::vector<int> &labels, int classes) {
  return MakeConstant(OneHot(labels, classes));
}

}  // namespace

std::vector<GradCheckResult> RunGradChecks(std::uint64_t seed,
                                           int samples_per_param) {
  std::mt19937_64 rng(seed);
  std::vector<GradCheckResult> out;
  Fixture g(ConditioningMode::kGazev, seed);
  const LossWeights w;

  auto fake_y1 = [](const Fixture &f) {
    Var s1 = f.model.prior().Forward(MakeConstant(f.z1), Code(f.tgt, 2));
    return f.model.generator().Forward(MakeInput(f.x), s1);
  };
  auto adv_d = [&](const Fixture &f) {
    Var x = MakeInput(f.x);
    return DiscriminatorAdvLoss(
        f.model.discriminator().Score(x, Code(f.src, 2)),
        f.model.discriminator().Score(Detach(fake_y1(f)), Code(f.tgt, 2)));
  };
  auto cls_c = [](const Fixture &f) {
    return ClsLossReal(f.model.discriminator().Classify(MakeInput(f.x)), f.src);
  };
  auto adv_g = [&](const Fixture &f) {
    return GeneratorAdvLoss(f.model.discriminator().Score(fake_y1(f), Code(f.tgt, 2)));
  };
  auto adv_g_sat = [&](const Fixture &f) {
    return GeneratorAdvLoss(
        f.model.discriminator().Score(fake_y1(f), Code(f.tgt, 2)), true);
  };
  auto cls_g = [&](const Fixture &f) {
    return ClsLossFake(f.model.discriminator().Classify(fake_y1(f)), f.tgt);
  };
  auto sx = [](const Fixture &f) {
    return f.model.encoder().Forward(MakeInput(f.x), Code(f.src, 2));
  };
  auto cyc = [&](const Fixture &f) {
    return CycLoss(MakeInput(f.x), f.model.generator().Forward(fake_y1(f), sx(f)));
  };
  auto id = [&](const Fixture &f) {
    return IdLoss(MakeInput(f.x), f.model.generator().Forward(MakeInput(f.x), sx(f)));
  };
  auto spk = [](const Fixture &f) {
    Var uy = Code(f.tgt, 2);
    Var s1 = f.model.prior().Forward(MakeConstant(f.z1), uy);
    Var s2 = f.model.prior().Forward(MakeConstant(f.z2), uy);
    Var y1 = f.model.generator().Forward(MakeInput(f.x), s1);
    Var y2 = f.model.generator().Forward(MakeInput(f.x), s2);
    return SpkLoss(y1, y2, f.model.encoder().Forward(y1, uy), s1);
  };
  auto total_g = [&](const Fixture &f) {
    GeneratorTerms t;
    t.adv_g = adv_g(f);
    t.cls_g = cls_g(f);
    t.cyc = cyc(f);
    t.id = id(f);
    SpeakerLossTerms s = spk(f);
    t.spk_match = s.match;
    t.spk_div = s.div;
    return TotalGLoss(t, w);
  };
  auto total_dc = [&](const Fixture &f) { return TotalDcLoss(adv_d(f), cls_c(f), w); };

  const std::vector<std::pair<std::string, TermFn>> gazev_terms = {
      {"adv_d", adv_d},
      {"cls_c", cls_c},
      {"adv_g", adv_g},
      {"adv_g_saturating", adv_g_sat},
      {"cls_g", cls_g},
      {"cyc", cyc},
      {"id", id},
      {"spk_match", [&](const Fixture &f) { return spk(f).match; }},
      {"spk_div", [&](const Fixture &f) { return spk(f).div; }},
      {"total_g", total_g},
      {"total_dc", total_dc}};
  for (const auto &[name, fn] : gazev_terms)
    out.push_back(CheckTerm(name, &g, fn, samples_per_param, &rng));

  Fixture b(ConditioningMode::kStarGanBaseline, seed);
  const int n = b.net.NumClasses();
  auto b_y = [n](const Fixture &f) {
    return f.model.generator().Forward(MakeInput(f.x), Code(f.tgt, n));
  };
  const std::vector<std::pair<std::string, TermFn>> baseline_terms = {
      {"baseline_cls_c",
       [](const Fixture &f) {
         return ClsLossReal(f.model.discriminator().Classify(MakeInput(f.x)), f.src);
       }},
      {"baseline_cls_g",
       [&](const Fixture &f) {
         return ClsLossFake(f.model.discriminator().Classify(b_y(f)), f.tgt);
       }},
      {"baseline_cyc",
       [&](const Fixture &f) {
         return CycLoss(MakeInput(f.x),
                        f.model.generator().Forward(b_y(f), Code(f.src, n)));
       }},
      {"baseline_id", [n](const Fixture &f) {
         return IdLoss(MakeInput(f.x),
                       f.model.generator().Forward(MakeInput(f.x), Code(f.src, n)));
       }}};
  for (const auto &[name, fn] : baseline_terms)
    out.push_back(CheckTerm(name, &b, fn, samples_per_param, &rng));
  return out;
}

}  // namespace gazev
