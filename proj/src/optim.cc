// optim.cc

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

#include "gazev/optim.h"

#include <cmath>

namespace gazev {

Adam::Adam(std::vector<NamedParam> params, const AdamOptions &options)
    : params_(std::move(params)), options_(options) {
  if (!(options.learning_rate > 0)) GAZEV_ERR << "Learning rate must be > 0";
  for (const auto &p : params_) {
    m_.emplace_back(p.var->value.shape());
    v_.emplace_back(p.var->value.shape());
  }
}

void Adam::ZeroGrad() {
  for (auto &p : params_)
    if (p.var->HasGrad()) p.var->grad.SetZero();
}

void Adam::Step() {
  ++step_count_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1 - std::pow(b1, static_cast<double>(step_count_));
  const double correction2 = 1 - std::pow(b2, static_cast<double>(step_count_));
  const double step_size = options_.learning_rate / correction1;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor &value = params_[i].var->value;
    const Tensor *grad = params_[i].var->HasGrad() ? &params_[i].var->grad : nullptr;
    Tensor &m = m_[i];
    Tensor &v = v_[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad ? (*grad)[k] : 0.0;
      m[k] = static_cast<BaseFloat>(b1 * m[k] + (1 - b1) * g);
      v[k] = static_cast<BaseFloat>(b2 * v[k] + (1 - b2) * g * g);
      const double denom = std::sqrt(v[k] / correction2) + options_.epsilon;
      value[k] -= static_cast<BaseFloat>(step_size * m[k] / denom);
    }
  }
}

void Adam::Restore(std::int64_t step_count, std::vector<Tensor> m,
                   std::vector<Tensor> v) {
  if (m.size() != params_.size() || v.size() != params_.size())
    GAZEV_ERR << "Optimizer state has " << m.size() << " entries, expected "
              << params_.size();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!(m[i].shape() == params_[i].var->value.shape()) ||
        !(v[i].shape() == params_[i].var->value.shape()))
      GAZEV_ERR << "Optimizer state shape mismatch for " << params_[i].name;
  }
  step_count_ = step_count;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace gazev
