// gazev/optim.h

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

#ifndef GAZEV_OPTIM_H_
#define GAZEV_OPTIM_H_

#include <cstdint>
#include <vector>

#include "gazev/nets.h"

namespace gazev {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction over a fixed, ordered parameter list.
class Adam {
 public:
  Adam(std::vector<NamedParam> params, const AdamOptions &options);

  void ZeroGrad();
  /// Applies one update. Parameters without an accumulated gradient are
  /// treated as having a zero gradient (their moments still decay).
  void Step();

  std::int64_t step_count() const { return step_count_; }
  const std::vector<NamedParam> &params() const { return params_; }
  const std::vector<Tensor> &first_moments() const { return m_; }
  const std::vector<Tensor> &second_moments() const { return v_; }

  /// Restores optimizer state; shapes must match the parameter list.
  void Restore(std::int64_t step_count, std::vector<Tensor> m,
               std::vector<Tensor> v);

 private:
  std::vector<NamedParam> params_;
  AdamOptions options_;
  std::int64_t step_count_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace gazev

#endif  // GAZEV_OPTIM_H_
