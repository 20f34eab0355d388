// gazev/autograd.h

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

#ifndef GAZEV_AUTOGRAD_H_
#define GAZEV_AUTOGRAD_H_

// A small reverse-mode differentiation layer over Tensor. Each op records its
// inputs and a closure that pushes the output gradient back into them. Graphs
// are built only when at least one input requires a gradient, so a forward
// pass through frozen parameters on constant inputs costs no extra memory.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gazev/tensor.h"

namespace gazev {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Tensor value;
  Tensor grad;  // allocated on first use
  bool requires_grad = false;
  std::vector<Var> inputs;
  std::function<void(Node &)> backward;

  Tensor &Grad();
  bool HasGrad() const { return !grad.empty(); }
};

/// Leaf that holds trainable state. `requires_grad` can be toggled to freeze.
Var MakeParameter(Tensor value);
/// Leaf without gradient.
Var MakeConstant(Tensor value);
/// Leaf that collects a gradient but is not a parameter (used for probes).
Var MakeInput(Tensor value);
/// Returns a gradient-free copy sharing nothing with the graph.
Var Detach(const Var &v);

/// Runs reverse-mode accumulation from a scalar (1x1x1x1) output.
void Backward(const Var &loss);

/// Padding/stride for a 2-d convolution. Pads may be asymmetric.
struct ConvGeometry {
  int stride_h = 1, stride_w = 1;
  int pad_top = 0, pad_bottom = 0, pad_left = 0, pad_right = 0;

  /// "Same"-style padding: output size is ceil(input / stride).
  static ConvGeometry Same(int kernel_h, int kernel_w, int stride_h,
                           int stride_w);
  int OutH(int in_h, int kernel_h) const;
  int OutW(int in_w, int kernel_w) const;
};

// weight: Cout x Cin x KH x KW, bias: 1 x Cout x 1 x 1 (may be null).
Var Conv2d(const Var &x, const Var &weight, const Var &bias,
           const ConvGeometry &geom);
// x: N x In x 1 x 1, weight: Out x In x 1 x 1, bias: 1 x Out x 1 x 1.
Var Linear(const Var &x, const Var &weight, const Var &bias);

Var Relu(const Var &x);
Var LeakyRelu(const Var &x, BaseFloat slope);

/// Per (sample, channel) spatial standardisation (x - mean) / (std + eps),
/// std being the population standard deviation.
Var InstanceNorm(const Var &x, BaseFloat eps);
/// y[n,c] = scale[n or 0, c] * x[n,c] + shift[n or 0, c]; scale/shift have
/// shape (N or 1) x C x 1 x 1.
Var ChannelAffine(const Var &x, const Var &scale, const Var &shift);

Var Add(const Var &a, const Var &b);
Var Scale(const Var &x, BaseFloat factor);
Var UpsampleNearest2x(const Var &x);
Var AvgPool2x2(const Var &x);
/// N x C x H x W -> N x C x 1 x 1.
Var GlobalAvgPool(const Var &x);
/// Appends code (N x K x 1 x 1) as K constant channels: N x (C+K) x H x W.
Var ConcatCode(const Var &x, const Var &code);

// Scalar reductions.  All return a 1x1x1x1 value.
/// Mean over elements of softplus(-l) (target 1) or softplus(l) (target 0).
Var BceWithLogits(const Var &logits, BaseFloat target);
/// Mean cross-entropy; logits N x K x 1 x 1.
Var SoftmaxCrossEntropy(const Var &logits, const std::vector<int> &labels);
/// Mean elementwise |a - b|.
Var MeanAbsDiff(const Var &a, const Var &b);
/// min(x, cap) for a scalar x.
Var MinScalar(const Var &x, BaseFloat cap);
/// sum_i weight_i * term_i over scalars.
Var WeightedSum(const std::vector<std::pair<BaseFloat, Var>> &terms);

BaseFloat ScalarValue(const Var &v);

}  // namespace gazev

#endif  // GAZEV_AUTOGRAD_H_
