// autograd.cc

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

#include "gazev/autograd.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <Eigen/Core>

namespace gazev {

namespace {

using RowMatrix =
    Eigen::Matrix<BaseFloat, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

Var MakeOp(Tensor value, std::vector<Var> inputs,
           std::function<void(Node &)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  bool needs = std::any_of(inputs.begin(), inputs.end(),
                           [](const Var &v) { return v && v->requires_grad; });
  if (needs) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return node;
}

bool Wants(const Var &v) { return v && v->requires_grad; }

void CheckSameShape(const Tensor &a, const Tensor &b, const char *what) {
  if (!(a.shape() == b.shape()))
    GAZEV_ERR << what << ": shape mismatch " << a.shape().ToString() << " vs "
              << b.shape().ToString();
}

// Range [lo, hi) of output columns whose input column ow*stride - pad + k
// lies inside [0, width).
inline void ValidRange(int width, int out_w, int stride, int pad, int k,
                       int *lo, int *hi) {
  int first = pad - k;  // need ow*stride >= first
  *lo = first <= 0 ? 0 : (first + stride - 1) / stride;
  int last = width - 1 + pad - k;  // need ow*stride <= last
  *hi = last < 0 ? 0 : std::min(out_w, last / stride + 1);
  if (*lo > *hi) *lo = *hi;
}

// Column matrix for one sample: rows indexed by (c, kh, kw), columns by
// output position.
void Im2Col(const BaseFloat *x, int channels, int height, int width,
            int kernel_h, int kernel_w, const ConvGeometry &g, int out_h,
            int out_w, BaseFloat *cols) {
  const int positions = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    const BaseFloat *plane = x + static_cast<std::size_t>(c) * height * width;
    for (int kh = 0; kh < kernel_h; ++kh) {
      for (int kw = 0; kw < kernel_w; ++kw) {
        BaseFloat *row =
            cols + static_cast<std::size_t>((c * kernel_h + kh) * kernel_w +
                                            kw) * positions;
        int lo, hi;
        ValidRange(width, out_w, g.stride_w, g.pad_left, kw, &lo, &hi);
        for (int oh = 0; oh < out_h; ++oh) {
          int ih = oh * g.stride_h - g.pad_top + kh;
          BaseFloat *dst = row + oh * out_w;
          if (ih < 0 || ih >= height) {
            std::fill(dst, dst + out_w, BaseFloat(0));
            continue;
          }
          std::fill(dst, dst + lo, BaseFloat(0));
          std::fill(dst + hi, dst + out_w, BaseFloat(0));
          const BaseFloat *src = plane + ih * width - g.pad_left + kw;
          if (g.stride_w == 1) {
            std::copy(src + lo, src + hi, dst + lo);
          } else {
            const int s = g.stride_w;
            for (int ow = lo; ow < hi; ++ow) dst[ow] = src[ow * s];
          }
        }
      }
    }
  }
}

void Col2Im(const BaseFloat *cols, int channels, int height, int width,
            int kernel_h, int kernel_w, const ConvGeometry &g, int out_h,
            int out_w, BaseFloat *x) {
  const int positions = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    BaseFloat *plane = x + static_cast<std::size_t>(c) * height * width;
    for (int kh = 0; kh < kernel_h; ++kh) {
      for (int kw = 0; kw < kernel_w; ++kw) {
        const BaseFloat *row =
            cols + static_cast<std::size_t>((c * kernel_h + kh) * kernel_w +
                                            kw) * positions;
        int lo, hi;
        ValidRange(width, out_w, g.stride_w, g.pad_left, kw, &lo, &hi);
        for (int oh = 0; oh < out_h; ++oh) {
          int ih = oh * g.stride_h - g.pad_top + kh;
          if (ih < 0 || ih >= height) continue;
          BaseFloat *dst = plane + ih * width - g.pad_left + kw;
          const BaseFloat *src = row + oh * out_w;
          if (g.stride_w == 1) {
            for (int ow = lo; ow < hi; ++ow) dst[ow] += src[ow];
          } else {
            const int s = g.stride_w;
            for (int ow = lo; ow < hi; ++ow) dst[ow * s] += src[ow];
          }
        }
      }
    }
  }
}

BaseFloat Softplus(BaseFloat v) {
  return std::max(v, BaseFloat(0)) + std::log1p(std::exp(-std::abs(v)));
}

BaseFloat Sigmoid(BaseFloat v) {
  if (v >= 0) return 1 / (1 + std::exp(-v));
  BaseFloat e = std::exp(v);
  return e / (1 + e);
}

}  // namespace

Tensor &Node::Grad() {
  if (grad.empty()) grad = Tensor(value.shape());
  return grad;
}

Var MakeParameter(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return node;
}

Var MakeConstant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return node;
}

Var MakeInput(Tensor value) { return MakeParameter(std::move(value)); }

Var Detach(const Var &v) { return MakeConstant(v->value); }

void Backward(const Var &loss) {
  if (loss->value.size() != 1)
    GAZEV_ERR << "Backward needs a scalar, got " << loss->value.shape().ToString();
  if (!loss->requires_grad) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> visited;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(loss.get(), 0);
  visited.insert(loss.get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node *child = node->inputs[next++].get();
      if (child && child->requires_grad && !visited.count(child)) {
        visited.insert(child);
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss->Grad()[0] += 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *node = *it;
    if (node->backward && node->HasGrad()) node->backward(*node);
  }
}

ConvGeometry ConvGeometry::Same(int kernel_h, int kernel_w, int stride_h,
                                int stride_w) {
  ConvGeometry g;
  g.stride_h = stride_h;
  g.stride_w = stride_w;
  g.pad_top = (kernel_h - 1) / 2;
  g.pad_bottom = kernel_h - 1 - g.pad_top;
  g.pad_left = (kernel_w - 1) / 2;
  g.pad_right = kernel_w - 1 - g.pad_left;
  return g;
}

int ConvGeometry::OutH(int in_h, int kernel_h) const {
  return (in_h + pad_top + pad_bottom - kernel_h) / stride_h + 1;
}

int ConvGeometry::OutW(int in_w, int kernel_w) const {
  return (in_w + pad_left + pad_right - kernel_w) / stride_w + 1;
}

namespace {

struct ConvDims {
  int batch, in_c, height, width, out_c, kh, kw, out_h, out_w;
  int K() const { return in_c * kh * kw; }
  int Positions() const { return out_h * out_w; }
};

void GemmForward(const ConvDims &d, const ConvGeometry &g, const Tensor &in,
                 const Tensor &w, Tensor *out) {
  const int k = d.K(), positions = d.Positions();
  std::vector<BaseFloat> cols(static_cast<std::size_t>(k) * positions);
  ConstMatrixMap wmat(w.data(), d.out_c, k);
  for (int n = 0; n < d.batch; ++n) {
    Im2Col(in.Sample(n), d.in_c, d.height, d.width, d.kh, d.kw, g, d.out_h,
           d.out_w, cols.data());
    MatrixMap y(out->Sample(n), d.out_c, positions);
    y.noalias() = wmat * ConstMatrixMap(cols.data(), k, positions);
  }
}

void GemmBackward(const ConvDims &d, const ConvGeometry &g, const Tensor &in,
                  const Tensor &w, const Tensor &dy, Tensor *dx, Tensor *dw) {
  const int k = d.K(), positions = d.Positions();
  ConstMatrixMap wmat(w.data(), d.out_c, k);
  std::vector<BaseFloat> cols(static_cast<std::size_t>(k) * positions);
  for (int n = 0; n < d.batch; ++n) {
    ConstMatrixMap gmat(dy.Sample(n), d.out_c, positions);
    if (dw) {
      Im2Col(in.Sample(n), d.in_c, d.height, d.width, d.kh, d.kw, g, d.out_h,
             d.out_w, cols.data());
      MatrixMap dwmat(dw->data(), d.out_c, k);
      dwmat.noalias() +=
          gmat * ConstMatrixMap(cols.data(), k, positions).transpose();
    }
    if (dx) {
      MatrixMap dcols(cols.data(), k, positions);
      dcols.noalias() = wmat.transpose() * gmat;
      Col2Im(cols.data(), d.in_c, d.height, d.width, d.kh, d.kw, g, d.out_h,
             d.out_w, dx->Sample(n));
    }
  }
}

}  // namespace

Var Conv2d(const Var &x, const Var &weight, const Var &bias,
           const ConvGeometry &geom) {
  const Tensor &in = x->value;
  const Tensor &w = weight->value;
  if (in.c() != w.c())
    GAZEV_ERR << "Conv2d: input has " << in.c() << " channels, kernel expects "
              << w.c();
  ConvDims d{in.n(), in.c(), in.h(), in.w(), w.n(), w.h(), w.w(), 0, 0};
  d.out_h = geom.OutH(d.height, d.kh);
  d.out_w = geom.OutW(d.width, d.kw);
  if (d.out_h <= 0 || d.out_w <= 0)
    GAZEV_ERR << "Conv2d: input " << in.shape().ToString()
              << " too small for kernel " << d.kh << "x" << d.kw;

  Tensor out(d.batch, d.out_c, d.out_h, d.out_w);
  GemmForward(d, geom, in, w, &out);
  if (bias) {
    const std::size_t plane = static_cast<std::size_t>(d.out_h) * d.out_w;
    for (int n = 0; n < d.batch; ++n)
      for (int c = 0; c < d.out_c; ++c) {
        BaseFloat *p = out.Plane(n, c);
        const BaseFloat b = bias->value[c];
        for (std::size_t i = 0; i < plane; ++i) p[i] += b;
      }
  }

  return MakeOp(std::move(out), {x, weight, bias}, [d, geom](Node &self) {
    Node &xn = *self.inputs[0];
    Node &wn = *self.inputs[1];
    Node *bn = self.inputs[2].get();
    Tensor *dx = xn.requires_grad ? &xn.Grad() : nullptr;
    Tensor *dw = wn.requires_grad ? &wn.Grad() : nullptr;
    if (dx || dw) GemmBackward(d, geom, xn.value, wn.value, self.grad, dx, dw);
    if (bn && bn->requires_grad) {
      const std::size_t plane = static_cast<std::size_t>(d.out_h) * d.out_w;
      Tensor &db = bn->Grad();
      for (int n = 0; n < d.batch; ++n)
        for (int c = 0; c < d.out_c; ++c) {
          const BaseFloat *g = self.grad.Plane(n, c);
          double acc = 0;
          for (std::size_t i = 0; i < plane; ++i) acc += g[i];
          db[c] += static_cast<BaseFloat>(acc);
        }
    }
  });
}

Var Linear(const Var &x, const Var &weight, const Var &bias) {
  const Tensor &in = x->value;
  const Tensor &w = weight->value;
  const int batch = in.n(), in_dim = in.c() * in.h() * in.w(), out_dim = w.n();
  if (w.c() * w.h() * w.w() != in_dim)
    GAZEV_ERR << "Linear: input dim " << in_dim << " vs weight "
              << w.shape().ToString();
  Tensor out(batch, out_dim, 1, 1);
  MatrixMap y(out.data(), batch, out_dim);
  y.noalias() = ConstMatrixMap(in.data(), batch, in_dim) *
                ConstMatrixMap(w.data(), out_dim, in_dim).transpose();
  if (bias) {
    for (int n = 0; n < batch; ++n)
      for (int o = 0; o < out_dim; ++o) y(n, o) += bias->value[o];
  }
  return MakeOp(std::move(out), {x, weight, bias}, [=](Node &self) {
    ConstMatrixMap g(self.grad.data(), batch, out_dim);
    Node &xn = *self.inputs[0];
    Node &wn = *self.inputs[1];
    Node *bn = self.inputs[2].get();
    if (wn.requires_grad) {
      MatrixMap dw(wn.Grad().data(), out_dim, in_dim);
      dw.noalias() += g.transpose() * ConstMatrixMap(xn.value.data(), batch, in_dim);
    }
    if (bn && bn->requires_grad) {
      Tensor &db = bn->Grad();
      for (int o = 0; o < out_dim; ++o) db[o] += g.col(o).sum();
    }
    if (xn.requires_grad) {
      MatrixMap dx(xn.Grad().data(), batch, in_dim);
      dx.noalias() += g * ConstMatrixMap(wn.value.data(), out_dim, in_dim);
    }
  });
}

Var Relu(const Var &x) { return LeakyRelu(x, 0); }

Var LeakyRelu(const Var &x, BaseFloat slope) {
  Tensor out(x->value.shape());
  const BaseFloat *src = x->value.data();
  BaseFloat *dst = out.data();
  for (std::size_t i = 0; i < out.size(); ++i)
    dst[i] = src[i] > 0 ? src[i] : slope * src[i];
  return MakeOp(std::move(out), {x}, [slope](Node &self) {
    Node &xn = *self.inputs[0];
    const BaseFloat *xv = xn.value.data();
    const BaseFloat *g = self.grad.data();
    BaseFloat *dx = xn.Grad().data();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      dx[i] += xv[i] > 0 ? g[i] : slope * g[i];
  });
}

Var InstanceNorm(const Var &x, BaseFloat eps) {
  const Tensor &in = x->value;
  const int planes = in.n() * in.c();
  const std::size_t area = in.shape().PlaneSize();
  if (area == 0) GAZEV_ERR << "InstanceNorm: empty spatial extent";
  Tensor out(in.shape());
  // Per plane: sigma and (sigma + eps).
  std::vector<BaseFloat> sigma(planes), denom(planes);
  for (int p = 0; p < planes; ++p) {
    const BaseFloat *src = in.data() + p * area;
    BaseFloat *dst = out.data() + p * area;
    double mean = 0;
    for (std::size_t i = 0; i < area; ++i) mean += src[i];
    mean /= area;
    double var = 0;
    for (std::size_t i = 0; i < area; ++i) {
      double d = src[i] - mean;
      var += d * d;
    }
    var /= area;
    sigma[p] = static_cast<BaseFloat>(std::sqrt(var));
    denom[p] = sigma[p] + eps;
    const BaseFloat m = static_cast<BaseFloat>(mean);
    for (std::size_t i = 0; i < area; ++i) dst[i] = (src[i] - m) / denom[p];
  }
  return MakeOp(std::move(out), {x},
                [planes, area, sigma = std::move(sigma),
                 denom = std::move(denom)](Node &self) {
    // y = d / D with d = x - mean, D = sigma + eps, dsigma/dx_i = d_i/(A sigma)
    Node &xn = *self.inputs[0];
    Tensor &dx = xn.Grad();
    for (int p = 0; p < planes; ++p) {
      const BaseFloat *y = self.value.data() + p * area;
      const BaseFloat *g = self.grad.data() + p * area;
      BaseFloat *out = dx.data() + p * area;
      double g_mean = 0, g_dot_y = 0;
      for (std::size_t i = 0; i < area; ++i) {
        g_mean += g[i];
        g_dot_y += static_cast<double>(g[i]) * y[i];
      }
      g_mean /= area;
      const double inv_d = 1.0 / denom[p];
      // sum_j g_j d_j / D^2 * d_i / (A sigma) = g_dot_y * y_i * D / (A sigma D)
      const double coupling =
          sigma[p] > 0 ? g_dot_y * denom[p] / (area * sigma[p]) * inv_d : 0.0;
      for (std::size_t i = 0; i < area; ++i)
        out[i] += static_cast<BaseFloat>((g[i] - g_mean) * inv_d -
                                         coupling * y[i]);
    }
  });
}

Var ChannelAffine(const Var &x, const Var &scale, const Var &shift) {
  const Tensor &in = x->value;
  const int batch = in.n(), channels = in.c();
  const std::size_t area = in.shape().PlaneSize();
  for (const Var *p : {&scale, &shift}) {
    const Tensor &t = (*p)->value;
    if (t.c() != channels || (t.n() != 1 && t.n() != batch) ||
        t.h() * t.w() != 1)
      GAZEV_ERR << "ChannelAffine: bad modulation shape " << t.shape().ToString()
                << " for input " << in.shape().ToString();
  }
  const bool scale_bcast = scale->value.n() == 1;
  const bool shift_bcast = shift->value.n() == 1;
  Tensor out(in.shape());
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < channels; ++c) {
      BaseFloat a = scale->value[(scale_bcast ? 0 : n) * channels + c];
      BaseFloat b = shift->value[(shift_bcast ? 0 : n) * channels + c];
      const BaseFloat *src = in.Plane(n, c);
      BaseFloat *dst = out.Plane(n, c);
      for (std::size_t i = 0; i < area; ++i) dst[i] = a * src[i] + b;
    }
  }
  return MakeOp(std::move(out), {x, scale, shift},
                [=](Node &self) {
    Node &xn = *self.inputs[0];
    Node &sn = *self.inputs[1];
    Node &bn = *self.inputs[2];
    for (int n = 0; n < batch; ++n) {
      for (int c = 0; c < channels; ++c) {
        std::size_t si = (scale_bcast ? 0 : n) * channels + c;
        std::size_t bi = (shift_bcast ? 0 : n) * channels + c;
        const BaseFloat *g = self.grad.Plane(n, c);
        const BaseFloat *xv = xn.value.Plane(n, c);
        if (sn.requires_grad) {
          double acc = 0;
          for (std::size_t i = 0; i < area; ++i)
            acc += static_cast<double>(g[i]) * xv[i];
          sn.Grad()[si] += static_cast<BaseFloat>(acc);
        }
        if (bn.requires_grad) {
          double acc = 0;
          for (std::size_t i = 0; i < area; ++i) acc += g[i];
          bn.Grad()[bi] += static_cast<BaseFloat>(acc);
        }
        if (xn.requires_grad) {
          BaseFloat a = sn.value[si];
          BaseFloat *dx = xn.Grad().Plane(n, c);
          for (std::size_t i = 0; i < area; ++i) dx[i] += a * g[i];
        }
      }
    }
  });
}

Var Add(const Var &a, const Var &b) {
  CheckSameShape(a->value, b->value, "Add");
  Tensor out = a->value;
  out.AddScaled(b->value);
  return MakeOp(std::move(out), {a, b}, [](Node &self) {
    for (auto &in : self.inputs)
      if (in->requires_grad) in->Grad().AddScaled(self.grad);
  });
}

Var Scale(const Var &x, BaseFloat factor) {
  Tensor out = x->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  return MakeOp(std::move(out), {x}, [factor](Node &self) {
    self.inputs[0]->Grad().AddScaled(self.grad, factor);
  });
}

Var UpsampleNearest2x(const Var &x) {
  const Tensor &in = x->value;
  const int planes = in.n() * in.c(), h = in.h(), w = in.w();
  Tensor out(in.n(), in.c(), 2 * h, 2 * w);
  for (int p = 0; p < planes; ++p) {
    const BaseFloat *src = in.data() + static_cast<std::size_t>(p) * h * w;
    BaseFloat *dst = out.data() + static_cast<std::size_t>(p) * 4 * h * w;
    for (int i = 0; i < 2 * h; ++i)
      for (int j = 0; j < 2 * w; ++j) dst[i * 2 * w + j] = src[(i / 2) * w + j / 2];
  }
  return MakeOp(std::move(out), {x}, [planes, h, w](Node &self) {
    Tensor &dx = self.inputs[0]->Grad();
    for (int p = 0; p < planes; ++p) {
      const BaseFloat *g = self.grad.data() + static_cast<std::size_t>(p) * 4 * h * w;
      BaseFloat *dst = dx.data() + static_cast<std::size_t>(p) * h * w;
      for (int i = 0; i < 2 * h; ++i)
        for (int j = 0; j < 2 * w; ++j) dst[(i / 2) * w + j / 2] += g[i * 2 * w + j];
    }
  });
}

Var AvgPool2x2(const Var &x) {
  const Tensor &in = x->value;
  if (in.h() % 2 || in.w() % 2)
    GAZEV_ERR << "AvgPool2x2 needs even spatial size, got "
              << in.shape().ToString();
  const int planes = in.n() * in.c(), oh = in.h() / 2, ow = in.w() / 2;
  const int w = in.w();
  Tensor out(in.n(), in.c(), oh, ow);
  for (int p = 0; p < planes; ++p) {
    const BaseFloat *src = in.data() + static_cast<std::size_t>(p) * 4 * oh * ow;
    BaseFloat *dst = out.data() + static_cast<std::size_t>(p) * oh * ow;
    for (int i = 0; i < oh; ++i)
      for (int j = 0; j < ow; ++j)
        dst[i * ow + j] = BaseFloat(0.25) *
                          (src[2 * i * w + 2 * j] + src[2 * i * w + 2 * j + 1] +
                           src[(2 * i + 1) * w + 2 * j] +
                           src[(2 * i + 1) * w + 2 * j + 1]);
  }
  return MakeOp(std::move(out), {x}, [planes, oh, ow, w](Node &self) {
    Tensor &dx = self.inputs[0]->Grad();
    for (int p = 0; p < planes; ++p) {
      const BaseFloat *g = self.grad.data() + static_cast<std::size_t>(p) * oh * ow;
      BaseFloat *dst = dx.data() + static_cast<std::size_t>(p) * 4 * oh * ow;
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
          BaseFloat v = BaseFloat(0.25) * g[i * ow + j];
          dst[2 * i * w + 2 * j] += v;
          dst[2 * i * w + 2 * j + 1] += v;
          dst[(2 * i + 1) * w + 2 * j] += v;
          dst[(2 * i + 1) * w + 2 * j + 1] += v;
        }
    }
  });
}

Var GlobalAvgPool(const Var &x) {
  const Tensor &in = x->value;
  const int planes = in.n() * in.c();
  const std::size_t area = in.shape().PlaneSize();
  Tensor out(in.n(), in.c(), 1, 1);
  for (int p = 0; p < planes; ++p) {
    double sum = 0;
    const BaseFloat *src = in.data() + p * area;
    for (std::size_t i = 0; i < area; ++i) sum += src[i];
    out[p] = static_cast<BaseFloat>(sum / area);
  }
  return MakeOp(std::move(out), {x}, [planes, area](Node &self) {
    Tensor &dx = self.inputs[0]->Grad();
    for (int p = 0; p < planes; ++p) {
      BaseFloat v = self.grad[p] / static_cast<BaseFloat>(area);
      BaseFloat *dst = dx.data() + p * area;
      for (std::size_t i = 0; i < area; ++i) dst[i] += v;
    }
  });
}

Var ConcatCode(const Var &x, const Var &code) {
  const Tensor &in = x->value;
  const Tensor &cv = code->value;
  if (cv.n() != in.n() || cv.h() * cv.w() != 1)
    GAZEV_ERR << "ConcatCode: code " << cv.shape().ToString()
              << " incompatible with " << in.shape().ToString();
  const int batch = in.n(), channels = in.c(), k = cv.c();
  const std::size_t area = in.shape().PlaneSize();
  Tensor out(batch, channels + k, in.h(), in.w());
  for (int n = 0; n < batch; ++n) {
    std::copy(in.Sample(n), in.Sample(n) + channels * area, out.Sample(n));
    for (int j = 0; j < k; ++j) {
      BaseFloat *dst = out.Plane(n, channels + j);
      std::fill(dst, dst + area, cv[n * k + j]);
    }
  }
  return MakeOp(std::move(out), {x, code}, [=](Node &self) {
    Node &xn = *self.inputs[0];
    Node &cn = *self.inputs[1];
    for (int n = 0; n < batch; ++n) {
      if (xn.requires_grad) {
        const BaseFloat *g = self.grad.Sample(n);
        BaseFloat *dx = xn.Grad().Sample(n);
        for (std::size_t i = 0; i < channels * area; ++i) dx[i] += g[i];
      }
      if (cn.requires_grad) {
        for (int j = 0; j < k; ++j) {
          const BaseFloat *g = self.grad.Plane(n, channels + j);
          double acc = 0;
          for (std::size_t i = 0; i < area; ++i) acc += g[i];
          cn.Grad()[n * k + j] += static_cast<BaseFloat>(acc);
        }
      }
    }
  });
}

Var BceWithLogits(const Var &logits, BaseFloat target) {
  const Tensor &l = logits->value;
  if (!l.AllFinite()) GAZEV_ERR << "BceWithLogits: non-finite logits";
  double sum = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    sum += Softplus(l[i]) - target * l[i];
  Tensor out(1, 1, 1, 1, static_cast<BaseFloat>(sum / l.size()));
  return MakeOp(std::move(out), {logits}, [target](Node &self) {
    Node &ln = *self.inputs[0];
    const std::size_t count = ln.value.size();
    BaseFloat g = self.grad[0] / static_cast<BaseFloat>(count);
    Tensor &dl = ln.Grad();
    for (std::size_t i = 0; i < count; ++i)
      dl[i] += g * (Sigmoid(ln.value[i]) - target);
  });
}

Var SoftmaxCrossEntropy(const Var &logits, const std::vector<int> &labels) {
  const Tensor &l = logits->value;
  const int batch = l.n(), classes = l.c() * l.h() * l.w();
  if (static_cast<int>(labels.size()) != batch)
    GAZEV_ERR << "SoftmaxCrossEntropy: " << labels.size() << " labels for batch "
              << batch;
  Tensor probs(batch, classes, 1, 1);
  double total = 0;
  for (int n = 0; n < batch; ++n) {
    if (labels[n] < 0 || labels[n] >= classes)
      GAZEV_ERR << "SoftmaxCrossEntropy: label " << labels[n]
                << " outside [0, " << classes << ")";
    const BaseFloat *row = l.data() + n * classes;
    BaseFloat mx = *std::max_element(row, row + classes);
    double z = 0;
    for (int k = 0; k < classes; ++k) z += std::exp(static_cast<double>(row[k] - mx));
    for (int k = 0; k < classes; ++k)
      probs[n * classes + k] = static_cast<BaseFloat>(std::exp(row[k] - mx) / z);
    total += std::log(z) + mx - row[labels[n]];
  }
  Tensor out(1, 1, 1, 1, static_cast<BaseFloat>(total / batch));
  return MakeOp(std::move(out), {logits},
                [=, probs = std::move(probs)](Node &self) {
    Tensor &dl = self.inputs[0]->Grad();
    BaseFloat g = self.grad[0] / static_cast<BaseFloat>(batch);
    for (int n = 0; n < batch; ++n)
      for (int k = 0; k < classes; ++k)
        dl[n * classes + k] +=
            g * (probs[n * classes + k] - (k == labels[n] ? 1 : 0));
  });
}

Var MeanAbsDiff(const Var &a, const Var &b) {
  CheckSameShape(a->value, b->value, "MeanAbsDiff");
  const std::size_t count = a->value.size();
  double sum = 0;
  for (std::size_t i = 0; i < count; ++i)
    sum += std::abs(a->value[i] - b->value[i]);
  Tensor out(1, 1, 1, 1, static_cast<BaseFloat>(sum / count));
  return MakeOp(std::move(out), {a, b}, [count](Node &self) {
    Node &an = *self.inputs[0];
    Node &bn = *self.inputs[1];
    BaseFloat g = self.grad[0] / static_cast<BaseFloat>(count);
    for (std::size_t i = 0; i < count; ++i) {
      BaseFloat d = an.value[i] - bn.value[i];
      BaseFloat s = d > 0 ? g : (d < 0 ? -g : 0);
      if (s == 0) continue;
      if (an.requires_grad) an.Grad()[i] += s;
      if (bn.requires_grad) bn.Grad()[i] -= s;
    }
  });
}

Var MinScalar(const Var &x, BaseFloat cap) {
  if (x->value.size() != 1) GAZEV_ERR << "MinScalar expects a scalar";
  BaseFloat v = x->value[0];
  Tensor out(1, 1, 1, 1, std::min(v, cap));
  const bool pass = v < cap;
  return MakeOp(std::move(out), {x}, [pass](Node &self) {
    if (pass) self.inputs[0]->Grad()[0] += self.grad[0];
  });
}

Var WeightedSum(const std::vector<std::pair<BaseFloat, Var>> &terms) {
  double sum = 0;
  std::vector<Var> inputs;
  std::vector<BaseFloat> weights;
  for (const auto &[weight, term] : terms) {
    if (term->value.size() != 1) GAZEV_ERR << "WeightedSum expects scalars";
    sum += static_cast<double>(weight) * term->value[0];
    inputs.push_back(term);
    weights.push_back(weight);
  }
  Tensor out(1, 1, 1, 1, static_cast<BaseFloat>(sum));
  return MakeOp(std::move(out), std::move(inputs),
                [weights = std::move(weights)](Node &self) {
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (self.inputs[i]->requires_grad)
        self.inputs[i]->Grad()[0] += weights[i] * self.grad[0];
  });
}

BaseFloat ScalarValue(const Var &v) {
  if (v->value.size() != 1)
    GAZEV_ERR << "Not a scalar: " << v->value.shape().ToString();
  return v->value[0];
}

}  // namespace gazev
