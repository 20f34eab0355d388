// tensor.cc

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

#include "gazev/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gazev {

std::string Shape::ToString() const {
  std::ostringstream os;
  os << n << "x" << c << "x" << h << "x" << w;
  return os.str();
}

Tensor::Tensor(int n, int c, int h, int w, BaseFloat fill)
    : Tensor(Shape{n, c, h, w}, fill) {}

Tensor::Tensor(const Shape &shape, BaseFloat fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0)
    GAZEV_ERR << "Negative tensor dimension " << shape.ToString();
  data_.assign(shape.Size(), fill);
}

void Tensor::Fill(BaseFloat value) {
  std::fill(data_.begin(), data_.end(), value);
}

void Tensor::AddScaled(const Tensor &other, BaseFloat alpha) {
  if (!(other.shape_ == shape_))
    GAZEV_ERR << "Shape mismatch " << shape_.ToString() << " vs "
              << other.shape_.ToString();
  const BaseFloat *src = other.data();
  BaseFloat *dst = data();
  for (std::size_t i = 0; i < data_.size(); ++i) dst[i] += alpha * src[i];
}

BaseFloat Tensor::SumAbs() const {
  double sum = 0;
  for (BaseFloat v : data_) sum += std::abs(v);
  return static_cast<BaseFloat>(sum);
}

BaseFloat Tensor::Norm() const {
  double sum = 0;
  for (BaseFloat v : data_) sum += static_cast<double>(v) * v;
  return static_cast<BaseFloat>(std::sqrt(sum));
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](BaseFloat v) { return std::isfinite(v); });
}

Tensor Tensor::Slice(int begin, int end) const {
  if (begin < 0 || end > shape_.n || begin > end)
    GAZEV_ERR << "Bad slice [" << begin << ", " << end << ") of "
              << shape_.ToString();
  Tensor out(end - begin, shape_.c, shape_.h, shape_.w);
  std::size_t per = static_cast<std::size_t>(shape_.c) * shape_.h * shape_.w;
  std::copy(data_.begin() + begin * per, data_.begin() + end * per,
            out.data_.begin());
  return out;
}

void Tensor::Reshape(const Shape &shape) {
  if (shape.Size() != data_.size())
    GAZEV_ERR << "Cannot reshape " << shape_.ToString() << " to "
              << shape.ToString();
  shape_ = shape;
}

}  // namespace gazev
