// gazev/tensor.h

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

#ifndef GAZEV_TENSOR_H_
#define GAZEV_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gazev/base.h"

namespace gazev {

/// Dense 4-d shape in N x C x H x W order. Vectors are stored as N x C x 1 x 1.
struct Shape {
  int n = 0, c = 0, h = 0, w = 0;

  std::size_t Size() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t PlaneSize() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Shape &other) const = default;
  std::string ToString() const;
};

class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int c, int h, int w, BaseFloat fill = 0);
  explicit Tensor(const Shape &shape, BaseFloat fill = 0);

  const Shape &shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  BaseFloat *data() { return data_.data(); }
  const BaseFloat *data() const { return data_.data(); }
  std::span<BaseFloat> span() { return data_; }
  std::span<const BaseFloat> span() const { return data_; }

  BaseFloat &operator[](std::size_t i) { return data_[i]; }
  BaseFloat operator[](std::size_t i) const { return data_[i]; }

  BaseFloat &at(int n, int c, int h, int w) { return data_[Index(n, c, h, w)]; }
  BaseFloat at(int n, int c, int h, int w) const {
    return data_[Index(n, c, h, w)];
  }

  // Pointer to the H x W plane of (n, c).
  BaseFloat *Plane(int n, int c) { return data_.data() + Index(n, c, 0, 0); }
  const BaseFloat *Plane(int n, int c) const {
    return data_.data() + Index(n, c, 0, 0);
  }
  // Pointer to sample n (C x H x W contiguous).
  BaseFloat *Sample(int n) { return Plane(n, 0); }
  const BaseFloat *Sample(int n) const { return Plane(n, 0); }

  void Fill(BaseFloat value);
  void SetZero() { Fill(0); }
  // this += alpha * other; shapes must match.
  void AddScaled(const Tensor &other, BaseFloat alpha = 1);
  BaseFloat SumAbs() const;
  BaseFloat Norm() const;
  bool AllFinite() const;

  // Copies samples [begin, end) into a new tensor.
  Tensor Slice(int begin, int end) const;
  void Reshape(const Shape &shape);

 private:
  std::size_t Index(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) *
               shape_.w + w;
  }

  Shape shape_;
  std::vector<BaseFloat> data_;
};

}  // namespace gazev

#endif  // GAZEV_TENSOR_H_
