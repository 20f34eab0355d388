// gazev/binary-io.h

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

#ifndef GAZEV_BINARY_IO_H_
#define GAZEV_BINARY_IO_H_

#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>
#include <vector>

#include "gazev/base.h"

namespace gazev {

/// 64-bit FNV-1a.
std::uint64_t Fnv1a64(const void *data, std::size_t size,
                      std::uint64_t seed = 14695981039346656037ull);
inline std::uint64_t Fnv1a64(const std::string &s) {
  return Fnv1a64(s.data(), s.size());
}
std::string HexDigest(std::uint64_t value);

/// Native-endian byte buffer for the cache and checkpoint containers.
class BinaryWriter {
 public:
  template <typename T>
  void Put(const T &value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const char *p = reinterpret_cast<const char *>(&value);
    buffer_.append(p, sizeof(T));
  }
  template <typename T>
  void PutVector(const std::vector<T> &values) {
    static_assert(std::is_trivially_copyable_v<T>);
    Put<std::uint64_t>(values.size());
    buffer_.append(reinterpret_cast<const char *>(values.data()),
                   values.size() * sizeof(T));
  }
  void PutString(const std::string &s) {
    Put<std::uint64_t>(s.size());
    buffer_.append(s);
  }
  const std::string &buffer() const { return buffer_; }

 private:
  std::string buffer_;
};

/// Bounds-checked reader; any overrun raises GazevError naming the context.
class BinaryReader {
 public:
  BinaryReader(const char *data, std::size_t size, std::string context)
      : data_(data), size_(size), context_(std::move(context)) {}

  template <typename T>
  T Get() {
    static_assert(std::is_trivially_copyable_v<T>);
    T value;
    std::memcpy(&value, Take(sizeof(T)), sizeof(T));
    return value;
  }
  template <typename T>
  std::vector<T> GetVector() {
    std::uint64_t n = Get<std::uint64_t>();
    if (n > (size_ - pos_) / sizeof(T))
      GAZEV_ERR << context_ << ": truncated array (" << n << " elements)";
    std::vector<T> values(n);
    std::memcpy(values.data(), Take(n * sizeof(T)), n * sizeof(T));
    return values;
  }
  std::string GetString() {
    std::uint64_t n = Get<std::uint64_t>();
    if (n > size_ - pos_) GAZEV_ERR << context_ << ": truncated string";
    return std::string(Take(n), n);
  }
  std::size_t position() const { return pos_; }
  bool AtEnd() const { return pos_ == size_; }

 private:
  const char *Take(std::size_t n) {
    if (n > size_ - pos_) GAZEV_ERR << context_ << ": unexpected end of data";
    const char *p = data_ + pos_;
    pos_ += n;
    return p;
  }

  const char *data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::string ReadFileBytes(const std::string &path);
/// Writes to a temporary sibling and renames it over path, so readers see
/// either the old or the new file.
void WriteFileAtomic(const std::string &path, const std::string &bytes);

}  // namespace gazev

#endif  // GAZEV_BINARY_IO_H_
