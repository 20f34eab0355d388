// gazev/base.h

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

#ifndef GAZEV_BASE_H_
#define GAZEV_BASE_H_

#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gazev {

// Network arithmetic precision. The gradient-check build flips this to
// double; everything else (vocoder features, statistics) is double already.
#if defined(GAZEV_DOUBLE_PRECISION) && GAZEV_DOUBLE_PRECISION != 0
typedef double BaseFloat;
#else
typedef float BaseFloat;
#endif

class GazevError : public std::runtime_error {
 public:
  explicit GazevError(const std::string &what) : std::runtime_error(what) {}
};

enum class LogSeverity { kInfo, kWarning, kError };

/// Replaces the stderr sink for info and warning messages. Passing an empty
/// function restores the default. Used by tests to capture warnings.
using LogHandler = std::function<void(LogSeverity, const std::string &)>;
void SetLogHandler(LogHandler handler);

class MessageLogger {
 public:
  MessageLogger(LogSeverity severity, const char *func, const char *file,
                int line);
  // Throws GazevError for kError.
  ~MessageLogger() noexcept(false);
  std::ostream &stream() { return stream_; }

 private:
  LogSeverity severity_;
  const char *func_;
  std::ostringstream stream_;
};

}  // namespace gazev

#define GAZEV_ERR                                                       \
  ::gazev::MessageLogger(::gazev::LogSeverity::kError, __func__, __FILE__, \
                         __LINE__).stream()
#define GAZEV_WARN                                                        \
  ::gazev::MessageLogger(::gazev::LogSeverity::kWarning, __func__, __FILE__, \
                         __LINE__).stream()
#define GAZEV_LOG                                                      \
  ::gazev::MessageLogger(::gazev::LogSeverity::kInfo, __func__, __FILE__, \
                         __LINE__).stream()

#define GAZEV_ASSERT(cond)                                 \
  do {                                                     \
    if (!(cond)) GAZEV_ERR << "Assertion failed: " #cond;  \
  } while (0)

#endif  // GAZEV_BASE_H_
