// tests/test-util.h

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

#ifndef GAZEV_TESTS_TEST_UTIL_H_
#define GAZEV_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "gazev/base.h"

namespace gazev {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("gazev-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string operator/(const std::string &name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

/// Collects warning messages (and silences info) while alive.
class LogCapture {
 public:
  LogCapture() {
    SetLogHandler([this](LogSeverity sev, const std::string &msg) {
      if (sev == LogSeverity::kWarning) warnings.push_back(msg);
    });
  }
  ~LogCapture() { SetLogHandler(nullptr); }
  bool Contains(const std::string &text) const {
    for (const auto &w : warnings)
      if (w.find(text) != std::string::npos) return true;
    return false;
  }
  std::vector<std::string> warnings;
};

}  // namespace gazev

#endif  // GAZEV_TESTS_TEST_UTIL_H_
