// base.cc

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

#include "gazev/base.h"

#include <exception>
#include <iostream>
#include <mutex>

namespace gazev {

namespace {
std::mutex g_log_mutex;
LogHandler g_log_handler;
}  // namespace

void SetLogHandler(LogHandler handler) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_handler = std::move(handler);
}

MessageLogger::MessageLogger(LogSeverity severity, const char *func,
                             const char *file, int line)
    : severity_(severity), func_(func) {
  (void)file;
  (void)line;
}

MessageLogger::~MessageLogger() noexcept(false) {
  std::string msg = stream_.str();
  if (severity_ == LogSeverity::kError) {
    if (std::uncaught_exceptions() > 0) {
      std::cerr << "ERROR (" << func_ << "): " << msg << std::endl;
      return;
    }
    throw GazevError(std::string(func_) + ": " + msg);
  }
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_log_handler) {
    g_log_handler(severity_, msg);
    return;
  }
  const char *tag = severity_ == LogSeverity::kWarning ? "WARNING" : "LOG";
  std::cerr << tag << " (" << func_ << ") " << msg << std::endl;
}

}  // namespace gazev
