// gazev/config.h

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

#ifndef GAZEV_CONFIG_H_
#define GAZEV_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gazev/base.h"

namespace gazev {

/// Flat key=value configuration with namespaced keys (corpus.root,
/// train.batch_size, ...). Only keys present in the default table are
/// accepted, so a typo in a config file or flag is an error rather than a
/// silently ignored setting.
class Config {
 public:
  struct Entry {
    std::string key, value, help;
  };

  /// Every recognised key with its default value.
  static Config Defaults();
  static const std::vector<Entry> &Table();

  /// Reads "key = value" lines; '#' starts a comment.
  void ReadFile(const std::string &path);
  void Set(const std::string &key, const std::string &value);
  bool Has(const std::string &key) const;

  std::string GetString(const std::string &key) const;
  int GetInt(const std::string &key) const;
  std::int64_t GetInt64(const std::string &key) const;
  double GetDouble(const std::string &key) const;
  bool GetBool(const std::string &key) const;

  const std::map<std::string, std::string> &values() const { return values_; }
  /// Same format as ReadFile accepts.
  std::string ToText() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gazev

#endif  // GAZEV_CONFIG_H_
