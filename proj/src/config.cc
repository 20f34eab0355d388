// config.cc

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

#include "gazev/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gazev {

const std::vector<Config::Entry> &Config::Table() {
  static const std::vector<Entry> table = {
      {"seed", "7", "Seed for network initialisation and batch sampling"},

      {"corpus.source", "synthetic", "synthetic or real"},
      {"corpus.root", "work/corpus", "Directory of <speaker>/<utt>.wav"},
      {"corpus.metadata", "", "Speaker table; default <root>/speaker-info.txt"},

      {"synth.speakers", "8", "Synthetic speakers (genders interleaved)"},
      {"synth.utterances", "50", "Utterances per synthetic speaker"},
      {"synth.min_seconds", "1.0", "Shortest synthetic utterance"},
      {"synth.max_seconds", "2.0", "Longest synthetic utterance"},
      {"synth.seed", "7", "Synthetic corpus seed"},

      {"split.train", "6", "Training speakers"},
      {"split.seen", "2", "Seen test speakers (subset of training)"},
      {"split.unseen", "2", "Unseen test speakers"},
      {"split.test_utterances", "4",
       "Utterances per speaker held out for evaluation"},
      {"split.seed", "7", "Speaker split seed"},

      {"features.sample_rate", "22050", "Analysis sample rate (Hz)"},
      {"features.frame_period_ms", "5", "Frame shift (ms)"},
      {"features.mcc_dim", "36", "Mel-cepstral coefficients (excl. energy)"},
      {"features.segment_frames", "256", "Frames per network segment"},
      {"features.cache_dir", "work/features", "Feature cache and statistics"},

      {"net.mode", "gazev", "gazev or stargan_baseline"},
      {"net.gen_channels", "4", "Generator entry width"},
      {"net.dis_channels", "8", "Discriminator entry width"},
      {"net.enc_channels", "4", "Speaker encoder width"},
      {"net.prior_hidden", "512", "Prior embedder hidden width"},
      {"net.prior_layers", "5", "Prior embedder hidden layers"},
      {"net.prior_dim", "16", "Prior sample dimension"},
      {"net.embed_dim", "64", "Speaker embedding dimension"},

      {"train.batch_size", "32", "Segments per batch"},
      {"train.learning_rate", "1e-4", "Adam learning rate"},
      {"train.beta1", "0.5", "Adam beta1"},
      {"train.beta2", "0.999", "Adam beta2"},
      {"train.total_steps", "2000", "Training steps"},
      {"train.checkpoint_every", "500", "Checkpoint interval (steps)"},
      {"train.log_every", "1", "Metrics row interval (steps)"},
      {"train.audit_every", "0",
       "Verify the update partition every N steps (0 = never)"},
      {"train.out_dir", "work/train", "Checkpoints, metrics and manifest"},

      {"loss.adv", "1", "Adversarial weight"},
      {"loss.cls", "10", "Classification weight"},
      {"loss.cyc", "10", "Cycle weight"},
      {"loss.id", "10", "Identity weight"},
      {"loss.spk", "10", "Speaker embedding weight"},
      {"loss.div_margin", "1", "Cap on the diversity reward"},
      {"loss.saturating_adv", "false", "Literal log(1-D) generator term"},

      {"eval.out_dir", "work/eval", "Evaluation outputs"},
      {"eval.ref_utterances", "4", "Reference utterances per speaker"},
      {"eval.sources_per_pair", "1", "Source utterances converted per pair"},
      {"eval.diversity_pairs", "10", "Prior pairs for the diversity probe"},
      {"eval.write_audio", "false", "Keep converted wavs"},
  };
  return table;
}

Config Config::Defaults() {
  Config config;
  for (const Entry &e : Table()) config.values_[e.key] = e.value;
  return config;
}

namespace {

std::string Trim(const std::string &s) {
  const char *ws = " \t\r\n";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

void Config::ReadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) GAZEV_ERR << "Cannot open config file " << path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      GAZEV_ERR << path << ":" << lineno << ": expected key = value";
    Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
}

void Config::Set(const std::string &key, const std::string &value) {
  const auto &table = Table();
  bool known = std::any_of(table.begin(), table.end(),
                           [&](const Entry &e) { return e.key == key; });
  if (!known) GAZEV_ERR << "Unknown config key '" << key << "'";
  values_[key] = value;
}

bool Config::Has(const std::string &key) const {
  return values_.count(key) != 0;
}

std::string Config::GetString(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) GAZEV_ERR << "Config key '" << key << "' not set";
  return it->second;
}

std::int64_t Config::GetInt64(const std::string &key) const {
  std::string s = GetString(key);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    GAZEV_ERR << "Config key '" << key << "': '" << s << "' is not an integer";
  return v;
}

int Config::GetInt(const std::string &key) const {
  std::int64_t v = GetInt64(key);
  if (v < INT32_MIN || v > INT32_MAX)
    GAZEV_ERR << "Config key '" << key << "' out of range: " << v;
  return static_cast<int>(v);
}

double Config::GetDouble(const std::string &key) const {
  std::string s = GetString(key);
  std::istringstream is(s);
  double v = 0;
  is >> v;
  if (!is || !is.eof())
    GAZEV_ERR << "Config key '" << key << "': '" << s << "' is not a number";
  return v;
}

bool Config::GetBool(const std::string &key) const {
  std::string s = GetString(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  GAZEV_ERR << "Config key '" << key << "': '" << s << "' is not a boolean";
  return false;
}

std::string Config::ToText() const {
  std::ostringstream os;
  for (const auto &[k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace gazev
