// corpus.cc

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

#include "gazev/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "gazev/wav.h"
#include "json.hpp"

namespace gazev {

namespace fs = std::filesystem;

std::string GenderName(Gender g) {
  return g == Gender::kMale ? "male" : "female";
}

Gender ParseGender(const std::string &s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "m" || t == "male") return Gender::kMale;
  if (t == "f" || t == "female") return Gender::kFemale;
  GAZEV_ERR << "Unknown gender '" << s << "' (expected m/f/male/female)";
  return Gender::kMale;
}

const SpeakerRecord &CorpusIndex::Speaker(int numeric_id) const {
  if (numeric_id < 1 || numeric_id > n())
    GAZEV_ERR << "Speaker id " << numeric_id << " outside 1.." << n();
  return speakers[numeric_id - 1];
}

const SpeakerRecord *CorpusIndex::Find(const std::string &speaker_id) const {
  for (const SpeakerRecord &s : speakers)
    if (s.speaker_id == speaker_id) return &s;
  return nullptr;
}

bool CorpusIndex::operator==(const CorpusIndex &other) const {
  if (sample_rate != other.sample_rate || source != other.source ||
      speakers.size() != other.speakers.size())
    return false;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    const SpeakerRecord &a = speakers[i], &b = other.speakers[i];
    if (a.speaker_id != b.speaker_id || a.numeric_id != b.numeric_id ||
        a.gender != b.gender || a.utterance_paths != b.utterance_paths)
      return false;
  }
  return true;
}

namespace {

bool IsGenderToken(const std::string &s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return t == "m" || t == "f" || t == "male" || t == "female";
}

struct Metadata {
  std::map<std::string, Gender> gender;
  bool synthetic = false;
};

Metadata ReadMetadata(const std::string &path) {
  std::ifstream in(path);
  if (!in) GAZEV_ERR << "Cannot open speaker metadata " << path;
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      if (line.find("source: synthetic") != std::string::npos)
        meta.synthetic = true;
      continue;
    }
    std::istringstream is(line);
    std::vector<std::string> tok;
    for (std::string t; is >> t;) tok.push_back(t);
    if (tok.size() < 2) continue;
    // VCTK rows are "ID AGE GENDER ..."; take the first gender-like token.
    auto it = std::find_if(tok.begin() + 1, tok.end(), IsGenderToken);
    if (it == tok.end()) continue;  // header or malformed row
    Gender g = ParseGender(*it);
    meta.gender[tok[0]] = g;
    bool numeric = std::all_of(tok[0].begin(), tok[0].end(),
                               [](unsigned char c) { return std::isdigit(c); });
    if (numeric) meta.gender["p" + tok[0]] = g;
  }
  return meta;
}

std::vector<std::string> ListWavs(const fs::path &dir) {
  std::vector<std::string> wavs;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") wavs.push_back(entry.path().string());
  }
  std::sort(wavs.begin(), wavs.end());
  return wavs;
}

}  // namespace

CorpusIndex LoadCorpus(const std::string &root, const std::string &metadata) {
  if (!fs::is_directory(root)) GAZEV_ERR << "Corpus root " << root << " is not a directory";
  std::vector<std::pair<std::string, std::vector<std::string>>> found;
  for (const auto &entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    std::vector<std::string> wavs = ListWavs(entry.path());
    if (!wavs.empty()) found.emplace_back(entry.path().filename().string(), wavs);
  }
  if (found.empty()) GAZEV_ERR << "no speakers found under " << root;
  std::sort(found.begin(), found.end());

  std::string meta_path =
      metadata.empty() ? (fs::path(root) / "speaker-info.txt").string() : metadata;
  Metadata meta = ReadMetadata(meta_path);

  CorpusIndex index;
  index.source = meta.synthetic ? CorpusSource::kSynthetic : CorpusSource::kReal;
  for (auto &[id, wavs] : found) {
    auto g = meta.gender.find(id);
    if (g == meta.gender.end())
      GAZEV_ERR << "Speaker '" << id << "' has no gender entry in " << meta_path;
    SpeakerRecord rec;
    rec.speaker_id = id;
    rec.numeric_id = static_cast<int>(index.speakers.size()) + 1;
    rec.gender = g->second;
    for (const std::string &path : wavs) {
      try {
        Waveform w = ReadWav(path);
        if (index.sample_rate == 0) index.sample_rate = w.sample_rate;
        rec.utterance_paths.push_back(path);
      } catch (const GazevError &e) {
        GAZEV_WARN << "Skipping unreadable audio " << path << ": " << e.what();
      }
    }
    if (rec.utterance_paths.empty())
      GAZEV_ERR << "Speaker '" << id << "' has no readable audio files";
    index.speakers.push_back(std::move(rec));
  }
  return index;
}

SplitConfig SplitConfig::FromConfig(const Config &config) {
  SplitConfig c;
  c.train = config.GetInt("split.train");
  c.seen = config.GetInt("split.seen");
  c.unseen = config.GetInt("split.unseen");
  c.test_utterances = config.GetInt("split.test_utterances");
  c.seed = static_cast<std::uint64_t>(config.GetInt64("split.seed"));
  return c;
}

std::vector<int> SplitPlan::TestSpeakers() const {
  std::vector<int> ids(seen_test.begin(), seen_test.end());
  ids.insert(ids.end(), unseen_test.begin(), unseen_test.end());
  return ids;
}

void SplitPlan::Check(const CorpusIndex &index) const {
  for (int id : seen_test)
    if (!IsTrain(id)) GAZEV_ERR << "Seen test speaker " << id << " is not a training speaker";
  for (int id : unseen_test)
    if (IsTrain(id)) GAZEV_ERR << "Unseen test speaker " << id << " is a training speaker";
  auto all = train_speakers;
  all.insert(unseen_test.begin(), unseen_test.end());
  for (int id : all) index.Speaker(id);
  for (const std::set<int> *set : {&seen_test, &unseen_test}) {
    int male = 0;
    for (int id : *set) male += index.Speaker(id).gender == Gender::kMale;
    int female = static_cast<int>(set->size()) - male;
    if (std::abs(male - female) > 1)
      GAZEV_ERR << "Test set gender imbalance: " << male << "M/" << female << "F";
  }
}

std::string SplitPlan::ToJson() const {
  nlohmann::json j;
  j["train_speakers"] = train_speakers;
  j["seen_test"] = seen_test;
  j["unseen_test"] = unseen_test;
  j["test_utterances"] = test_utterances;
  return j.dump();
}

SplitPlan SplitPlan::FromJson(const std::string &json) {
  SplitPlan p;
  try {
    auto j = nlohmann::json::parse(json);
    p.train_speakers = j.at("train_speakers").get<std::set<int>>();
    p.seen_test = j.at("seen_test").get<std::set<int>>();
    p.unseen_test = j.at("unseen_test").get<std::set<int>>();
    p.test_utterances = j.at("test_utterances");
  } catch (const nlohmann::json::exception &e) {
    GAZEV_ERR << "Bad split plan JSON: " << e.what();
  }
  return p;
}

SplitPlan SplitSpeakers(const CorpusIndex &index, const SplitConfig &config) {
  if (config.train < 1 || config.seen < 0 || config.unseen < 0 ||
      config.seen > config.train || config.test_utterances < 1)
    GAZEV_ERR << "Bad split sizes: train=" << config.train
              << " seen=" << config.seen << " unseen=" << config.unseen
              << " test_utterances=" << config.test_utterances;
  std::mt19937_64 rng(config.seed);
  std::vector<int> pool[2];
  for (const SpeakerRecord &s : index.speakers)
    pool[static_cast<int>(s.gender)].push_back(s.numeric_id);
  for (auto &p : pool) std::shuffle(p.begin(), p.end(), rng);

  // Odd sizes give the extra slot to the larger gender pool.
  auto per_gender = [&](int total, int already_m, int already_f) {
    int half = total / 2;
    int m = half, f = half;
    if (total % 2) {
      if (pool[0].size() - already_m >= pool[1].size() - already_f) ++m;
      else ++f;
    }
    return std::pair{m, f};
  };
  auto [um, uf] = per_gender(config.unseen, 0, 0);
  auto [sm, sf] = per_gender(config.seen, um, uf);
  int n_male = static_cast<int>(pool[0].size());
  int n_female = static_cast<int>(pool[1].size());
  if (um + sm > n_male || uf + sf > n_female ||
      config.train + config.unseen > index.n())
    GAZEV_ERR << "Infeasible split: corpus has " << n_male << "M/" << n_female
              << "F speakers; requested train=" << config.train
              << " (seen " << sm << "M/" << sf << "F) and unseen " << um << "M/"
              << uf << "F";

  SplitPlan plan;
  plan.test_utterances = config.test_utterances;
  std::size_t next[2] = {0, 0};
  auto take = [&](int g, int count, std::set<int> *dst) {
    for (int i = 0; i < count; ++i) dst->insert(pool[g][next[g]++]);
  };
  take(0, um, &plan.unseen_test);
  take(1, uf, &plan.unseen_test);
  take(0, sm, &plan.seen_test);
  take(1, sf, &plan.seen_test);
  plan.train_speakers = plan.seen_test;
  // Fill the rest of training alternating genders while both remain.
  int g = 0;
  while (static_cast<int>(plan.train_speakers.size()) < config.train) {
    if (next[g] >= pool[g].size()) g = 1 - g;
    plan.train_speakers.insert(pool[g][next[g]++]);
    g = 1 - g;
  }
  plan.Check(index);
  return plan;
}

std::vector<std::string> TrainUtterances(const SpeakerRecord &speaker,
                                         const SplitPlan &plan) {
  const auto &u = speaker.utterance_paths;
  int k = std::min<int>(plan.test_utterances, static_cast<int>(u.size()));
  return std::vector<std::string>(u.begin(), u.end() - k);
}

std::vector<std::string> TestUtterances(const SpeakerRecord &speaker,
                                        const SplitPlan &plan) {
  const auto &u = speaker.utterance_paths;
  int k = std::min<int>(plan.test_utterances, static_cast<int>(u.size()));
  return std::vector<std::string>(u.end() - k, u.end());
}

// ---------------------------------------------------------------------------
// Synthetic corpus: a cascade formant synthesizer.

SynthConfig SynthConfig::FromConfig(const Config &config) {
  SynthConfig c;
  c.speakers = config.GetInt("synth.speakers");
  c.utterances = config.GetInt("synth.utterances");
  c.min_seconds = config.GetDouble("synth.min_seconds");
  c.max_seconds = config.GetDouble("synth.max_seconds");
  c.seed = static_cast<std::uint64_t>(config.GetInt64("synth.seed"));
  c.sample_rate = config.GetInt("features.sample_rate");
  return c;
}

namespace {

constexpr double kSynthFrameSeconds = 0.005;

// Male F0 means sit inside [90,140] Hz and female inside [180,260] Hz once
// the +-6.5% intonation is applied.
constexpr double kMaleF0[2] = {104, 126};
constexpr double kFemaleF0[2] = {198, 238};
constexpr double kMaleScale[2] = {0.85, 0.97};
constexpr double kFemaleScale[2] = {1.08, 1.22};

struct Vowel {
  double f1, f2, f3;
};
constexpr Vowel kVowels[] = {{730, 1090, 2440}, {530, 1840, 2480},
                             {270, 2290, 3010}, {570, 840, 2410},
                             {300, 870, 2240},  {660, 1720, 2410},
                             {490, 1350, 1690}};
constexpr Vowel kFricative = {1800, 3200, 4700};

struct Unit {
  double start, end;
  bool voiced;
  Vowel target;
  double gain;
};

struct Content {
  double seconds;
  std::vector<Unit> units;
  double phase;  // intonation phase
};

std::mt19937_64 SeededRng(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t item) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(item)};
  return std::mt19937_64(seq);
}

// Shared across speakers: utterance u has the same content for everyone.
Content MakeContent(const SynthConfig &config, int utterance) {
  std::mt19937_64 rng = SeededRng(config.seed, 0x636f6e74, utterance);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Content c;
  c.seconds = config.min_seconds +
              (config.max_seconds - config.min_seconds) * unit(rng);
  c.phase = 2 * std::numbers::pi * unit(rng);
  double t = 0;
  while (t < c.seconds) {
    Unit u;
    u.start = t;
    u.end = std::min(c.seconds, t + 0.08 + 0.14 * unit(rng));
    u.voiced = unit(rng) > 0.15 || t == 0;
    u.target = u.voiced ? kVowels[rng() % std::size(kVowels)] : kFricative;
    u.gain = 0.6 + 0.4 * unit(rng);
    c.units.push_back(u);
    t = u.end;
  }
  return c;
}

double Intonation(const Content &c, double t) {
  return 1 + 0.05 * std::sin(2 * std::numbers::pi * 1.3 * t / c.seconds + c.phase) +
         0.03 * (0.5 - t / c.seconds);
}

// Two-pole resonator with unity gain at DC.
struct Resonator {
  double a = 1, b = 0, c = 0, y1 = 0, y2 = 0;
  void Set(double freq, double bw, double fs) {
    double r = std::exp(-std::numbers::pi * bw / fs);
    c = -r * r;
    b = 2 * r * std::cos(2 * std::numbers::pi * freq / fs);
    a = 1 - b - c;
  }
  double Tick(double x) {
    double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

double PolyBlep(double t, double dt) {
  if (t < dt) {
    t /= dt;
    return t + t - t * t - 1;
  }
  if (t > 1 - dt) {
    t = (t - 1) / dt;
    return t * t + t + t + 1;
  }
  return 0;
}

}  // namespace

SynthVoice MakeSynthVoice(const SynthConfig &config, int speaker) {
  if (speaker < 0 || speaker >= config.speakers)
    GAZEV_ERR << "Synthetic speaker " << speaker << " out of range";
  SynthVoice v;
  v.index = speaker;
  v.gender = speaker % 2 == 0 ? Gender::kMale : Gender::kFemale;
  int rank = speaker / 2;
  int count = v.gender == Gender::kMale ? (config.speakers + 1) / 2
                                        : config.speakers / 2;
  std::mt19937_64 rng = SeededRng(config.seed, 0x73706b72, speaker);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double *f0 = v.gender == Gender::kMale ? kMaleF0 : kFemaleF0;
  const double *scale = v.gender == Gender::kMale ? kMaleScale : kFemaleScale;
  // Vocal-tract scales are spread evenly within the gender range so that
  // speakers stay distinguishable; the rest is random.
  double slot = (rank + 0.25 + 0.5 * unit(rng)) / count;
  v.formant_scale = scale[0] + (scale[1] - scale[0]) * slot;
  v.f0_mean = f0[0] + (f0[1] - f0[0]) * unit(rng);
  v.bandwidth_scale = 0.8 + 0.5 * unit(rng);
  v.tilt = 0.05 + 0.55 * unit(rng);
  v.extra_resonance = 2000 + 1500 * unit(rng);
  v.extra_gain = 1.5 * unit(rng);
  return v;
}

SynthUtterance RenderSynthUtterance(const SynthConfig &config,
                                    const SynthVoice &voice, int utterance) {
  const double fs = config.sample_rate;
  const Content content = MakeContent(config, utterance);
  const std::size_t length = static_cast<std::size_t>(content.seconds * fs);
  std::mt19937_64 noise_rng =
      SeededRng(config.seed, 0x6e6f6973,
                static_cast<std::uint64_t>(voice.index) << 20 | utterance);
  std::normal_distribution<double> noise(0.0, 1.0);

  const double nyquist_guard = 0.45 * fs;
  const double base_bw[5] = {60, 90, 120, 180, 250};
  Resonator formants[5], extra;
  extra.Set(std::min(voice.extra_resonance * voice.formant_scale, nyquist_guard),
            150 * voice.bandwidth_scale, fs);

  SynthUtterance out;
  out.samples.resize(length);
  std::size_t unit_idx = 0;
  double phase = 0, lowpass = 0;
  const double fade = 0.03;
  const double glide = 0.03;
  for (std::size_t n = 0; n < length; ++n) {
    double t = n / fs;
    while (unit_idx + 1 < content.units.size() && t >= content.units[unit_idx].end)
      ++unit_idx;
    const Unit &u = content.units[unit_idx];
    if (n % 16 == 0) {
      Vowel from = unit_idx > 0 ? content.units[unit_idx - 1].target : u.target;
      double a = std::min(1.0, (t - u.start) / glide);
      double f[5] = {from.f1 + a * (u.target.f1 - from.f1),
                     from.f2 + a * (u.target.f2 - from.f2),
                     from.f3 + a * (u.target.f3 - from.f3), 3300, 4200};
      for (int k = 0; k < 5; ++k)
        formants[k].Set(std::min(f[k] * voice.formant_scale, nyquist_guard),
                        base_bw[k] * voice.bandwidth_scale, fs);
    }
    double excitation;
    if (u.voiced) {
      double f0 = voice.f0_mean * Intonation(content, t);
      double dt = f0 / fs;
      phase += dt;
      if (phase >= 1) phase -= 1;
      excitation = (2 * phase - 1 - PolyBlep(phase, dt)) + 0.02 * noise(noise_rng);
    } else {
      excitation = 0.3 * noise(noise_rng);
    }
    double y = excitation;
    for (Resonator &r : formants) y = r.Tick(y);
    y += voice.extra_gain * (extra.Tick(y) - y) * 0.5;
    lowpass = (1 - voice.tilt) * y + voice.tilt * lowpass;
    double env = std::min({1.0, t / fade, (content.seconds - t) / fade});
    out.samples[n] = lowpass * u.gain * std::max(0.0, env);
  }
  double peak = 0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  // A -60 dB noise floor, as in any recording, keeps the empty top of the
  // spectrum well defined for envelope analysis.
  for (double &s : out.samples)
    s = (peak > 0 ? s * 0.5 / peak : 0.0) + 5e-4 * noise(noise_rng);

  std::size_t frames =
      static_cast<std::size_t>(content.seconds / kSynthFrameSeconds) + 1;
  out.f0_track.resize(frames);
  std::size_t k = 0;
  for (std::size_t i = 0; i < frames; ++i) {
    double t = i * kSynthFrameSeconds;
    while (k + 1 < content.units.size() && t >= content.units[k].end) ++k;
    out.f0_track[i] = content.units[k].voiced && t < content.seconds
                          ? voice.f0_mean * Intonation(content, t)
                          : 0.0;
  }
  return out;
}

CorpusIndex SynthCorpus(const SynthConfig &config, const std::string &root) {
  int males = (config.speakers + 1) / 2, females = config.speakers / 2;
  if (males < 2 || females < 2)
    GAZEV_ERR << "Synthetic corpus needs >= 2 speakers per gender, got "
              << males << "M/" << females << "F";
  if (config.utterances < 1 || !(config.min_seconds > 0) ||
      config.max_seconds < config.min_seconds)
    GAZEV_ERR << "Bad synthetic corpus spec: utterances=" << config.utterances
              << " seconds=[" << config.min_seconds << ","
              << config.max_seconds << "]";
  fs::create_directories(root);
  // Clear speakers left over from an earlier synthetic run.
  fs::path info = fs::path(root) / "speaker-info.txt";
  if (fs::exists(info) && ReadMetadata(info.string()).synthetic) {
    for (const auto &entry : fs::directory_iterator(root))
      if (entry.is_directory() && entry.path().filename().string().rfind("spk", 0) == 0)
        fs::remove_all(entry.path());
  }

  CorpusIndex index;
  index.source = CorpusSource::kSynthetic;
  index.sample_rate = config.sample_rate;
  std::ostringstream meta;
  meta << "# source: synthetic\n# ID GENDER\n";
  for (int s = 0; s < config.speakers; ++s) {
    char id[16];
    std::snprintf(id, sizeof(id), "spk%02d", s + 1);
    SynthVoice voice = MakeSynthVoice(config, s);
    SpeakerRecord rec;
    rec.speaker_id = id;
    rec.numeric_id = s + 1;
    rec.gender = voice.gender;
    for (int u = 0; u < config.utterances; ++u) {
      char name[32];
      std::snprintf(name, sizeof(name), "utt%03d.wav", u + 1);
      std::string path = (fs::path(root) / id / name).string();
      Waveform w;
      w.sample_rate = config.sample_rate;
      w.samples = RenderSynthUtterance(config, voice, u).samples;
      WriteWav(path, w);
      rec.utterance_paths.push_back(path);
    }
    meta << id << " " << (voice.gender == Gender::kMale ? "M" : "F") << "\n";
    index.speakers.push_back(std::move(rec));
  }
  std::ofstream(info) << meta.str();
  return index;
}

}  // namespace gazev
