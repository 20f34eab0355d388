// tests/corpus-test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gazev/binary-io.h"
#include "gazev/corpus.h"
#include "gazev/features.h"
#include "gazev/wav.h"
#include "test-util.h"

namespace gazev {
namespace {

namespace fs = std::filesystem;

void WriteTone(const std::string &path, double seconds = 0.1) {
  Waveform w;
  w.sample_rate = 16000;
  for (int i = 0; i < seconds * 16000; ++i) w.samples.push_back(0.1 * std::sin(0.05 * i));
  WriteWav(path, w);
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream(path) << text;
}

TEST(LoadCorpus, EmptyDirectory) {
  TempDir dir("empty");
  try {
    LoadCorpus(dir.path().string(), "");
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("no speakers found"), std::string::npos);
  }
}

TEST(LoadCorpus, SortedIdsAndStableReload) {
  TempDir dir("load");
  for (const char *spk : {"zed", "amy", "bob"}) {
    fs::create_directories(dir.path() / spk);
    WriteTone((dir.path() / spk / "u2.wav").string());
    WriteTone((dir.path() / spk / "u1.wav").string());
  }
  WriteText(dir / "speaker-info.txt", "zed M\namy F\nbob male\n");
  CorpusIndex a = LoadCorpus(dir.path().string(), "");
  ASSERT_EQ(a.n(), 3);
  EXPECT_EQ(a.speakers[0].speaker_id, "amy");
  EXPECT_EQ(a.speakers[1].speaker_id, "bob");
  EXPECT_EQ(a.speakers[2].speaker_id, "zed");
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.speakers[i].numeric_id, i + 1);
  EXPECT_EQ(a.Speaker(1).gender, Gender::kFemale);
  EXPECT_EQ(a.Speaker(3).gender, Gender::kMale);
  EXPECT_EQ(a.sample_rate, 16000);
  EXPECT_EQ(a.source, CorpusSource::kReal);
  EXPECT_EQ(fs::path(a.Speaker(1).utterance_paths[0]).filename(), "u1.wav");
  EXPECT_TRUE(a == LoadCorpus(dir.path().string(), ""));
  EXPECT_EQ(a.Find("bob")->numeric_id, 2);
  EXPECT_EQ(a.Find("nobody"), nullptr);
}

TEST(LoadCorpus, VctkSpeakerInfo) {
  TempDir dir("vctk");
  for (const char *spk : {"p225", "p226"}) {
    fs::create_directories(dir.path() / spk);
    WriteTone((dir.path() / spk / (std::string(spk) + "_001.wav")).string());
  }
  WriteText(dir / "info.txt",
            "ID  AGE  GENDER  ACCENTS  REGION\n"
            "225  23  F    English    Southern  England\n"
            "226  22  M    English    Surrey\n");
  CorpusIndex idx = LoadCorpus(dir.path().string(), dir / "info.txt");
  EXPECT_EQ(idx.Find("p225")->gender, Gender::kFemale);
  EXPECT_EQ(idx.Find("p226")->gender, Gender::kMale);
}

TEST(LoadCorpus, MissingGenderIsFatal) {
  TempDir dir("nogender");
  fs::create_directories(dir.path() / "a");
  WriteTone((dir.path() / "a" / "x.wav").string());
  WriteText(dir / "speaker-info.txt", "b F\n");
  EXPECT_THROW(LoadCorpus(dir.path().string(), ""), GazevError);
}

TEST(LoadCorpus, UnreadableFilesSkipped) {
  TempDir dir("unreadable");
  fs::create_directories(dir.path() / "a");
  WriteTone((dir.path() / "a" / "good.wav").string());
  WriteText((dir.path() / "a" / "bad.wav").string(), "garbage");
  WriteText(dir / "speaker-info.txt", "a F\n");
  LogCapture logs;
  CorpusIndex idx = LoadCorpus(dir.path().string(), "");
  ASSERT_EQ(idx.n(), 1);
  EXPECT_EQ(idx.speakers[0].utterance_paths.size(), 1u);
  EXPECT_TRUE(logs.Contains("bad.wav"));
}

TEST(LoadCorpus, SpeakerWithoutReadableAudioIsFatal) {
  TempDir dir("noaudio");
  fs::create_directories(dir.path() / "a");
  fs::create_directories(dir.path() / "b");
  WriteTone((dir.path() / "a" / "good.wav").string());
  WriteText((dir.path() / "b" / "bad.wav").string(), "garbage");
  WriteText(dir / "speaker-info.txt", "a F\nb M\n");
  try {
    LoadCorpus(dir.path().string(), "");
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("no readable audio"), std::string::npos) << e.what();
  }
}

CorpusIndex FakeIndex(int males, int females) {
  CorpusIndex idx;
  idx.sample_rate = 22050;
  int n = males + females;
  for (int i = 0; i < n; ++i) {
    SpeakerRecord r;
    char id[16];
    std::snprintf(id, sizeof(id), "s%03d", i);
    r.speaker_id = id;
    r.numeric_id = i + 1;
    r.gender = i < males ? Gender::kMale : Gender::kFemale;
    r.utterance_paths = {"u0.wav", "u1.wav", "u2.wav", "u3.wav", "u4.wav", "u5.wav"};
    idx.speakers.push_back(r);
  }
  return idx;
}

int CountGender(const CorpusIndex &idx, const std::set<int> &ids, Gender g) {
  int c = 0;
  for (int id : ids) c += idx.Speaker(id).gender == g;
  return c;
}

TEST(SplitSpeakers, VctkScale) {
  CorpusIndex idx = FakeIndex(47, 62);  // VCTK: 109 speakers
  SplitConfig cfg;
  cfg.train = 80;
  cfg.seen = 10;
  cfg.unseen = 10;
  SplitPlan p = SplitSpeakers(idx, cfg);
  EXPECT_EQ(p.train_speakers.size(), 80u);
  EXPECT_EQ(p.seen_test.size(), 10u);
  EXPECT_EQ(p.unseen_test.size(), 10u);
  for (const auto *set : {&p.seen_test, &p.unseen_test}) {
    EXPECT_EQ(CountGender(idx, *set, Gender::kMale), 5);
    EXPECT_EQ(CountGender(idx, *set, Gender::kFemale), 5);
  }
  EXPECT_EQ(p.TestSpeakers().size(), 20u);
}

TEST(SplitSpeakers, DeskScale) {
  CorpusIndex idx = FakeIndex(4, 4);
  SplitConfig cfg;  // 6 / 2 / 2
  SplitPlan p = SplitSpeakers(idx, cfg);
  EXPECT_EQ(p.train_speakers.size(), 6u);
  for (const auto *set : {&p.seen_test, &p.unseen_test}) {
    ASSERT_EQ(set->size(), 2u);
    EXPECT_EQ(CountGender(idx, *set, Gender::kMale), 1);
  }
  EXPECT_EQ(SplitSpeakers(idx, cfg), p);
  EXPECT_EQ(SplitPlan::FromJson(p.ToJson()), p);
}

TEST(SplitSpeakers, Infeasible) {
  CorpusIndex idx = FakeIndex(3, 3);
  SplitConfig cfg;
  cfg.train = 2;
  cfg.seen = 0;
  cfg.unseen = 10;
  try {
    SplitSpeakers(idx, cfg);
    FAIL();
  } catch (const GazevError &e) {
    EXPECT_NE(std::string(e.what()).find("3M/3F"), std::string::npos) << e.what();
  }
}

// Property: random feasible configurations always satisfy the invariants.
TEST(SplitSpeakers, InvariantsOverRandomConfigs) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int males = 2 + rng() % 20, females = 2 + rng() % 20;
    CorpusIndex idx = FakeIndex(males, females);
    SplitConfig cfg;
    cfg.seed = rng();
    cfg.unseen = 2 * (rng() % 3);
    cfg.train = 1 + rng() % (idx.n() - 1);
    cfg.seen = 2 * (rng() % 3);
    if (cfg.seen > cfg.train) cfg.seen = cfg.train - cfg.train % 2;
    SplitPlan p;
    try {
      p = SplitSpeakers(idx, cfg);
    } catch (const GazevError &) {
      continue;  // infeasible request
    }
    ++checked;
    for (int id : p.seen_test) EXPECT_TRUE(p.IsTrain(id));
    for (int id : p.unseen_test) EXPECT_FALSE(p.IsTrain(id));
    EXPECT_EQ(static_cast<int>(p.train_speakers.size()), cfg.train);
    EXPECT_EQ(CountGender(idx, p.seen_test, Gender::kMale),
              CountGender(idx, p.seen_test, Gender::kFemale));
    EXPECT_EQ(CountGender(idx, p.unseen_test, Gender::kMale),
              CountGender(idx, p.unseen_test, Gender::kFemale));
  }
  EXPECT_GT(checked, 100);
}

TEST(SplitSpeakers, HeldOutUtterances) {
  CorpusIndex idx = FakeIndex(2, 2);
  SplitPlan p;
  p.test_utterances = 2;
  auto train = TrainUtterances(idx.speakers[0], p);
  auto test = TestUtterances(idx.speakers[0], p);
  EXPECT_EQ(train, (std::vector<std::string>{"u0.wav", "u1.wav", "u2.wav", "u3.wav"}));
  EXPECT_EQ(test, (std::vector<std::string>{"u4.wav", "u5.wav"}));
}

TEST(SynthVoice, GenderBands) {
  SynthConfig cfg;
  for (int k = 0; k < cfg.speakers; ++k) {
    SynthVoice v = MakeSynthVoice(cfg, k);
    if (k % 2 == 0) {
      EXPECT_EQ(v.gender, Gender::kMale);
      EXPECT_GE(v.f0_mean, 90);
      EXPECT_LE(v.f0_mean, 140);
    } else {
      EXPECT_EQ(v.gender, Gender::kFemale);
      EXPECT_GE(v.f0_mean, 180);
      EXPECT_LE(v.f0_mean, 260);
    }
  }
}

TEST(SynthCorpus, DeterministicBitIdentical) {
  TempDir a("synth-a"), b("synth-b");
  SynthConfig cfg;
  cfg.speakers = 4;
  cfg.utterances = 3;
  CorpusIndex ia = SynthCorpus(cfg, a.path().string());
  CorpusIndex ib = SynthCorpus(cfg, b.path().string());
  ASSERT_EQ(ia.n(), 4);
  EXPECT_EQ(ia.source, CorpusSource::kSynthetic);
  for (int s = 1; s <= 4; ++s)
    for (int u = 0; u < 3; ++u)
      EXPECT_EQ(ReadFileBytes(ia.Speaker(s).utterance_paths[u]),
                ReadFileBytes(ib.Speaker(s).utterance_paths[u]));
  SynthConfig other = cfg;
  other.seed = 8;
  SynthCorpus(other, b.path().string());
  EXPECT_NE(ReadFileBytes(ia.Speaker(1).utterance_paths[0]),
            ReadFileBytes(ib.Speaker(1).utterance_paths[0]));
}

TEST(SynthCorpus, FullDeskCorpusCount) {
  TempDir dir("synth-full");
  SynthConfig cfg;  // 8 speakers x 50 utterances
  CorpusIndex idx = SynthCorpus(cfg, dir.path().string());
  EXPECT_EQ(idx.n(), 8);
  int files = 0;
  for (const auto &e : fs::recursive_directory_iterator(dir.path()))
    files += e.path().extension() == ".wav";
  EXPECT_EQ(files, 400);
  CorpusIndex reloaded = LoadCorpus(dir.path().string(), "");
  EXPECT_TRUE(reloaded == idx);
  EXPECT_EQ(reloaded.source, CorpusSource::kSynthetic);
  for (const auto &s : idx.speakers) {
    Waveform w = ReadWav(s.utterance_paths[0]);
    EXPECT_GE(w.Seconds(), 1.0 - 1e-3);
    EXPECT_LE(w.Seconds(), 2.0 + 1e-3);
  }
}

TEST(SynthCorpus, NeedsTwoSpeakersPerGender) {
  TempDir dir("synth-small");
  SynthConfig cfg;
  cfg.speakers = 3;
  EXPECT_THROW(SynthCorpus(cfg, dir.path().string()), GazevError);
}

TEST(SynthCorpus, ContentSharedAcrossSpeakers) {
  // Same utterance index, same duration for every speaker (shared content).
  SynthConfig cfg;
  for (int u = 0; u < 5; ++u) {
    std::size_t n0 = RenderSynthUtterance(cfg, MakeSynthVoice(cfg, 0), u).samples.size();
    for (int k = 1; k < 4; ++k)
      EXPECT_EQ(RenderSynthUtterance(cfg, MakeSynthVoice(cfg, k), u).samples.size(), n0);
  }
}

// Measured mean F0 agrees with the generator's own track and with the
// gender band, for every synthetic speaker.
TEST(SynthCorpus, MeasuredF0MatchesGenderBand) {
  SynthConfig cfg;
  AnalysisParams params;
  for (int k = 0; k < cfg.speakers; ++k) {
    SynthVoice v = MakeSynthVoice(cfg, k);
    SynthUtterance u = RenderSynthUtterance(cfg, v, 3);
    Waveform w;
    w.sample_rate = cfg.sample_rate;
    w.samples = u.samples;
    VocoderFeatures f = Analyze(w, params);
    double measured = 0, truth = 0;
    int nm = 0, nt = 0;
    for (double x : f.f0)
      if (x > 0) measured += x, ++nm;
    for (double x : u.f0_track)
      if (x > 0) truth += x, ++nt;
    ASSERT_GT(nm, 0);
    measured /= nm;
    truth /= nt;
    EXPECT_NEAR(measured, truth, 0.03 * truth) << "speaker " << k;
    if (v.gender == Gender::kMale) {
      EXPECT_GE(measured, 90);
      EXPECT_LE(measured, 140);
    } else {
      EXPECT_GE(measured, 180);
      EXPECT_LE(measured, 260);
    }
  }
}

TEST(Gender, Parse) {
  EXPECT_EQ(ParseGender("M"), Gender::kMale);
  EXPECT_EQ(ParseGender("female"), Gender::kFemale);
  EXPECT_EQ(GenderName(Gender::kFemale), "female");
  EXPECT_THROW(ParseGender("x"), GazevError);
}

}  // namespace
}  // namespace gazev
