// features.cc

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

#include "gazev/features.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "gazev/binary-io.h"
#include "json.hpp"
#include "world/cheaptrick.h"
#include "world/codec.h"
#include "world/d4c.h"
#include "world/dio.h"
#include "world/stonemask.h"
#include "world/synthesis.h"

namespace gazev {

AnalysisParams AnalysisParams::FromConfig(const Config &config) {
  AnalysisParams p;
  p.sample_rate = config.GetInt("features.sample_rate");
  p.frame_period_ms = config.GetDouble("features.frame_period_ms");
  p.mcc_dim = config.GetInt("features.mcc_dim");
  p.segment_frames = config.GetInt("features.segment_frames");
  if (p.sample_rate < 8000 || !(p.frame_period_ms > 0) || p.mcc_dim < 1 ||
      p.segment_frames < 1)
    GAZEV_ERR << "Bad analysis parameters " << p.Fingerprint();
  return p;
}

std::string AnalysisParams::Fingerprint() const {
  std::ostringstream os;
  os << "world-dio-cheaptrick-d4c sr=" << sample_rate
     << " fp=" << frame_period_ms << " mcc=" << mcc_dim;
  return os.str();
}

void VocoderFeatures::Check() const {
  const int frames = NumFrames();
  if (!(frame_period_ms > 0) || sample_rate <= 0)
    GAZEV_ERR << "Bad analysis parameters in features";
  if (static_cast<int>(energy.size()) != frames || mcc.rows() != frames ||
      ap.rows() != frames)
    GAZEV_ERR << "Frame count mismatch: f0 " << frames << ", energy "
              << energy.size() << ", mcc " << mcc.rows() << ", ap " << ap.rows();
  for (double v : f0)
    if (!(v >= 0) || !std::isfinite(v)) GAZEV_ERR << "Invalid f0 value " << v;
  for (double v : energy)
    if (!std::isfinite(v)) GAZEV_ERR << "Non-finite energy";
  if (!mcc.allFinite()) GAZEV_ERR << "Non-finite MCC";
  if (!ap.allFinite()) GAZEV_ERR << "Non-finite aperiodicity";
}

namespace {

// Row-pointer view over a FrameMatrix, as WORLD's double** interface wants.
struct RowPointers {
  std::vector<double *> rows;
  explicit RowPointers(FrameMatrix *m) : rows(m->rows()) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) rows[i] = m->row(i).data();
  }
  double **get() { return rows.data(); }
};

// WORLD codes the envelope as an orthonormal DCT of the log power spectrum
// on a mel axis. Dividing by 2*sqrt(2) gives log-amplitude cepstra, the
// units the MCD formula assumes.
const double kCodedToCepstrum = 1.0 / (2.0 * std::sqrt(2.0));

int CheapTrickFftSize(int fs) {
  CheapTrickOption option;
  InitializeCheapTrickOption(fs, &option);
  return GetFFTSizeForCheapTrick(fs, &option);
}

}  // namespace

VocoderFeatures Analyze(const Waveform &wave, const AnalysisParams &params) {
  std::vector<double> x = wave.samples;
  if (wave.sample_rate != params.sample_rate)
    x = Resample(x, wave.sample_rate, params.sample_rate);
  const int fs = params.sample_rate;
  const int x_length = static_cast<int>(x.size());
  const double frame_samples = params.frame_period_ms * fs / 1000.0;
  if (x_length < 2 * frame_samples)
    GAZEV_ERR << "Audio too short for analysis: " << x_length
              << " samples (< 2 frames)";

  DioOption dio;
  InitializeDioOption(&dio);
  dio.frame_period = params.frame_period_ms;
  dio.speed = 1;
  const int frames = GetSamplesForDIO(fs, x_length, params.frame_period_ms);
  std::vector<double> times(frames), raw_f0(frames), f0(frames);
  Dio(x.data(), x_length, fs, &dio, times.data(), raw_f0.data());
  StoneMask(x.data(), x_length, fs, times.data(), raw_f0.data(), frames,
            f0.data());

  CheapTrickOption ct;
  InitializeCheapTrickOption(fs, &ct);
  const int fft_size = GetFFTSizeForCheapTrick(fs, &ct);
  ct.fft_size = fft_size;
  const int bins = fft_size / 2 + 1;
  FrameMatrix sp(frames, bins), ap_full(frames, bins);
  RowPointers sp_rows(&sp), ap_rows(&ap_full);
  CheapTrick(x.data(), x_length, fs, times.data(), f0.data(), frames, &ct,
             sp_rows.get());
  D4COption d4c;
  InitializeD4COption(&d4c);
  D4C(x.data(), x_length, fs, times.data(), f0.data(), frames, fft_size, &d4c,
      ap_rows.get());

  const int coded_dim = params.mcc_dim + 1;
  FrameMatrix coded(frames, coded_dim);
  RowPointers coded_rows(&coded);
  CodeSpectralEnvelope(sp_rows.get(), frames, fs, fft_size, coded_dim,
                       coded_rows.get());
  const int bands = GetNumberOfAperiodicities(fs);
  VocoderFeatures out;
  out.ap.resize(frames, bands);
  RowPointers ap_coded_rows(&out.ap);
  CodeAperiodicity(ap_rows.get(), frames, fs, fft_size, ap_coded_rows.get());

  out.sample_rate = fs;
  out.frame_period_ms = params.frame_period_ms;
  out.fft_size = fft_size;
  out.f0 = std::move(f0);
  out.energy.resize(frames);
  out.mcc = coded.rightCols(params.mcc_dim) * kCodedToCepstrum;
  for (int i = 0; i < frames; ++i) out.energy[i] = coded(i, 0) * kCodedToCepstrum;
  out.Check();
  return out;
}

Waveform Synthesize(const VocoderFeatures &features) {
  features.Check();
  const int frames = features.NumFrames();
  const int fs = features.sample_rate;
  const int fft_size =
      features.fft_size > 0 ? features.fft_size : CheapTrickFftSize(fs);
  const int bins = fft_size / 2 + 1;
  const int coded_dim = static_cast<int>(features.mcc.cols()) + 1;
  if (features.ap.cols() != GetNumberOfAperiodicities(fs))
    GAZEV_ERR << "Aperiodicity has " << features.ap.cols()
              << " bands, expected " << GetNumberOfAperiodicities(fs);

  FrameMatrix coded(frames, coded_dim);
  for (int i = 0; i < frames; ++i)
    coded(i, 0) = features.energy[i] / kCodedToCepstrum;
  coded.rightCols(coded_dim - 1) = features.mcc / kCodedToCepstrum;
  FrameMatrix ap_coded = features.ap;
  FrameMatrix sp(frames, bins), ap(frames, bins);
  RowPointers coded_rows(&coded), ap_coded_rows(&ap_coded), sp_rows(&sp),
      ap_rows(&ap);
  DecodeSpectralEnvelope(coded_rows.get(), frames, fs, fft_size, coded_dim,
                         sp_rows.get());
  DecodeAperiodicity(ap_coded_rows.get(), frames, fs, fft_size, ap_rows.get());

  Waveform out;
  out.sample_rate = fs;
  const int y_length = static_cast<int>(
      std::lround(frames * features.frame_period_ms * fs / 1000.0));
  out.samples.assign(y_length, 0.0);
  Synthesis(features.f0.data(), frames, sp_rows.get(), ap_rows.get(), fft_size,
            features.frame_period_ms, fs, y_length, out.samples.data());
  for (double v : out.samples)
    if (!std::isfinite(v)) GAZEV_ERR << "Synthesis produced non-finite audio";
  return out;
}

std::vector<MccSegment> Segment(const FrameMatrix &mcc, int length, int hop,
                                SegmentMode mode, int source_speaker) {
  if (length < 1 || hop < 1) GAZEV_ERR << "Bad segment length/hop " << length << "/" << hop;
  const int frames = static_cast<int>(mcc.rows());
  const int dim = static_cast<int>(mcc.cols());
  std::vector<MccSegment> segments;
  int start = 0;
  for (; start + length <= frames; start += hop) {
    MccSegment s;
    s.values = mcc.middleRows(start, length).transpose();
    s.source_speaker = source_speaker;
    s.valid_frames = length;
    segments.push_back(std::move(s));
  }
  if (mode == SegmentMode::kInference && (start < frames || segments.empty())) {
    MccSegment s;
    s.values = FrameMatrix::Zero(dim, length);
    int valid = std::max(0, frames - start);
    if (valid > 0) s.values.leftCols(valid) = mcc.middleRows(start, valid).transpose();
    s.source_speaker = source_speaker;
    s.valid_frames = valid;
    segments.push_back(std::move(s));
  }
  return segments;
}

FrameMatrix Unsegment(const std::vector<MccSegment> &segments, int num_frames) {
  if (segments.empty()) GAZEV_ERR << "No segments to reassemble";
  const int dim = static_cast<int>(segments[0].values.rows());
  FrameMatrix out(num_frames, dim);
  int pos = 0;
  for (const MccSegment &s : segments) {
    int take = std::min<int>(static_cast<int>(s.values.cols()), num_frames - pos);
    if (take <= 0) break;
    out.middleRows(pos, take) = s.values.leftCols(take).transpose();
    pos += take;
  }
  if (pos != num_frames)
    GAZEV_ERR << "Segments cover " << pos << " frames, need " << num_frames;
  return out;
}

SpeakerStats ComputeStats(const std::vector<const VocoderFeatures *> &utts) {
  if (utts.empty()) GAZEV_ERR << "Cannot compute statistics of an empty group";
  const int dim = static_cast<int>(utts[0]->mcc.cols());
  double lsum = 0, lsq = 0;
  long voiced = 0, frames = 0;
  std::vector<double> sum(dim, 0), sq(dim, 0);
  for (const VocoderFeatures *f : utts) {
    if (f->mcc.cols() != dim) GAZEV_ERR << "MCC dimension mismatch in group";
    for (double v : f->f0)
      if (v > 0) {
        double l = std::log(v);
        lsum += l;
        lsq += l * l;
        ++voiced;
      }
    for (Eigen::Index i = 0; i < f->mcc.rows(); ++i)
      for (int d = 0; d < dim; ++d) {
        double v = f->mcc(i, d);
        sum[d] += v;
        sq[d] += v * v;
      }
    frames += f->mcc.rows();
  }
  if (voiced == 0) GAZEV_ERR << "Group has no voiced frames";
  SpeakerStats s;
  s.logf0_mean = lsum / voiced;
  s.logf0_std = std::max(
      kStatsStdFloor, std::sqrt(std::max(0.0, lsq / voiced - s.logf0_mean * s.logf0_mean)));
  s.mcc_mean.resize(dim);
  s.mcc_std.resize(dim);
  for (int d = 0; d < dim; ++d) {
    s.mcc_mean[d] = sum[d] / frames;
    s.mcc_std[d] = std::max(
        kStatsStdFloor,
        std::sqrt(std::max(0.0, sq[d] / frames - s.mcc_mean[d] * s.mcc_mean[d])));
  }
  return s;
}

std::vector<double> TransformF0(const std::vector<double> &f0,
                                const SpeakerStats &src,
                                const SpeakerStats &tgt) {
  double ratio = tgt.logf0_std / src.logf0_std;
  if (src.logf0_std <= kStatsStdFloor) {
    GAZEV_WARN << "Source log-F0 std at floor; using identity scaling";
    ratio = 1.0;
  }
  std::vector<double> out(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i)
    out[i] = f0[i] > 0
                 ? std::exp((std::log(f0[i]) - src.logf0_mean) * ratio + tgt.logf0_mean)
                 : 0.0;
  return out;
}

namespace {
constexpr char kFeatureMagic[8] = {'G', 'Z', 'V', 'F', 'E', 'A', 'T', '1'};

void PutMatrix(BinaryWriter *w, const FrameMatrix &m) {
  w->Put<std::int64_t>(m.rows());
  w->Put<std::int64_t>(m.cols());
  w->PutVector(std::vector<double>(m.data(), m.data() + m.size()));
}

FrameMatrix GetMatrix(BinaryReader *r) {
  auto rows = r->Get<std::int64_t>();
  auto cols = r->Get<std::int64_t>();
  auto data = r->GetVector<double>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
    GAZEV_ERR << "Corrupt matrix in feature file";
  return Eigen::Map<FrameMatrix>(data.data(), rows, cols);
}
}  // namespace

void SaveFeatures(const std::string &path, const VocoderFeatures &f) {
  BinaryWriter w;
  for (char c : kFeatureMagic) w.Put(c);
  w.Put<std::int32_t>(f.sample_rate);
  w.Put<double>(f.frame_period_ms);
  w.Put<std::int32_t>(f.fft_size);
  w.PutVector(f.f0);
  w.PutVector(f.energy);
  PutMatrix(&w, f.mcc);
  PutMatrix(&w, f.ap);
  std::string bytes = w.buffer();
  std::uint64_t sum = Fnv1a64(bytes);
  bytes.append(reinterpret_cast<const char *>(&sum), sizeof(sum));
  WriteFileAtomic(path, bytes);
}

VocoderFeatures LoadFeatures(const std::string &path) {
  std::string bytes = ReadFileBytes(path);
  if (bytes.size() < sizeof(kFeatureMagic) + 8 ||
      bytes.compare(0, sizeof(kFeatureMagic), kFeatureMagic, sizeof(kFeatureMagic)) != 0)
    GAZEV_ERR << path << ": not a feature file";
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (Fnv1a64(bytes.data(), bytes.size() - 8) != stored)
    GAZEV_ERR << path << ": checksum mismatch";
  BinaryReader r(bytes.data() + sizeof(kFeatureMagic),
                 bytes.size() - sizeof(kFeatureMagic) - 8, path);
  VocoderFeatures f;
  f.sample_rate = r.Get<std::int32_t>();
  f.frame_period_ms = r.Get<double>();
  f.fft_size = r.Get<std::int32_t>();
  f.f0 = r.GetVector<double>();
  f.energy = r.GetVector<double>();
  f.mcc = GetMatrix(&r);
  f.ap = GetMatrix(&r);
  f.Check();
  return f;
}

FeatureCache::FeatureCache(std::string dir, AnalysisParams params)
    : dir_(std::move(dir)), params_(params) {}

std::string FeatureCache::PathFor(const std::string &utterance) const {
  std::string abs = std::filesystem::absolute(utterance).lexically_normal().string();
  std::uint64_t key = Fnv1a64(abs + "\n" + params_.Fingerprint());
  return (std::filesystem::path(dir_) / (HexDigest(key) + ".feat")).string();
}

bool FeatureCache::Contains(const std::string &utterance) const {
  return std::filesystem::exists(PathFor(utterance));
}

VocoderFeatures FeatureCache::Get(const std::string &utterance) {
  std::string path = PathFor(utterance);
  if (std::filesystem::exists(path)) {
    try {
      return LoadFeatures(path);
    } catch (const GazevError &e) {
      GAZEV_WARN << "Re-analysing " << utterance << ": " << e.what();
    }
  }
  VocoderFeatures f = Analyze(ReadWavAt(utterance, params_.sample_rate), params_);
  SaveFeatures(path, f);
  return f;
}

std::map<std::string, SpeakerStats> ComputeGroupStats(
    const CorpusIndex &index, const SplitPlan &plan, FeatureCache *cache,
    StatsGroup group) {
  std::map<std::string, std::vector<VocoderFeatures>> members;
  for (int id : plan.train_speakers) {
    const SpeakerRecord &s = index.Speaker(id);
    std::string key = group == StatsGroup::kPerSpeaker ? s.speaker_id
                                                       : GenderName(s.gender);
    for (const std::string &u : TrainUtterances(s, plan))
      members[key].push_back(cache->Get(u));
  }
  std::map<std::string, SpeakerStats> out;
  for (auto &[key, feats] : members) {
    std::vector<const VocoderFeatures *> ptrs;
    for (const auto &f : feats) ptrs.push_back(&f);
    out[key] = ComputeStats(ptrs);
  }
  return out;
}

const SpeakerStats &CorpusStats::ForGender(Gender gender) const {
  auto it = per_gender.find(GenderName(gender));
  if (it == per_gender.end())
    GAZEV_ERR << "No " << GenderName(gender) << " statistics available";
  return it->second;
}

const SpeakerStats &CorpusStats::ForSpeaker(const std::string &speaker_id,
                                            Gender gender) const {
  auto it = per_speaker.find(speaker_id);
  return it != per_speaker.end() ? it->second : ForGender(gender);
}

namespace {
nlohmann::json StatsToJson(const SpeakerStats &s) {
  return {{"logf0_mean", s.logf0_mean}, {"logf0_std", s.logf0_std},
          {"mcc_mean", s.mcc_mean}, {"mcc_std", s.mcc_std}};
}
SpeakerStats StatsFromJson(const nlohmann::json &j) {
  SpeakerStats s;
  s.logf0_mean = j.at("logf0_mean");
  s.logf0_std = j.at("logf0_std");
  s.mcc_mean = j.at("mcc_mean").get<std::vector<double>>();
  s.mcc_std = j.at("mcc_std").get<std::vector<double>>();
  return s;
}
}  // namespace

std::string CorpusStats::ToJson() const {
  nlohmann::json j;
  j["global"] = StatsToJson(global);
  j["per_speaker"] = nlohmann::json::object();
  j["per_gender"] = nlohmann::json::object();
  for (const auto &[k, v] : per_speaker) j["per_speaker"][k] = StatsToJson(v);
  for (const auto &[k, v] : per_gender) j["per_gender"][k] = StatsToJson(v);
  return j.dump(1);
}

CorpusStats CorpusStats::FromJson(const std::string &json) {
  CorpusStats s;
  try {
    auto j = nlohmann::json::parse(json);
    s.global = StatsFromJson(j.at("global"));
    for (auto &[k, v] : j.at("per_speaker").items()) s.per_speaker[k] = StatsFromJson(v);
    for (auto &[k, v] : j.at("per_gender").items()) s.per_gender[k] = StatsFromJson(v);
  } catch (const nlohmann::json::exception &e) {
    GAZEV_ERR << "Bad statistics JSON: " << e.what();
  }
  return s;
}

CorpusStats ComputeCorpusStats(const CorpusIndex &index, const SplitPlan &plan,
                               FeatureCache *cache) {
  CorpusStats stats;
  stats.per_speaker = ComputeGroupStats(index, plan, cache, StatsGroup::kPerSpeaker);
  stats.per_gender = ComputeGroupStats(index, plan, cache, StatsGroup::kPerGender);
  std::vector<VocoderFeatures> all;
  for (int id : plan.train_speakers)
    for (const std::string &u : TrainUtterances(index.Speaker(id), plan))
      all.push_back(cache->Get(u));
  std::vector<const VocoderFeatures *> ptrs;
  for (const auto &f : all) ptrs.push_back(&f);
  stats.global = ComputeStats(ptrs);
  return stats;
}

FrameMatrix Standardize(const FrameMatrix &mcc, const SpeakerStats &stats) {
  if (static_cast<std::size_t>(mcc.cols()) != stats.mcc_mean.size())
    GAZEV_ERR << "Normalizer has " << stats.mcc_mean.size() << " dims, MCC has " << mcc.cols();
  FrameMatrix out(mcc.rows(), mcc.cols());
  for (Eigen::Index d = 0; d < mcc.cols(); ++d)
    out.col(d) = (mcc.col(d).array() - stats.mcc_mean[d]) / stats.mcc_std[d];
  return out;
}

FrameMatrix Destandardize(const FrameMatrix &mcc, const SpeakerStats &stats) {
  if (static_cast<std::size_t>(mcc.cols()) != stats.mcc_mean.size())
    GAZEV_ERR << "Normalizer has " << stats.mcc_mean.size() << " dims, MCC has " << mcc.cols();
  FrameMatrix out(mcc.rows(), mcc.cols());
  for (Eigen::Index d = 0; d < mcc.cols(); ++d)
    out.col(d) = mcc.col(d).array() * stats.mcc_std[d] + stats.mcc_mean[d];
  return out;
}

}  // namespace gazev
