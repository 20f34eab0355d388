// wav.cc

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

#include "gazev/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace gazev {

namespace {

std::uint32_t ReadLe32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t ReadLe16(const unsigned char *p) { return p[0] | (p[1] << 8); }

void PutLe32(std::string *s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutLe16(std::string *s, std::uint16_t v) {
  s->push_back(static_cast<char>(v & 0xff));
  s->push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) GAZEV_ERR << "Cannot open " << path;
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    GAZEV_ERR << path << ": not a RIFF/WAVE file";

  int channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = ReadLe32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) GAZEV_ERR << path << ": truncated fmt chunk";
      format = ReadLe16(chunk + 8);
      channels = ReadLe16(chunk + 10);
      rate = ReadLe32(chunk + 12);
      bits = ReadLe16(chunk + 22);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  // 0xFFFE is WAVE_FORMAT_EXTENSIBLE; the sample layout is the same.
  if (format != 1 && format != 0xFFFE)
    GAZEV_ERR << path << ": unsupported WAV format tag " << format;
  if (bits != 16) GAZEV_ERR << path << ": only 16-bit PCM is supported, got " << bits;
  if (channels < 1 || rate == 0) GAZEV_ERR << path << ": bad fmt chunk";
  if (data == nullptr) GAZEV_ERR << path << ": no data chunk";

  Waveform wave;
  wave.sample_rate = static_cast<int>(rate);
  std::size_t frames = data_size / (2 * channels);
  wave.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0;
    for (int c = 0; c < channels; ++c) {
      auto v = static_cast<std::int16_t>(ReadLe16(data + 2 * (i * channels + c)));
      acc += v / 32768.0;
    }
    wave.samples[i] = acc / channels;
  }
  return wave;
}

void WriteWav(const std::string &path, const Waveform &wave) {
  if (wave.sample_rate <= 0) GAZEV_ERR << "Bad sample rate " << wave.sample_rate;
  std::string out;
  std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutLe32(&out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutLe32(&out, 16);
  PutLe16(&out, 1);
  PutLe16(&out, 1);
  PutLe32(&out, wave.sample_rate);
  PutLe32(&out, wave.sample_rate * 2);
  PutLe16(&out, 2);
  PutLe16(&out, 16);
  out += "data";
  PutLe32(&out, data_bytes);
  for (double s : wave.samples) {
    double v = std::round(s * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    PutLe16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) GAZEV_ERR << "Cannot write " << path;
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) GAZEV_ERR << "Write failed for " << path;
}

std::vector<double> Resample(const std::vector<double> &input, int from_rate,
                             int to_rate) {
  if (from_rate <= 0 || to_rate <= 0)
    GAZEV_ERR << "Bad rates " << from_rate << " -> " << to_rate;
  if (from_rate == to_rate) return input;
  const double ratio = static_cast<double>(to_rate) / from_rate;
  const double cutoff = std::min(1.0, ratio) * 0.95;
  const int zero_crossings = 16;
  const double half_width = zero_crossings / cutoff;  // in input samples
  const std::size_t out_len = static_cast<std::size_t>(
      std::floor(input.size() * ratio));
  const long n_in = static_cast<long>(input.size());
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    double t = i / ratio;
    long lo = static_cast<long>(std::ceil(t - half_width));
    long hi = static_cast<long>(std::floor(t + half_width));
    double acc = 0;
    for (long j = std::max(0L, lo); j <= std::min(n_in - 1, hi); ++j) {
      double d = j - t;
      double x = cutoff * d;
      double sinc = std::abs(x) < 1e-12
                        ? 1.0
                        : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      // Hann window over [-half_width, half_width].
      double win = 0.5 * (1 + std::cos(std::numbers::pi * d / half_width));
      acc += input[j] * cutoff * sinc * win;
    }
    out[i] = acc;
  }
  return out;
}

Waveform ReadWavAt(const std::string &path, int sample_rate) {
  Waveform wave = ReadWav(path);
  if (wave.sample_rate != sample_rate) {
    wave.samples = Resample(wave.samples, wave.sample_rate, sample_rate);
    wave.sample_rate = sample_rate;
  }
  return wave;
}

}  // namespace gazev
