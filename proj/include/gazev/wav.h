// gazev/wav.h

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

#ifndef GAZEV_WAV_H_
#define GAZEV_WAV_H_

#include <string>
#include <vector>

#include "gazev/base.h"

namespace gazev {

/// Mono audio with samples in [-1, 1).
struct Waveform {
  int sample_rate = 0;
  std::vector<double> samples;

  double Seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

/// Reads a 16-bit PCM RIFF/WAVE file; multi-channel input is downmixed by
/// averaging the channels.
Waveform ReadWav(const std::string &path);

/// Writes 16-bit PCM mono, clipping to the representable range.
void WriteWav(const std::string &path, const Waveform &wave);

/// Band-limited (windowed-sinc) sample-rate conversion.
std::vector<double> Resample(const std::vector<double> &input, int from_rate,
                             int to_rate);

/// Reads and converts to the requested rate.
Waveform ReadWavAt(const std::string &path, int sample_rate);

}  // namespace gazev

#endif  // GAZEV_WAV_H_
