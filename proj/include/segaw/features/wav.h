// include/segaw/features/wav.h

// Copyright 2026  segaw authors

// See ../../../COPYING for clarification regarding multiple authors
//
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace segaw {

// Mono PCM-16 audio; samples keep their integer scale.
struct WavAudio {
  int sample_rate = 16000;
  std::vector<std::int16_t> samples;
};

// Reads a RIFF/WAVE file.  Throws FormatError on malformed files and
// InputError unless the audio is PCM-16 mono at 16 kHz.
WavAudio read_wav(const std::string& path);
WavAudio parse_wav(const std::vector<std::uint8_t>& bytes);

// Canonical 44-byte-header PCM-16 mono file.
std::vector<std::uint8_t> encode_wav(const WavAudio& audio);
void write_wav(const std::string& path, const WavAudio& audio);

}  // namespace segaw
