// Copyright 2026 The Pipscreen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIPSCREEN_DSP_WAV_HPP_
#define PIPSCREEN_DSP_WAV_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::dsp {

enum class WavFormat { kPcm16, kFloat32 };

namespace wav_detail {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}
inline std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace wav_detail

// Serialises to an in-memory RIFF/WAVE image. PCM16 clips to [-1, 1].
inline std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio,
                                            WavFormat format) {
  using namespace wav_detail;
  const std::uint16_t channels = static_cast<std::uint16_t>(audio.channel_count());
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint16_t block_align = channels * bits / 8;
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate()));
  const auto data_bytes = static_cast<std::uint32_t>(audio.length() * block_align);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == WavFormat::kPcm16 ? 1 : 3);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (std::size_t n = 0; n < audio.length(); ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = audio.channel(c)[n];
      if (format == WavFormat::kPcm16) {
        const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
        const auto s = static_cast<std::int16_t>(q);
        put_u16(out, static_cast<std::uint16_t>(s));
      } else {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  return out;
}

inline AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes) {
  using namespace wav_detail;
  require(bytes.size() >= 12 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
              std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorCode::kParseError, "not a RIFF/WAVE file");
  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = get_u32(chunk + 4);
    require(pos + 8 + size <= bytes.size() || std::memcmp(chunk, "data", 4) == 0,
            ErrorCode::kParseError, "truncated WAV chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      require(size >= 16, ErrorCode::kParseError, "short fmt chunk");
      format_tag = get_u16(chunk + 8);
      channels = get_u16(chunk + 10);
      rate = get_u32(chunk + 12);
      bits = get_u16(chunk + 22);
      if (format_tag == 0xFFFE && size >= 26) format_tag = get_u16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, bytes.size() - pos - 8);
    }
    pos += 8 + size + (size & 1);
  }
  require(channels > 0 && rate > 0 && data != nullptr, ErrorCode::kParseError,
          "WAV file lacks fmt or data chunk");
  const bool pcm16 = format_tag == 1 && bits == 16;
  const bool float32 = format_tag == 3 && bits == 32;
  require(pcm16 || float32, ErrorCode::kParseError,
          "only 16-bit PCM and 32-bit float WAV are supported");
  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  std::vector<std::vector<double>> samples(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + (n * channels + c) * width;
      samples[c][n] =
          pcm16 ? static_cast<double>(static_cast<std::int16_t>(get_u16(p))) / 32768.0
                : static_cast<double>(std::bit_cast<float>(get_u32(p)));
    }
  }
  return AudioBuffer(std::move(samples), static_cast<double>(rate));
}

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
                      WavFormat format = WavFormat::kFloat32) {
  const auto bytes = encode_wav(audio, format);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + path.string());
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIoError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

inline AudioBuffer read_wav(const std::filesystem::path& path) {
  return decode_wav(read_file_bytes(path));
}

}  // namespace pipscreen::dsp

#endif  // PIPSCREEN_DSP_WAV_HPP_
