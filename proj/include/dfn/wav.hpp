// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// RIFF/WAVE I/O: PCM16 and IEEE float32, including WAVE_FORMAT_EXTENSIBLE.

#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "dfn/error.hpp"

namespace dfn {

// Unreadable or malformed WAV input.
class WavError : public IoError {
 public:
  using IoError::IoError;
};

enum class WavEncoding { kPcm16, kFloat32 };

struct WavInfo {
  int sample_rate = 48000;
  int channels = 1;
  WavEncoding encoding = WavEncoding::kPcm16;
  std::uint64_t frames = 0;
};

struct WavData {
  WavInfo info;
  std::vector<float> samples;  // interleaved, full scale = 1.0
};

WavData ReadWav(const std::string& path);
void WriteWav(const std::string& path, std::span<const float> samples,
              int sample_rate, WavEncoding encoding = WavEncoding::kFloat32,
              int channels = 1);

// Incremental reader; memory use is independent of file length.
class WavReader {
 public:
  explicit WavReader(const std::string& path);
  const WavInfo& info() const { return info_; }
  // Reads up to out.size() interleaved samples; returns 0 at end of data.
  std::size_t Read(std::span<float> out);

 private:
  std::ifstream in_;
  std::string path_;
  WavInfo info_;
  std::uint64_t remaining_bytes_ = 0;
  std::vector<std::uint8_t> raw_;
};

// Incremental writer. Sizes in the header are patched by Close().
class WavWriter {
 public:
  WavWriter(const std::string& path, int sample_rate,
            WavEncoding encoding = WavEncoding::kFloat32, int channels = 1);
  ~WavWriter();
  WavWriter(const WavWriter&) = delete;
  WavWriter& operator=(const WavWriter&) = delete;

  void Write(std::span<const float> samples);
  void Close();

 private:
  std::ofstream out_;
  std::string path_;
  int sample_rate_;
  WavEncoding encoding_;
  int channels_;
  std::uint64_t data_bytes_ = 0;
  std::vector<std::uint8_t> raw_;
  bool closed_ = false;
};

}  // namespace dfn
