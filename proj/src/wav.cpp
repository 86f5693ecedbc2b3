// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace dfn {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t U32(const std::uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t U16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
void PutU32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void PutU16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

int BytesPerSample(WavEncoding e) { return e == WavEncoding::kPcm16 ? 2 : 4; }

// Parses chunks up to "data"; leaves the stream at the first data byte.
WavInfo ParseHeader(std::ifstream& in, const std::string& path,
                    std::uint64_t& data_bytes) {
  std::uint8_t riff[12];
  if (!in.read(reinterpret_cast<char*>(riff), 12) ||
      std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw WavError("wav: not a RIFF/WAVE file: " + path);
  WavInfo info;
  bool have_fmt = false;
  for (;;) {
    std::uint8_t hdr[8];
    if (!in.read(reinterpret_cast<char*>(hdr), 8))
      throw WavError("wav: no data chunk in " + path);
    const std::uint32_t size = U32(hdr + 4);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16) throw WavError("wav: fmt chunk too short in " + path);
      std::vector<std::uint8_t> fmt(size + (size & 1));
      if (!in.read(reinterpret_cast<char*>(fmt.data()),
                   static_cast<std::streamsize>(fmt.size())))
        throw WavError("wav: truncated fmt chunk in " + path);
      std::uint16_t tag = U16(fmt.data());
      info.channels = U16(fmt.data() + 2);
      info.sample_rate = static_cast<int>(U32(fmt.data() + 4));
      const std::uint16_t bits = U16(fmt.data() + 14);
      if (tag == kFormatExtensible) {
        if (size < 40) throw WavError("wav: short extensible fmt in " + path);
        tag = U16(fmt.data() + 24);
      }
      if (tag == kFormatPcm && bits == 16) {
        info.encoding = WavEncoding::kPcm16;
      } else if (tag == kFormatFloat && bits == 32) {
        info.encoding = WavEncoding::kFloat32;
      } else {
        throw WavError("wav: unsupported encoding (tag " + std::to_string(tag) +
                       ", " + std::to_string(bits) + " bits) in " + path);
      }
      if (info.channels < 1 || info.sample_rate < 1)
        throw WavError("wav: invalid channel count or sample rate in " + path);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) throw WavError("wav: data before fmt chunk in " + path);
      // Streams written without a final size carry 0 or 0xFFFFFFFF.
      const std::uint64_t block =
          static_cast<std::uint64_t>(BytesPerSample(info.encoding)) * info.channels;
      const auto here = in.tellg();
      in.seekg(0, std::ios::end);
      const auto available = static_cast<std::uint64_t>(in.tellg() - here);
      in.seekg(here);
      data_bytes = (size == 0 || size == 0xFFFFFFFFu) ? available
                                                      : std::min<std::uint64_t>(size, available);
      data_bytes -= data_bytes % block;
      info.frames = data_bytes / block;
      return info;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
      if (!in) throw WavError("wav: truncated chunk in " + path);
    }
  }
}

void Decode(const std::uint8_t* raw, std::size_t n, WavEncoding e, float* out) {
  if (e == WavEncoding::kPcm16) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = static_cast<float>(static_cast<std::int16_t>(U16(raw + 2 * i))) / 32768.0f;
  } else {
    std::memcpy(out, raw, n * sizeof(float));
  }
}

void Encode(std::span<const float> in, WavEncoding e, std::uint8_t* raw) {
  if (e == WavEncoding::kPcm16) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const float s = std::clamp(in[i], -1.0f, 1.0f);
      const long v = std::lround(s * 32767.0f);
      PutU16(raw + 2 * i, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
  } else {
    std::memcpy(raw, in.data(), in.size() * sizeof(float));
  }
}

std::vector<std::uint8_t> MakeHeader(int sample_rate, WavEncoding e, int channels,
                                     std::uint64_t data_bytes) {
  std::vector<std::uint8_t> h(44);
  const int bps = BytesPerSample(e);
  const auto data32 = static_cast<std::uint32_t>(std::min<std::uint64_t>(data_bytes, 0xFFFFFFFFu - 36));
  std::memcpy(h.data(), "RIFF", 4);
  PutU32(h.data() + 4, 36 + data32);
  std::memcpy(h.data() + 8, "WAVEfmt ", 8);
  PutU32(h.data() + 16, 16);
  PutU16(h.data() + 20, e == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(h.data() + 22, static_cast<std::uint16_t>(channels));
  PutU32(h.data() + 24, static_cast<std::uint32_t>(sample_rate));
  PutU32(h.data() + 28, static_cast<std::uint32_t>(sample_rate * channels * bps));
  PutU16(h.data() + 32, static_cast<std::uint16_t>(channels * bps));
  PutU16(h.data() + 34, static_cast<std::uint16_t>(8 * bps));
  std::memcpy(h.data() + 36, "data", 4);
  PutU32(h.data() + 40, data32);
  return h;
}

}  // namespace

WavReader::WavReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw WavError("wav: cannot open " + path);
  info_ = ParseHeader(in_, path, remaining_bytes_);
}

std::size_t WavReader::Read(std::span<float> out) {
  const auto bps = static_cast<std::uint64_t>(BytesPerSample(info_.encoding));
  const std::size_t n = static_cast<std::size_t>(
      std::min<std::uint64_t>(out.size(), remaining_bytes_ / bps));
  if (n == 0) return 0;
  raw_.resize(n * bps);
  if (!in_.read(reinterpret_cast<char*>(raw_.data()),
                static_cast<std::streamsize>(raw_.size())))
    throw WavError("wav: read failed in " + path_);
  remaining_bytes_ -= raw_.size();
  Decode(raw_.data(), n, info_.encoding, out.data());
  return n;
}

WavData ReadWav(const std::string& path) {
  WavReader reader(path);
  WavData d;
  d.info = reader.info();
  d.samples.resize(static_cast<std::size_t>(d.info.frames) * d.info.channels);
  std::size_t pos = 0;
  while (pos < d.samples.size()) {
    const std::size_t n = reader.Read(std::span<float>(d.samples).subspan(pos));
    if (n == 0) break;
    pos += n;
  }
  d.samples.resize(pos);
  return d;
}

WavWriter::WavWriter(const std::string& path, int sample_rate,
                     WavEncoding encoding, int channels)
    : out_(path, std::ios::binary | std::ios::trunc),
      path_(path),
      sample_rate_(sample_rate),
      encoding_(encoding),
      channels_(channels) {
  if (!out_) throw IoError("wav: cannot open for writing: " + path);
  if (sample_rate < 1 || channels < 1)
    throw ConfigError("wav: invalid sample rate or channel count");
  const auto h = MakeHeader(sample_rate_, encoding_, channels_, 0);
  out_.write(reinterpret_cast<const char*>(h.data()), static_cast<std::streamsize>(h.size()));
}

WavWriter::~WavWriter() {
  try {
    Close();
  } catch (...) {
  }
}

void WavWriter::Write(std::span<const float> samples) {
  if (closed_) throw IoError("wav: write after close: " + path_);
  raw_.resize(samples.size() * static_cast<std::size_t>(BytesPerSample(encoding_)));
  Encode(samples, encoding_, raw_.data());
  out_.write(reinterpret_cast<const char*>(raw_.data()), static_cast<std::streamsize>(raw_.size()));
  if (!out_) throw IoError("wav: write failed: " + path_);
  data_bytes_ += raw_.size();
}

void WavWriter::Close() {
  if (closed_) return;
  closed_ = true;
  const auto h = MakeHeader(sample_rate_, encoding_, channels_, data_bytes_);
  out_.seekp(0);
  out_.write(reinterpret_cast<const char*>(h.data()), static_cast<std::streamsize>(h.size()));
  out_.close();
  if (!out_) throw IoError("wav: failed to finalize " + path_);
}

void WriteWav(const std::string& path, std::span<const float> samples,
              int sample_rate, WavEncoding encoding, int channels) {
  WavWriter w(path, sample_rate, encoding, channels);
  w.Write(samples);
  w.Close();
}

}  // namespace dfn
