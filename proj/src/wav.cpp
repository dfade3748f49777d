#include "specbench/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "specbench/errors.hpp"

namespace specbench::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

int bits_of(SampleFormat f) {
  switch (f) {
    case SampleFormat::Pcm8: return 8;
    case SampleFormat::Pcm16: return 16;
    case SampleFormat::Pcm24: return 24;
    case SampleFormat::Pcm32: return 32;
    case SampleFormat::Float32: return 32;
    case SampleFormat::Float64: return 64;
  }
  return 16;
}

bool is_float(SampleFormat f) { return f == SampleFormat::Float32 || f == SampleFormat::Float64; }

double read_sample(const std::uint8_t* p, SampleFormat f) {
  switch (f) {
    case SampleFormat::Pcm8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case SampleFormat::Pcm16:
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case SampleFormat::Pcm24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case SampleFormat::Pcm32:
      return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    case SampleFormat::Float32:
      return static_cast<double>(std::bit_cast<float>(read_u32(p)));
    case SampleFormat::Float64: {
      std::uint64_t bits = static_cast<std::uint64_t>(read_u32(p)) |
                           (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
      return std::bit_cast<double>(bits);
    }
  }
  return 0.0;
}

void write_sample(std::vector<std::uint8_t>& out, double x, SampleFormat f) {
  auto quantize = [&](double full_scale, double lo, double hi) {
    return static_cast<std::int64_t>(std::clamp(std::round(x * full_scale), lo, hi));
  };
  switch (f) {
    case SampleFormat::Pcm8:
      out.push_back(static_cast<std::uint8_t>(quantize(128.0, -128.0, 127.0) + 128));
      break;
    case SampleFormat::Pcm16:
      put_u16(out, static_cast<std::uint16_t>(quantize(32768.0, -32768.0, 32767.0)));
      break;
    case SampleFormat::Pcm24: {
      auto v = static_cast<std::uint32_t>(quantize(8388608.0, -8388608.0, 8388607.0));
      for (int i = 0; i < 3; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
      break;
    }
    case SampleFormat::Pcm32:
      put_u32(out, static_cast<std::uint32_t>(quantize(2147483648.0, -2147483648.0, 2147483647.0)));
      break;
    case SampleFormat::Float32:
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
      break;
    case SampleFormat::Float64: {
      auto bits = std::bit_cast<std::uint64_t>(x);
      put_u32(out, static_cast<std::uint32_t>(bits & 0xFFFFFFFFu));
      put_u32(out, static_cast<std::uint32_t>(bits >> 32));
      break;
    }
  }
}

SampleFormat resolve_format(std::uint16_t tag, std::uint16_t bits) {
  if (tag == kFormatPcm) {
    switch (bits) {
      case 8: return SampleFormat::Pcm8;
      case 16: return SampleFormat::Pcm16;
      case 24: return SampleFormat::Pcm24;
      case 32: return SampleFormat::Pcm32;
      default: break;
    }
  } else if (tag == kFormatFloat) {
    if (bits == 32) return SampleFormat::Float32;
    if (bits == 64) return SampleFormat::Float64;
  }
  throw UnsupportedEncoding("format tag " + std::to_string(tag) + " with " +
                            std::to_string(bits) + " bits per sample");
}

}  // namespace

DecodedWav decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw UnreadableFile("not a RIFF/WAVE stream");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t block_align = 0;
  DecodedWav out;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t available = bytes.size() - body;

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw UnreadableFile("truncated fmt chunk");
      std::uint16_t tag = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      out.sample_rate_hz = static_cast<int>(read_u32(chunk + 12));
      block_align = read_u16(chunk + 20);
      std::uint16_t bits = read_u16(chunk + 22);
      if (tag == kFormatExtensible) {
        if (size < 40 || available < 40) throw UnreadableFile("truncated extensible fmt chunk");
        // First two bytes of the subformat GUID carry the real format tag.
        tag = read_u16(chunk + 8 + 24);
      }
      out.format = resolve_format(tag, bits);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      // Some writers leave a placeholder size on streamed files; clamp.
      data = bytes.subspan(body, std::min<std::size_t>(size, available));
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) throw UnreadableFile("missing fmt chunk");
  if (!have_data) throw UnreadableFile("missing data chunk");
  if (channels == 0 || out.sample_rate_hz <= 0) throw UnreadableFile("invalid fmt header");

  const int bytes_per_sample = bits_of(out.format) / 8;
  if (block_align != channels * bytes_per_sample) {
    throw UnreadableFile("block align does not match channel layout");
  }
  out.channels = channels;

  const std::size_t frames = data.size() / block_align;
  if (frames == 0) throw EmptyAudio("data chunk holds no sample frames");

  out.mono.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data.data() + i * block_align;
    double sum = 0.0;
    for (int c = 0; c < channels; ++c) sum += read_sample(frame + c * bytes_per_sample, out.format);
    out.mono[i] = sum / channels;
  }
  return out;
}

DecodedWav read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const UnreadableFile& e) {
    throw UnreadableFile(path + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode(std::span<const double> samples, int sample_rate_hz,
                                 SampleFormat format) {
  return encode_interleaved(samples, 1, sample_rate_hz, format);
}

std::vector<std::uint8_t> encode_interleaved(std::span<const double> interleaved, int channels,
                                             int sample_rate_hz, SampleFormat format) {
  const int bits = bits_of(format);
  const auto block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, is_float(format) ? kFormatFloat : kFormatPcm);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz) * block_align);
  put_u16(out, block_align);
  put_u16(out, static_cast<std::uint16_t>(bits));
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double x : interleaved) write_sample(out, x, format);
  if (data_size & 1u) {
    out.push_back(0);
  }
  return out;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnreadableFile("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace specbench::wav
