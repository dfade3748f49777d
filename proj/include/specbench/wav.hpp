#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace specbench::wav {

enum class SampleFormat { Pcm8, Pcm16, Pcm24, Pcm32, Float32, Float64 };

struct DecodedWav {
  int sample_rate_hz = 0;
  int channels = 0;
  SampleFormat format = SampleFormat::Pcm16;
  /// Channel-averaged, full-scale normalized samples (before sanitizing).
  std::vector<double> mono;
};

/// Decodes a RIFF/WAVE byte buffer. PCM 8/16/24/32-bit and IEEE float 32/64
/// are accepted, including WAVE_FORMAT_EXTENSIBLE wrappers of those.
DecodedWav decode(std::span<const std::uint8_t> bytes);

DecodedWav read_file(const std::string& path);

/// Encodes mono samples; values outside [-1, 1] are clipped for PCM formats.
std::vector<std::uint8_t> encode(std::span<const double> samples,
                                 int sample_rate_hz, SampleFormat format);

/// Interleaved multichannel encode, frames laid out as ch0,ch1,...
std::vector<std::uint8_t> encode_interleaved(std::span<const double> interleaved,
                                             int channels, int sample_rate_hz,
                                             SampleFormat format);

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace specbench::wav
