#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specbench/clip_store.hpp"
#include "specbench/session.hpp"
#include "specbench/spectral.hpp"

namespace oracle {

// Signals ------------------------------------------------------------------

std::vector<double> tone(double freq_hz, int fs, double seconds, double amplitude = 1.0,
                         double phase = 0.0);
/// Sum of unit-amplitude tones.
std::vector<double> tones(std::span<const double> freqs_hz, int fs, double seconds,
                          double amplitude = 1.0);
/// sin(2 pi (f0 t + rate t^2 / 2)), instantaneous frequency f0 + rate t.
std::vector<double> linear_chirp(double f0_hz, double rate_hz_per_s, int fs, double seconds);
std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double scale = 0.5);

specbench::AudioClip clip(std::string id, std::vector<double> samples, int fs);

// Transforms by definition -------------------------------------------------

/// X[k] = sum x[t] exp(-2 pi i k t / n), all n bins, O(n^2).
std::vector<std::complex<double>> naive_dft(std::span<const double> x);

/// Periodic Hann window, w[i] = 0.5 - 0.5 cos(2 pi i / n).
std::vector<double> hann(std::size_t n);

/// Frame-averaged one-sided periodogram built from naive_dft; same scaling
/// rule as a Welch PSD (2 / (sum w)^2, DC and Nyquist 1 / (sum w)^2).
std::vector<double> naive_welch(std::span<const double> x, std::span<const double> window,
                                std::size_t hop);

/// Saddle-search prominence of x[peak]: for each side, the minimum on the way
/// to the nearest strictly higher sample (or the edge); prominence is the
/// height above the larger of the two minima.
double saddle_prominence(std::span<const double> x, std::size_t peak);

/// Strict local maxima by exhaustive comparison with the nearest differing
/// neighbours (plateaus count once, at their left end).
std::vector<std::size_t> brute_local_maxima(std::span<const double> x);

// Files --------------------------------------------------------------------

class TempDir {
 public:
  explicit TempDir(std::string_view tag = "specbench");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::filesystem::path operator/(std::string_view rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p);
std::vector<std::uint8_t> slurp_bytes(const std::filesystem::path& p);
void spit(const std::filesystem::path& p, std::string_view text);

void write_pcm16_raw(const std::filesystem::path& p, std::span<const std::int16_t> samples, int fs,
                     int channels = 1);
/// Writes a 16-bit PCM WAV by hand; samples are clipped to [-1, 1] and scaled by 32767.
void write_pcm16(const std::filesystem::path& p, std::span<const double> samples, int fs,
                 int channels = 1);

struct WavInfo {
  int format_tag = 0;
  int channels = 0;
  int sample_rate_hz = 0;
  int bits_per_sample = 0;
  std::size_t data_bytes = 0;
  std::size_t data_offset = 0;
  std::size_t frames() const { return data_bytes / (channels * (bits_per_sample / 8)); }
};

/// Minimal RIFF walker: fmt and data chunks only.
WavInfo parse_wav_header(std::span<const std::uint8_t> bytes);
/// Float32/Float64/PCM16 mono payload as doubles.
std::vector<double> wav_payload(std::span<const std::uint8_t> bytes);

// PNG ----------------------------------------------------------------------

struct PngChunk {
  std::string type;
  std::vector<std::uint8_t> data;
  bool crc_ok = false;
};

struct DecodedPng {
  int width = 0;
  int height = 0;
  std::vector<PngChunk> chunks;
  std::vector<std::uint8_t> rgb;  // unfiltered, row-major
};

/// Throws std::runtime_error on a bad signature, CRC or stream.
DecodedPng decode_png(std::span<const std::uint8_t> bytes);

// HTML ---------------------------------------------------------------------

/// Structural check: doctype first, a single html root with head before body,
/// every non-void element closed in order, raw text elements (script, style)
/// closed, no stray '<' in text. Returns an error description or nullopt.
std::optional<std::string> html_structure_error(std::string_view html);

// Sessions -----------------------------------------------------------------

/// Random but internally consistent snapshot: finite values only, psd_db
/// derived from psd_linear, selections drawn from plot peaks, pairs over live
/// selections.
specbench::SessionSnapshot random_session(std::mt19937_64& rng);

// Export checks --------------------------------------------------------------

/// Compares export_csv output, parsed back, against the snapshot: row order,
/// plot ids, selection orders and every numeric column to six significant
/// figures. Returns the first mismatch or nullopt.
std::optional<std::string> csv_mismatch(const specbench::SessionSnapshot& s, const std::string& peaks_csv,
                                        const std::string& ratios_csv);

/// Alphabetic tokens outside JSON string literals. A strict JSON document has
/// only true, false and null.
std::set<std::string> bare_words(std::string_view json_text);

/// True when any CSV cell spells nan or inf in any case.
bool csv_has_nonfinite(const std::string& csv_text);

}  // namespace oracle
