#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "specbench/clip_store.hpp"
#include "specbench/features.hpp"
#include "specbench/spectral.hpp"

namespace specbench {

enum class GridMetric { SpectralContrast, PeakCount, RidgeVariance };

std::string_view to_string(GridMetric m);
GridMetric parse_grid_metric(std::string_view text);

struct GridSpec {
  std::vector<int> n_fft_values = {512, 1024, 2048};
  /// hop = n_fft / divisor, or hop = divisor samples when hop_literal is set.
  std::vector<int> hop_divisors = {2, 4, 8};
  bool hop_literal = false;
  Method method = Method::FftDual;
  GridMetric metric = GridMetric::SpectralContrast;
  /// Base for every field a cell does not override.
  TransformParams base;
  PeakConfig peak_config;
};

/// Throws InvalidParams: empty lists, or a divisor that does not divide some
/// n_fft (divisor mode only).
void validate(const GridSpec& spec);

struct GridCell {
  int n_fft = 0;
  int hop_divisor = 0;
  int hop_length = 0;
  bool ok = false;
  std::string error;
  double metric_value = 0.0;
  double spectral_contrast_db = 0.0;
  std::size_t peak_count = 0;
  double ridge_variance_hz2 = 0.0;
  std::optional<SpectralResult> result;
  std::optional<Spectrogram> spectrogram;
};

struct GridResult {
  /// Row-major: n_fft_values x hop_divisors, in the spec's list order.
  std::vector<GridCell> cells;
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Highest metric among successful cells; ties go to the smallest n_fft,
  /// then the smallest divisor. Empty when every cell failed.
  std::optional<std::size_t> best_cell;
  GridMetric metric = GridMetric::SpectralContrast;
};

/// Mean over frames of (max - median) of the dB spectrogram row.
double spectral_contrast_db(const Spectrogram& spec);
/// Population variance of the ridge frequency.
double ridge_variance_hz2(const Spectrogram& spec);

GridCell evaluate_cell(const AudioClip& clip, const GridSpec& spec, int n_fft, int divisor,
                       bool keep_data = true);

/// Evaluates every combination (cells in parallel). A cell whose parameters
/// are invalid is marked failed; the grid carries on.
GridResult run_grid(const AudioClip& clip, const GridSpec& spec, bool keep_data = true,
                    unsigned workers = 0);

/// `n_fft,hop_divisor,hop_length,status,metric,metric_value,spectral_contrast_db,peak_count,ridge_variance_hz2,best`
std::string grid_csv(const GridResult& grid);

/// Uniform sample of k clip ids without replacement, deterministic per seed.
/// Throws InvalidParams for k < 1 and KTooLarge for k > collection size.
std::vector<std::string> sample_validation(const ClipCollection& collection, std::size_t k,
                                           std::uint64_t seed);

/// Uniform integer in [0, bound) from a 64-bit Mersenne Twister by rejection;
/// identical on every platform for a given engine state.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

}  // namespace specbench
