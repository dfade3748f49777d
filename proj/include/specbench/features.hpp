#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specbench/spectral.hpp"

namespace specbench {

struct Peak {
  std::size_t bin_index = 0;
  double freq_hz = 0.0;
  double power_linear = 0.0;
  double power_db = 0.0;
  double width_hz = 0.0;
  double prominence = 0.0;

  bool operator==(const Peak&) const = default;
};

struct PeakConfig {
  double height_percentile = 75.0;
  double min_prominence_fraction = 0.05;
  std::size_t max_peaks = 20;

  bool operator==(const PeakConfig&) const = default;
};

/// Throws InvalidParams when a field is outside its documented range.
void validate(const PeakConfig& cfg);

struct TrackPoint {
  double time_s = 0.0;
  double freq_hz = 0.0;
  double magnitude = 0.0;

  bool operator==(const TrackPoint&) const = default;
};

struct Ridge {
  std::vector<TrackPoint> points;
  bool operator==(const Ridge&) const = default;
};

struct Vein {
  std::vector<TrackPoint> points;
  std::size_t persistence_frames = 0;

  double total_magnitude() const;
  bool operator==(const Vein&) const = default;
};

struct VeinConfig {
  double max_jump_hz = 0.0;  // <= 0 means 4 bin widths of the spectrogram
  std::size_t min_persistence = 5;
  std::size_t max_veins = 3;

  bool operator==(const VeinConfig&) const = default;
};

/// Linear-interpolated percentile (numpy's default method), p in [0, 100].
double percentile(std::span<const double> values, double p);

/// Strict local maxima (plateaus report their leftmost bin) that clear both the
/// height-percentile and prominence-fraction thresholds, sorted by power
/// descending then bin ascending, truncated to max_peaks. Prominence is the
/// height above the higher of the two bases found by walking outwards until a
/// strictly higher sample or the edge; width is measured at half prominence
/// with linear interpolation.
std::vector<Peak> detect_peaks(const SpectralResult& result, const PeakConfig& cfg);

/// Same rule over a bare power sequence; frequencies are taken from freqs_hz.
std::vector<Peak> detect_peaks(std::span<const double> freqs_hz, std::span<const double> power,
                               const PeakConfig& cfg);

/// Per frame, the frequency of the largest magnitude (lowest frequency wins ties).
Ridge extract_ridge(const Spectrogram& spec);

/// Tracks of per-frame local maxima linked greedily by nearest frequency.
/// Throws InvalidParams if max_jump_hz <= 0 or min_persistence < 2.
std::vector<Vein> extract_veins(const Spectrogram& spec, double max_jump_hz,
                                std::size_t min_persistence, std::size_t max_veins);

/// Resolves the default jump (4 bin widths) against the spectrogram axis.
std::vector<Vein> extract_veins(const Spectrogram& spec, const VeinConfig& cfg);

/// Indices of strict local maxima; plateaus give their leftmost index.
std::vector<std::size_t> local_maxima(std::span<const double> x);

}  // namespace specbench
