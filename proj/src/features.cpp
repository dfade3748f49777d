#include "specbench/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "specbench/errors.hpp"

namespace specbench {

namespace {

double interp_freq(std::span<const double> freqs, double position) {
  const auto last = static_cast<double>(freqs.size() - 1);
  position = std::clamp(position, 0.0, last);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  if (lo + 1 >= freqs.size()) return freqs.back();
  const double frac = position - static_cast<double>(lo);
  return freqs[lo] + frac * (freqs[lo + 1] - freqs[lo]);
}

struct Bases {
  std::size_t left = 0;
  std::size_t right = 0;
  double prominence = 0.0;
};

Bases prominence_of(std::span<const double> x, std::size_t peak) {
  const double top = x[peak];
  Bases b;
  b.left = peak;
  double left_min = top;
  for (std::size_t j = peak + 1; j-- > 0 && x[j] <= top;) {
    if (x[j] < left_min) {
      left_min = x[j];
      b.left = j;
    }
  }
  b.right = peak;
  double right_min = top;
  for (std::size_t j = peak; j < x.size() && x[j] <= top; ++j) {
    if (x[j] < right_min) {
      right_min = x[j];
      b.right = j;
    }
  }
  b.prominence = top - std::max(left_min, right_min);
  return b;
}

/// Interpolated (left, right) positions where the peak flank crosses half
/// its prominence, bounded by the bases.
std::pair<double, double> half_prominence_crossings(std::span<const double> x, std::size_t peak,
                                                    const Bases& b) {
  const double height = x[peak] - 0.5 * b.prominence;

  std::size_t j = peak;
  while (b.left < j && x[j] > height) --j;
  double left = static_cast<double>(j);
  if (x[j] < height) left += (height - x[j]) / (x[j + 1] - x[j]);

  j = peak;
  while (j < b.right && x[j] > height) ++j;
  double right = static_cast<double>(j);
  if (x[j] < height) right -= (height - x[j]) / (x[j - 1] - x[j]);

  return {left, right};
}

}  // namespace

void validate(const PeakConfig& cfg) {
  if (!(cfg.height_percentile >= 0.0 && cfg.height_percentile <= 100.0))
    throw InvalidParams("height_percentile must be in [0, 100]");
  if (!(cfg.min_prominence_fraction >= 0.0 && cfg.min_prominence_fraction <= 1.0))
    throw InvalidParams("min_prominence_fraction must be in [0, 1]");
  if (cfg.max_peaks < 1) throw InvalidParams("max_peaks must be >= 1");
}

double Vein::total_magnitude() const {
  return std::accumulate(points.begin(), points.end(), 0.0,
                         [](double acc, const TrackPoint& p) { return acc + p.magnitude; });
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> out;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t j = i;
      while (j + 1 < n && x[j + 1] == x[i]) ++j;
      if (j + 1 < n && x[j + 1] < x[i]) out.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<Peak> detect_peaks(std::span<const double> freqs_hz, std::span<const double> power,
                               const PeakConfig& cfg) {
  validate(cfg);
  if (freqs_hz.size() != power.size()) throw InvalidParams("frequency and power lengths differ");
  if (power.empty()) return {};

  const double height_threshold = percentile(power, cfg.height_percentile);
  const double max_power = *std::max_element(power.begin(), power.end());
  const double prominence_threshold = cfg.min_prominence_fraction * max_power;

  std::vector<Peak> peaks;
  for (std::size_t i : local_maxima(power)) {
    if (power[i] < height_threshold) continue;
    const Bases bases = prominence_of(power, i);
    if (bases.prominence < prominence_threshold) continue;
    const auto [left, right] = half_prominence_crossings(power, i, bases);

    Peak p;
    p.bin_index = i;
    p.freq_hz = freqs_hz[i];
    p.power_linear = power[i];
    p.power_db = to_db(power[i]);
    p.prominence = bases.prominence;
    p.width_hz = std::max(0.0, interp_freq(freqs_hz, right) - interp_freq(freqs_hz, left));
    peaks.push_back(p);
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.power_linear != b.power_linear) return a.power_linear > b.power_linear;
    return a.bin_index < b.bin_index;
  });
  if (peaks.size() > cfg.max_peaks) peaks.resize(cfg.max_peaks);
  return peaks;
}

std::vector<Peak> detect_peaks(const SpectralResult& result, const PeakConfig& cfg) {
  auto peaks = detect_peaks(result.freqs_hz, result.psd_linear, cfg);
  // Keep the stored dB value bit-identical with the result's own column.
  for (auto& p : peaks) p.power_db = result.psd_db[p.bin_index];
  return peaks;
}

Ridge extract_ridge(const Spectrogram& spec) {
  Ridge ridge;
  const auto& m = spec.magnitude;
  ridge.points.reserve(m.rows);
  for (std::size_t t = 0; t < m.rows; ++t) {
    auto row = m.row(t);
    if (row.empty()) continue;
    // max_element returns the first maximum, i.e. the lowest frequency.
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    ridge.points.push_back({spec.times_s[t], spec.freqs_hz[best], row[best]});
  }
  return ridge;
}

std::vector<Vein> extract_veins(const Spectrogram& spec, double max_jump_hz,
                                std::size_t min_persistence, std::size_t max_veins) {
  if (!(max_jump_hz > 0.0)) throw InvalidParams("max_jump_hz must be positive");
  if (min_persistence < 2) throw InvalidParams("min_persistence must be >= 2");
  if (max_veins < 1) throw InvalidParams("max_veins must be >= 1");

  const auto& m = spec.magnitude;
  std::vector<Vein> finished;
  std::vector<Vein> active;

  auto retire = [&](Vein&& v) {
    v.persistence_frames = v.points.size();
    if (v.points.size() >= min_persistence) finished.push_back(std::move(v));
  };

  for (std::size_t t = 0; t < m.rows; ++t) {
    auto row = m.row(t);
    auto maxima = local_maxima(row);
    std::stable_sort(maxima.begin(), maxima.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    if (maxima.size() > max_veins) maxima.resize(max_veins);
    std::sort(maxima.begin(), maxima.end());

    // Candidate links ordered by |df|, then track, then maximum.
    std::vector<std::tuple<double, std::size_t, std::size_t>> links;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double last_f = active[a].points.back().freq_hz;
      for (std::size_t c = 0; c < maxima.size(); ++c) {
        const double df = std::abs(spec.freqs_hz[maxima[c]] - last_f);
        if (df <= max_jump_hz) links.emplace_back(df, a, c);
      }
    }
    std::sort(links.begin(), links.end());

    std::vector<bool> track_used(active.size(), false);
    std::vector<bool> max_used(maxima.size(), false);
    for (const auto& [df, a, c] : links) {
      if (track_used[a] || max_used[c]) continue;
      track_used[a] = max_used[c] = true;
      const std::size_t bin = maxima[c];
      active[a].points.push_back({spec.times_s[t], spec.freqs_hz[bin], row[bin]});
    }

    std::vector<Vein> next;
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (track_used[a]) {
        next.push_back(std::move(active[a]));
      } else {
        retire(std::move(active[a]));
      }
    }
    for (std::size_t c = 0; c < maxima.size(); ++c) {
      if (max_used[c]) continue;
      Vein v;
      v.points.push_back({spec.times_s[t], spec.freqs_hz[maxima[c]], row[maxima[c]]});
      next.push_back(std::move(v));
    }
    active = std::move(next);
  }
  for (auto& v : active) retire(std::move(v));

  std::stable_sort(finished.begin(), finished.end(), [](const Vein& a, const Vein& b) {
    const double ma = a.total_magnitude();
    const double mb = b.total_magnitude();
    if (ma != mb) return ma > mb;
    if (a.points.front().time_s != b.points.front().time_s)
      return a.points.front().time_s < b.points.front().time_s;
    return a.points.front().freq_hz < b.points.front().freq_hz;
  });
  return finished;
}

std::vector<Vein> extract_veins(const Spectrogram& spec, const VeinConfig& cfg) {
  double jump = cfg.max_jump_hz;
  if (!(jump > 0.0)) {
    const double bin_width = spec.freqs_hz.size() > 1 ? spec.freqs_hz[1] - spec.freqs_hz[0] : 1.0;
    jump = 4.0 * bin_width;
  }
  return extract_veins(spec, jump, cfg.min_persistence, cfg.max_veins);
}

}  // namespace specbench
