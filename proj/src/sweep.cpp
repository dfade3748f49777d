#include "specbench/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "specbench/errors.hpp"
#include "specbench/format.hpp"
#include "specbench/parallel.hpp"

namespace specbench {

std::string_view to_string(GridMetric m) {
  switch (m) {
    case GridMetric::SpectralContrast: return "spectral_contrast";
    case GridMetric::PeakCount: return "peak_count";
    case GridMetric::RidgeVariance: return "ridge_variance";
  }
  return "?";
}

GridMetric parse_grid_metric(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto m : {GridMetric::SpectralContrast, GridMetric::PeakCount, GridMetric::RidgeVariance})
    if (t == to_string(m)) return m;
  throw InvalidParams("unknown grid metric '" + std::string(text) + "'");
}

void validate(const GridSpec& spec) {
  if (spec.n_fft_values.empty()) throw InvalidParams("grid needs at least one n_fft value");
  if (spec.hop_divisors.empty()) throw InvalidParams("grid needs at least one hop value");
  for (int d : spec.hop_divisors) {
    if (d < 1) throw InvalidParams("hop values must be >= 1");
    if (spec.hop_literal) continue;
    for (int n : spec.n_fft_values) {
      if (n <= 0 || n % d)
        throw InvalidParams("hop divisor " + std::to_string(d) + " does not divide n_fft " +
                            std::to_string(n));
    }
  }
}

double spectral_contrast_db(const Spectrogram& spec) {
  const auto& m = spec.magnitude;
  if (m.rows == 0 || m.cols == 0) return 0.0;
  double total = 0.0;
  std::vector<double> row_db;
  for (std::size_t t = 0; t < m.rows; ++t) {
    row_db = to_db(m.row(t));
    const double max = *std::max_element(row_db.begin(), row_db.end());
    total += max - percentile(row_db, 50.0);
  }
  return total / static_cast<double>(m.rows);
}

double ridge_variance_hz2(const Spectrogram& spec) {
  const auto ridge = extract_ridge(spec);
  if (ridge.points.empty()) return 0.0;
  const double n = static_cast<double>(ridge.points.size());
  double mean = 0.0;
  for (const auto& p : ridge.points) mean += p.freq_hz;
  mean /= n;
  double var = 0.0;
  for (const auto& p : ridge.points) var += (p.freq_hz - mean) * (p.freq_hz - mean);
  return var / n;
}

GridCell evaluate_cell(const AudioClip& clip, const GridSpec& spec, int n_fft, int divisor,
                       bool keep_data) {
  GridCell cell;
  cell.n_fft = n_fft;
  cell.hop_divisor = divisor;
  cell.hop_length = spec.hop_literal ? divisor : (divisor > 0 ? n_fft / divisor : 0);
  try {
    TransformParams p = spec.base;
    p.method = spec.method;
    p.n_fft = n_fft;
    p.hop_length = cell.hop_length;
    auto result = compute(clip, p);
    TransformParams sp = p;
    sp.method = Method::FftDual;
    auto spectrogram = compute_spectrogram(clip, sp);

    cell.spectral_contrast_db = spectral_contrast_db(spectrogram);
    cell.peak_count = detect_peaks(result, spec.peak_config).size();
    cell.ridge_variance_hz2 = ridge_variance_hz2(spectrogram);
    switch (spec.metric) {
      case GridMetric::SpectralContrast: cell.metric_value = cell.spectral_contrast_db; break;
      case GridMetric::PeakCount: cell.metric_value = static_cast<double>(cell.peak_count); break;
      case GridMetric::RidgeVariance: cell.metric_value = cell.ridge_variance_hz2; break;
    }
    cell.ok = true;
    if (keep_data) {
      cell.result = std::move(result);
      cell.spectrogram = std::move(spectrogram);
    }
  } catch (const Error& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

GridResult run_grid(const AudioClip& clip, const GridSpec& spec, bool keep_data, unsigned workers) {
  validate(spec);
  GridResult grid;
  grid.rows = spec.n_fft_values.size();
  grid.cols = spec.hop_divisors.size();
  grid.metric = spec.metric;
  grid.cells.resize(grid.rows * grid.cols);

  parallel_for(grid.cells.size(), workers, [&](std::size_t i) {
    grid.cells[i] = evaluate_cell(clip, spec, spec.n_fft_values[i / grid.cols],
                                  spec.hop_divisors[i % grid.cols], keep_data);
  });

  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    if (!c.ok) continue;
    if (!grid.best_cell) {
      grid.best_cell = i;
      continue;
    }
    const auto& b = grid.cells[*grid.best_cell];
    const bool better =
        c.metric_value > b.metric_value ||
        (c.metric_value == b.metric_value &&
         (c.n_fft < b.n_fft || (c.n_fft == b.n_fft && c.hop_divisor < b.hop_divisor)));
    if (better) grid.best_cell = i;
  }
  return grid;
}

std::string grid_csv(const GridResult& grid) {
  std::string out =
      "n_fft,hop_divisor,hop_length,status,metric,metric_value,spectral_contrast_db,peak_count,"
      "ridge_variance_hz2,best\n";
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    std::vector<std::string> row{std::to_string(c.n_fft),
                                 std::to_string(c.hop_divisor),
                                 std::to_string(c.hop_length),
                                 c.ok ? "ok" : "failed: " + c.error,
                                 std::string(to_string(grid.metric)),
                                 c.ok ? fmt_sig6(c.metric_value) : "",
                                 c.ok ? fmt_sig6(c.spectral_contrast_db) : "",
                                 c.ok ? std::to_string(c.peak_count) : "",
                                 c.ok ? fmt_sig6(c.ridge_variance_hz2) : "",
                                 grid.best_cell == i ? "true" : "false"};
    out += csv_row(row);
  }
  return out;
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
  if (bound == 0) throw InvalidParams("empty sampling range");
  // Largest multiple of bound representable; draws above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = engine();
  while (v >= limit) v = engine();
  return v % bound;
}

std::vector<std::string> sample_validation(const ClipCollection& collection, std::size_t k,
                                           std::uint64_t seed) {
  if (k < 1) throw InvalidParams("sample size must be >= 1");
  std::vector<std::string> ids;
  for (const auto* clip : collection.clips()) ids.push_back(clip->id);
  if (k > ids.size()) {
    throw KTooLarge("asked for " + std::to_string(k) + " clips from a collection of " +
                    std::to_string(ids.size()));
  }
  std::mt19937_64 engine(seed);
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(engine, ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  return ids;
}

}  // namespace specbench
