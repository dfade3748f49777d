#include "specbench/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>

#include "specbench/errors.hpp"
#include "specbench/fft.hpp"
#include "specbench/format.hpp"
#include "specbench/wavelet.hpp"

namespace specbench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Samples zero-padded up to `min_len` and to a multiple of `multiple`.
std::vector<double> padded_samples(const AudioClip& clip, std::size_t min_len, std::size_t multiple,
                                   std::vector<std::string>& notes) {
  std::vector<double> x = clip.samples;
  std::size_t target = std::max(x.size(), min_len);
  if (multiple > 1 && target % multiple) target += multiple - target % multiple;
  if (target != x.size()) {
    notes.push_back("zero-padded from " + std::to_string(x.size()) + " to " +
                    std::to_string(target) + " samples");
    x.resize(target, 0.0);
  }
  return x;
}

void finish(SpectralResult& r) {
  auto [clean, report] = sanitize_spectrum(r.psd_linear);
  r.psd_linear = std::move(clean);
  r.sanitize = report;
  r.psd_db = to_db(r.psd_linear);
}

/// One-sided power scaling: doubled except at DC and (even n) Nyquist.
double one_sided_factor(std::size_t k, std::size_t n_fft) {
  return (k == 0 || (n_fft % 2 == 0 && k == n_fft / 2)) ? 1.0 : 2.0;
}

std::vector<std::size_t> frame_starts(std::size_t len, std::size_t n_fft, std::size_t hop) {
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + n_fft <= len; s += hop) starts.push_back(s);
  return starts;
}

/// Per-frame scaled power spectra; shared by the PSD and the spectrogram so
/// the two agree exactly.
Matrix framed_power(std::span<const double> x, const TransformParams& p) {
  const auto n = static_cast<std::size_t>(p.n_fft);
  const auto window = make_window(p.window, n);
  const double sum_w = std::accumulate(window.begin(), window.end(), 0.0);
  const double norm = 1.0 / (sum_w * sum_w);
  const auto starts = frame_starts(x.size(), n, static_cast<std::size_t>(p.hop_length));
  const std::size_t bins = n / 2 + 1;

  Matrix out(starts.size(), bins);
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < starts.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) frame[i] = x[starts[t] + i] * window[i];
    auto spectrum = fft::forward_real(frame);
    auto row = out.row(t);
    for (std::size_t k = 0; k < bins; ++k) {
      row[k] = one_sided_factor(k, n) * std::norm(spectrum[k]) * norm;
    }
  }
  return out;
}

std::vector<double> bin_freqs(std::size_t bins, int n_fft, int sample_rate_hz) {
  std::vector<double> f(bins);
  for (std::size_t k = 0; k < bins; ++k) f[k] = static_cast<double>(k) * sample_rate_hz / n_fft;
  return f;
}

TransformParams with_method(TransformParams p, Method m) {
  p.method = m;
  return p;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Dual scale

double to_db(double linear) { return 10.0 * std::log10(std::max(linear, kDbFloor)); }

double to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> to_db(std::span<const double> linear) {
  std::vector<double> out(linear.size());
  std::transform(linear.begin(), linear.end(), out.begin(), [](double x) { return to_db(x); });
  return out;
}

std::vector<double> to_linear(std::span<const double> db) {
  std::vector<double> out(db.size());
  std::transform(db.begin(), db.end(), out.begin(), [](double x) { return to_linear(x); });
  return out;
}

std::vector<double> make_window(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    switch (window) {
      case Window::Hann: w[i] = 0.5 - 0.5 * std::cos(phase); break;
      case Window::Hamming: w[i] = 0.54 - 0.46 * std::cos(phase); break;
      case Window::Rectangular: break;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// FFT family

SpectralResult compute_psd(const AudioClip& clip, const TransformParams& params) {
  const auto p = with_method(params, Method::FftDual);
  validate(p, clip.sample_rate_hz);

  SpectralResult r;
  r.method = Method::FftDual;
  r.params = p;
  const auto x = padded_samples(clip, static_cast<std::size_t>(p.n_fft), 1, r.notes);
  const Matrix frames = framed_power(x, p);

  r.freqs_hz = bin_freqs(frames.cols, p.n_fft, clip.sample_rate_hz);
  r.psd_linear.assign(frames.cols, 0.0);
  for (std::size_t t = 0; t < frames.rows; ++t) {
    auto row = frames.row(t);
    for (std::size_t k = 0; k < frames.cols; ++k) r.psd_linear[k] += row[k];
  }
  for (auto& v : r.psd_linear) v /= static_cast<double>(frames.rows);
  finish(r);
  return r;
}

Spectrogram compute_spectrogram(const AudioClip& clip, const TransformParams& params) {
  const auto p = with_method(params, Method::FftDual);
  validate(p, clip.sample_rate_hz);

  std::vector<std::string> notes;
  const auto x = padded_samples(clip, static_cast<std::size_t>(p.n_fft), 1, notes);
  Spectrogram s;
  s.magnitude = framed_power(x, p);
  s.magnitude.data = sanitize_spectrum(s.magnitude.data).first;
  s.freqs_hz = bin_freqs(s.magnitude.cols, p.n_fft, clip.sample_rate_hz);
  s.times_s.resize(s.magnitude.rows);
  for (std::size_t t = 0; t < s.magnitude.rows; ++t) {
    const double centre = static_cast<double>(t) * p.hop_length + p.n_fft / 2.0;
    s.times_s[t] = centre / clip.sample_rate_hz;
  }
  return s;
}

TransformParams dual_spectrogram_params(const TransformParams& params) {
  TransformParams p = params;
  p.method = Method::FftDual;
  p.n_fft = std::max(16, params.n_fft / 4);
  p.hop_length = std::max(1, p.n_fft / 2);
  return p;
}

std::pair<SpectralResult, Spectrogram> compute_fft_dual(const AudioClip& clip,
                                                        const TransformParams& params) {
  auto psd = compute_psd(clip, params);
  auto spec = compute_spectrogram(clip, dual_spectrogram_params(params));
  return {std::move(psd), std::move(spec)};
}

// ---------------------------------------------------------------------------
// Constant-Q

SpectralResult compute_cqt(const AudioClip& clip, const TransformParams& params) {
  const auto p = with_method(params, Method::Cqt);
  validate(p, clip.sample_rate_hz);
  if (p.fmin_hz < 10.0) throw InvalidParams("CQT needs fmin_hz >= 10");

  const double fs = clip.sample_rate_hz;
  const double fmax = resolved_fmax(p, clip.sample_rate_hz);
  const double bpo = p.bins_per_octave;
  const auto bins =
      static_cast<std::size_t>(std::ceil(bpo * std::log2(fmax / p.fmin_hz) - 1e-9));
  const double q = 1.0 / (std::pow(2.0, 1.0 / bpo) - 1.0);

  auto window_length = [&](double f) {
    return static_cast<std::size_t>(std::ceil(q * fs / f));
  };
  const std::size_t longest = window_length(p.fmin_hz);
  if (clip.samples.size() < longest) {
    throw ClipTooShort("clip has " + std::to_string(clip.samples.size()) +
                       " samples; CQT at fmin needs " + std::to_string(longest));
  }

  SpectralResult r;
  r.method = Method::Cqt;
  r.params = p;
  r.freqs_hz.resize(bins);
  r.psd_linear.resize(bins);
  const auto& x = clip.samples;
  const auto hop = static_cast<std::size_t>(p.hop_length);

  for (std::size_t k = 0; k < bins; ++k) {
    const double f = p.fmin_hz * std::pow(2.0, static_cast<double>(k) / bpo);
    const std::size_t len = window_length(f);
    const auto w = make_window(p.window, len);
    const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);

    std::vector<std::complex<double>> kernel(len);
    for (std::size_t i = 0; i < len; ++i) {
      kernel[i] = w[i] * std::polar(1.0, -kTwoPi * f * static_cast<double>(i) / fs);
    }

    double acc = 0.0;
    std::size_t frames = 0;
    for (std::size_t start = 0; start + len <= x.size(); start += hop) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t i = 0; i < len; ++i) s += x[start + i] * kernel[i];
      acc += std::norm(s);
      ++frames;
    }
    r.freqs_hz[k] = f;
    r.psd_linear[k] = 2.0 * acc / static_cast<double>(frames) / (sum_w * sum_w);
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Wavelets

SpectralResult compute_wavelet_packet(const AudioClip& clip, const TransformParams& params) {
  const auto p = with_method(params, Method::Wave);
  validate(p, clip.sample_rate_hz);
  const std::size_t block = std::size_t{1} << p.decomposition_levels;
  if (clip.samples.size() < block) {
    throw ClipTooShort("wavelet packet depth " + std::to_string(p.decomposition_levels) +
                       " needs at least " + std::to_string(block) + " samples");
  }

  SpectralResult r;
  r.method = Method::Wave;
  r.params = p;
  const auto x = padded_samples(clip, 0, block, r.notes);
  const auto energies = wavelet::packet_band_energies(x, p.wavelet, p.decomposition_levels);

  const double width = clip.sample_rate_hz / 2.0 / static_cast<double>(energies.size());
  r.freqs_hz.resize(energies.size());
  r.psd_linear.resize(energies.size());
  for (std::size_t b = 0; b < energies.size(); ++b) {
    r.freqs_hz[b] = (static_cast<double>(b) + 0.5) * width;
    r.psd_linear[b] = energies[b] / width;
  }
  finish(r);
  return r;
}

SpectralResult compute_swt(const AudioClip& clip, const TransformParams& params) {
  const auto p = with_method(params, Method::Swt);
  validate(p, clip.sample_rate_hz);
  const std::size_t block = std::size_t{1} << p.decomposition_levels;

  SpectralResult r;
  r.method = Method::Swt;
  r.params = p;
  const auto x = padded_samples(clip, 0, block, r.notes);
  const auto energies = wavelet::swt_band_energies(x, p.wavelet, p.decomposition_levels);

  // energies[0] is the approximation band [0, fs/2^(L+1)]; energies[i] for
  // i >= 1 is the level (L+1-i) detail band [fs/2^(L+2-i), fs/2^(L+1-i)].
  const double fs = clip.sample_rate_hz;
  const int levels = p.decomposition_levels;
  r.freqs_hz.resize(energies.size());
  r.psd_linear.resize(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    double lo = 0.0;
    double hi = fs / std::ldexp(1.0, levels + 1);
    if (i > 0) {
      const int level = levels + 1 - static_cast<int>(i);
      lo = fs / std::ldexp(1.0, level + 1);
      hi = fs / std::ldexp(1.0, level);
    }
    r.freqs_hz[i] = 0.5 * (lo + hi);
    r.psd_linear[i] = energies[i] / (hi - lo);
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Chirplets

double ChirpletResponse::best_rate(std::size_t bin) const {
  std::size_t best = 0;
  for (std::size_t r = 1; r < rates_hz_per_s.size(); ++r) {
    const double v = response(r, bin);
    const double b = response(best, bin);
    if (v > b || (v == b && rates_hz_per_s[r] < rates_hz_per_s[best])) best = r;
  }
  return rates_hz_per_s.at(best);
}

ChirpletResponse compute_chirplet_response(const AudioClip& clip, const TransformParams& params) {
  const auto p = with_method(params, Method::Chirplet);
  validate(p, clip.sample_rate_hz);
  if (p.chirp_rates_hz_per_s.empty()) throw InvalidParams("chirp rate grid is empty");

  std::vector<std::string> notes;
  const auto n = static_cast<std::size_t>(p.n_fft);
  const auto x = padded_samples(clip, n, 1, notes);
  const double fs = clip.sample_rate_hz;
  const std::size_t bins = n / 2 + 1;

  ChirpletResponse out;
  out.rates_hz_per_s = p.chirp_rates_hz_per_s;
  out.start_freqs_hz = bin_freqs(bins, p.n_fft, clip.sample_rate_hz);
  out.n_fft = p.n_fft;
  out.hop_length = p.hop_length;
  out.sigma_samples = static_cast<double>(n) / 6.0;
  out.response = Matrix(out.rates_hz_per_s.size(), bins);

  const double centre = (static_cast<double>(n) - 1.0) / 2.0;
  std::vector<double> gauss(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (static_cast<double>(i) - centre) / out.sigma_samples;
    gauss[i] = std::exp(-0.5 * z * z);
  }
  const double sum_g = std::accumulate(gauss.begin(), gauss.end(), 0.0);
  const double norm = 1.0 / (sum_g * sum_g);
  const auto starts = frame_starts(x.size(), n, static_cast<std::size_t>(p.hop_length));

  std::vector<std::complex<double>> frame(n);
  for (std::size_t r = 0; r < out.rates_hz_per_s.size(); ++r) {
    // Atom: g[i] exp(2 pi i (f0 t + c t^2 / 2)), t = i / fs from the frame
    // start. Removing the quadratic phase first turns every start frequency
    // on the bin grid into one DFT bin.
    const double rate = out.rates_hz_per_s[r];
    std::vector<std::complex<double>> dechirp(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      dechirp[i] = gauss[i] * std::polar(1.0, -std::numbers::pi * rate * t * t);
    }
    auto acc = out.response.row(r);
    for (std::size_t start : starts) {
      for (std::size_t i = 0; i < n; ++i) frame[i] = x[start + i] * dechirp[i];
      auto spectrum = fft::forward(frame);
      for (std::size_t k = 0; k < bins; ++k) {
        acc[k] += one_sided_factor(k, n) * std::norm(spectrum[k]) * norm;
      }
    }
    for (auto& v : acc) v /= static_cast<double>(starts.size());
  }
  return out;
}

SpectralResult compute_chirplet(const AudioClip& clip, const TransformParams& params) {
  const auto response = compute_chirplet_response(clip, params);
  SpectralResult r;
  r.method = Method::Chirplet;
  r.params = with_method(params, Method::Chirplet);
  if (clip.samples.size() < static_cast<std::size_t>(params.n_fft)) {
    r.notes.push_back("zero-padded from " + std::to_string(clip.samples.size()) + " to " +
                      std::to_string(params.n_fft) + " samples");
  }
  r.freqs_hz = response.start_freqs_hz;
  r.psd_linear.assign(r.freqs_hz.size(), 0.0);
  for (std::size_t k = 0; k < r.freqs_hz.size(); ++k) {
    for (std::size_t rate = 0; rate < response.rates_hz_per_s.size(); ++rate) {
      r.psd_linear[k] = std::max(r.psd_linear[k], response.response(rate, k));
    }
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Multi-resolution

SpectralResult compute_multires(const AudioClip& clip, const TransformParams& params,
                                MultiresSeams* seams) {
  const auto p = with_method(params, Method::MultiRes);
  validate(p, clip.sample_rate_hz);
  const auto plan = resolved_plan(p, clip.sample_rate_hz);

  SpectralResult r;
  r.method = Method::MultiRes;
  r.params = p;
  if (seams) seams->first_bin_of_band.clear();

  constexpr std::size_t kEdgeBins = 3;
  for (std::size_t e = 0; e < plan.size(); ++e) {
    const auto& entry = plan[e];
    TransformParams sub = p;
    sub.n_fft = entry.n_fft;
    sub.hop_length = std::max<int>(
        1, static_cast<int>(static_cast<long long>(entry.n_fft) * p.hop_length / p.n_fft));
    sub.multires_window_plan.clear();
    auto band = compute_psd(clip, sub);
    for (const auto& note : band.notes) r.notes.push_back("band " + std::to_string(e) + ": " + note);

    std::vector<double> freqs;
    std::vector<double> power;
    for (std::size_t k = 0; k < band.freqs_hz.size(); ++k) {
      const double f = band.freqs_hz[k];
      const bool above_lo = e == 0 ? f >= entry.band_lo_hz : f > entry.band_lo_hz;
      if (above_lo && f <= entry.band_hi_hz) {
        freqs.push_back(f);
        power.push_back(band.psd_linear[k]);
      }
    }
    if (freqs.empty()) {
      r.notes.push_back("band " + std::to_string(e) + " holds no bins at n_fft " +
                        std::to_string(entry.n_fft));
      continue;
    }

    if (!r.psd_linear.empty()) {
      const std::size_t left_n = std::min(kEdgeBins, r.psd_linear.size());
      const std::size_t right_n = std::min(kEdgeBins, power.size());
      const double left =
          mean(std::span<const double>(r.psd_linear).subspan(r.psd_linear.size() - left_n));
      const double right = mean(std::span<const double>(power).first(right_n));
      const double ratio = (left > 0.0 && right > 0.0) ? left / right : 1.0;
      for (auto& v : power) v *= ratio;
      if (seams) seams->first_bin_of_band.push_back(r.psd_linear.size());
    }
    r.freqs_hz.insert(r.freqs_hz.end(), freqs.begin(), freqs.end());
    r.psd_linear.insert(r.psd_linear.end(), power.begin(), power.end());
  }
  if (r.freqs_hz.empty()) throw InvalidParams("multires plan produced no bins");
  finish(r);
  return r;
}

SpectralResult compute(const AudioClip& clip, const TransformParams& params) {
  switch (params.method) {
    case Method::FftDual: return compute_psd(clip, params);
    case Method::Cqt: return compute_cqt(clip, params);
    case Method::Wave: return compute_wavelet_packet(clip, params);
    case Method::Swt: return compute_swt(clip, params);
    case Method::Chirplet: return compute_chirplet(clip, params);
    case Method::MultiRes: return compute_multires(clip, params);
  }
  throw InvalidParams("unknown method");
}

}  // namespace specbench
