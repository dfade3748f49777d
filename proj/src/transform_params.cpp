#include "specbench/transform_params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "specbench/errors.hpp"
#include "specbench/format.hpp"

namespace specbench {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::FftDual: return "FFT_DUAL";
    case Method::Cqt: return "CQT";
    case Method::Wave: return "WAVE";
    case Method::Swt: return "SWT";
    case Method::Chirplet: return "CHIRPLET";
    case Method::MultiRes: return "MULTI_RES";
  }
  return "?";
}

std::string_view to_string(Window w) {
  switch (w) {
    case Window::Hann: return "hann";
    case Window::Hamming: return "hamming";
    case Window::Rectangular: return "rectangular";
  }
  return "?";
}

std::string_view to_string(Wavelet w) { return w == Wavelet::Db8 ? "db8" : "sym8"; }

Method parse_method(std::string_view text) {
  auto u = upper(text);
  for (Method m : kAllMethods)
    if (u == to_string(m)) return m;
  if (u == "MULTIRES") return Method::MultiRes;
  throw InvalidParams("unknown method '" + std::string(text) + "'");
}

Window parse_window(std::string_view text) {
  auto u = upper(text);
  if (u == "HANN") return Window::Hann;
  if (u == "HAMMING") return Window::Hamming;
  if (u == "RECTANGULAR" || u == "RECT" || u == "BOXCAR") return Window::Rectangular;
  throw InvalidParams("unknown window '" + std::string(text) + "'");
}

Wavelet parse_wavelet(std::string_view text) {
  auto u = upper(text);
  if (u == "SYM8") return Wavelet::Sym8;
  if (u == "DB8") return Wavelet::Db8;
  throw InvalidParams("unknown wavelet '" + std::string(text) + "'");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<BandPlanEntry> default_multires_plan(int sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  std::vector<BandPlanEntry> plan;
  for (const BandPlanEntry& e : {BandPlanEntry{4096, 0.0, 1000.0}, BandPlanEntry{2048, 1000.0, 4000.0},
                                 BandPlanEntry{512, 4000.0, nyquist}}) {
    if (e.band_lo_hz >= nyquist) break;
    plan.push_back({e.n_fft, e.band_lo_hz, std::min(e.band_hi_hz, nyquist)});
  }
  return plan;
}

double resolved_fmax(const TransformParams& params, int sample_rate_hz) {
  return params.fmax_hz.value_or(sample_rate_hz / 2.0);
}

std::vector<BandPlanEntry> resolved_plan(const TransformParams& params, int sample_rate_hz) {
  return params.multires_window_plan.empty() ? default_multires_plan(sample_rate_hz)
                                             : params.multires_window_plan;
}

void validate_rate_free(const TransformParams& p) {
  auto fail = [](const std::string& msg) { throw InvalidParams(msg); };
  if (!is_power_of_two(p.n_fft) || p.n_fft < 16 || p.n_fft > 65536)
    fail("n_fft " + std::to_string(p.n_fft) + " must be a power of two in [16, 65536]");
  if (p.hop_length < 1 || p.hop_length > p.n_fft)
    fail("hop_length " + std::to_string(p.hop_length) + " must be in [1, n_fft]");
  if (!(p.fmin_hz > 0.0)) fail("fmin_hz must be positive");
  if (p.fmax_hz && !(p.fmin_hz < *p.fmax_hz)) fail("fmin_hz must be below fmax_hz");
  if (p.bins_per_octave < 1) fail("bins_per_octave must be >= 1");
  if (p.decomposition_levels < 1 || p.decomposition_levels > 24)
    fail("decomposition_levels must be in [1, 24]");
  for (double r : p.chirp_rates_hz_per_s)
    if (!std::isfinite(r)) fail("chirp rates must be finite");
}

void validate(const TransformParams& p, int sample_rate_hz) {
  auto fail = [](const std::string& msg) { throw InvalidParams(msg); };
  if (sample_rate_hz <= 0) fail("sample rate must be positive");
  validate_rate_free(p);
  const double nyquist = sample_rate_hz / 2.0;
  const double fmax = resolved_fmax(p, sample_rate_hz);
  if (!(p.fmin_hz < fmax)) fail("fmin_hz must be below fmax_hz");
  if (fmax > nyquist) fail("fmax_hz " + fmt_fixed(fmax, 2) + " exceeds Nyquist " + fmt_fixed(nyquist, 2));
  if (p.method == Method::MultiRes) validate_multires_plan(p, sample_rate_hz);
}

void validate_multires_plan(const TransformParams& p, int sample_rate_hz) {
  auto fail = [](const std::string& msg) { throw InvalidParams(msg); };
  auto check_nfft = [&](int n) {
    if (!is_power_of_two(n) || n < 16 || n > 65536)
      fail("n_fft " + std::to_string(n) + " must be a power of two in [16, 65536]");
  };
  const double nyquist = sample_rate_hz / 2.0;
  const double fmax = resolved_fmax(p, sample_rate_hz);
  const auto plan = resolved_plan(p, sample_rate_hz);
  if (plan.empty()) fail("multires plan is empty");
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& e = plan[i];
    check_nfft(e.n_fft);
    if (!(e.band_lo_hz < e.band_hi_hz)) fail("multires band " + std::to_string(i) + " is empty");
    if (i > 0 && e.band_lo_hz != plan[i - 1].band_hi_hz)
      fail("multires bands " + std::to_string(i - 1) + " and " + std::to_string(i) +
           " leave a gap or overlap");
  }
  if (plan.front().band_lo_hz > p.fmin_hz || plan.back().band_hi_hz < fmax)
    fail("multires plan does not cover (fmin_hz, fmax_hz]");
  if (plan.back().band_hi_hz > nyquist) fail("multires plan extends beyond Nyquist");
}

}  // namespace specbench
