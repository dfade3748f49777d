#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specbench {

enum class Method { FftDual, Cqt, Wave, Swt, Chirplet, MultiRes };
enum class Window { Hann, Hamming, Rectangular };
enum class Wavelet { Sym8, Db8 };

inline constexpr Method kAllMethods[] = {Method::FftDual, Method::Cqt,      Method::Wave,
                                         Method::Swt,     Method::Chirplet, Method::MultiRes};

/// Method tags as they appear in exports: FFT_DUAL, CQT, WAVE, SWT, CHIRPLET, MULTI_RES.
std::string_view to_string(Method m);
std::string_view to_string(Window w);
std::string_view to_string(Wavelet w);
/// Throws InvalidParams on an unknown tag. Case-insensitive.
Method parse_method(std::string_view text);
Window parse_window(std::string_view text);
Wavelet parse_wavelet(std::string_view text);

struct BandPlanEntry {
  int n_fft = 2048;
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;

  bool operator==(const BandPlanEntry&) const = default;
};

struct TransformParams {
  Method method = Method::FftDual;
  int n_fft = 2048;
  int hop_length = 512;
  Window window = Window::Hann;
  double fmin_hz = 32.70;
  /// Unset means the clip's Nyquist frequency.
  std::optional<double> fmax_hz;
  int bins_per_octave = 12;
  Wavelet wavelet = Wavelet::Sym8;
  int decomposition_levels = 6;
  std::vector<double> chirp_rates_hz_per_s = {-2000.0, -1000.0, -500.0, 0.0, 500.0, 1000.0, 2000.0};
  /// Empty means default_multires_plan() for the clip's sample rate.
  std::vector<BandPlanEntry> multires_window_plan;

  bool operator==(const TransformParams&) const = default;
};

/// 4096 for 0-1 kHz, 2048 for 1-4 kHz, 512 for 4 kHz to Nyquist. Bands are
/// cut at Nyquist and dropped when they start at or above it.
std::vector<BandPlanEntry> default_multires_plan(int sample_rate_hz);

double resolved_fmax(const TransformParams& params, int sample_rate_hz);
std::vector<BandPlanEntry> resolved_plan(const TransformParams& params, int sample_rate_hz);

/// The checks that hold for any sample rate: FFT size, hop, fmin below an
/// explicit fmax, bins per octave, levels, finite chirp rates.
void validate_rate_free(const TransformParams& params);

/// Checks every invariant against the given sample rate; throws InvalidParams.
/// The multires band plan is only checked when method is MULTI_RES.
void validate(const TransformParams& params, int sample_rate_hz);

/// Plan entries must be valid FFT sizes with contiguous, non-overlapping
/// bands covering (fmin_hz, fmax_hz].
void validate_multires_plan(const TransformParams& params, int sample_rate_hz);

bool is_power_of_two(int n);

}  // namespace specbench
