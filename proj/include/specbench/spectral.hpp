#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specbench/clip_store.hpp"
#include "specbench/transform_params.hpp"

namespace specbench {

/// Dense row-major matrix; rows are time frames, columns frequency bins.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

struct SpectralResult {
  Method method = Method::FftDual;
  std::vector<double> freqs_hz;
  std::vector<double> psd_linear;
  std::vector<double> psd_db;
  TransformParams params;
  SanitizeReport sanitize;
  /// Adjustments applied to the input (zero padding and the like), recorded in
  /// the manifest.
  std::vector<std::string> notes;

  bool operator==(const SpectralResult&) const = default;
};

struct Spectrogram {
  std::vector<double> times_s;
  std::vector<double> freqs_hz;
  Matrix magnitude;  // times_s.size() x freqs_hz.size()

  bool operator==(const Spectrogram&) const = default;
};

// ---------------------------------------------------------------------------
// Dual scale

double to_db(double linear);
double to_linear(double db);
std::vector<double> to_db(std::span<const double> linear);
std::vector<double> to_linear(std::span<const double> db);

std::vector<double> make_window(Window window, std::size_t n);

// ---------------------------------------------------------------------------
// Transforms. All are pure functions of (clip, params) and throw InvalidParams
// when params violate their invariants for the clip's sample rate.

/// Welch average of windowed periodograms, stride hop_length, one-sided with
/// n_fft/2 + 1 bins. Scaled by 2/(sum w)^2 (DC and Nyquist by 1/(sum w)^2) so
/// a bin-centred sine of amplitude A peaks at A^2/2 regardless of window.
/// Clips shorter than n_fft are zero-padded to n_fft.
SpectralResult compute_psd(const AudioClip& clip, const TransformParams& params);

/// Frame t covers samples [t*hop, t*hop + n_fft); scaled like compute_psd so
/// the PSD equals the mean of the spectrogram rows.
Spectrogram compute_spectrogram(const AudioClip& clip, const TransformParams& params);

/// Parameters of the lower-resolution spectrogram paired with an FFT_DUAL PSD:
/// n_fft/4 (at least 16) with hop n_fft/8.
TransformParams dual_spectrogram_params(const TransformParams& params);

std::pair<SpectralResult, Spectrogram> compute_fft_dual(const AudioClip& clip,
                                                        const TransformParams& params);

/// Geometric bins fmin * 2^(k/bpo), k < ceil(bpo * log2(fmax/fmin)). Each bin
/// correlates the signal with a windowed complex sinusoid of length
/// ceil(Q * fs / f_k), Q = 1/(2^(1/bpo) - 1), at every hop; the squared
/// magnitudes are averaged over hops. Throws ClipTooShort when the clip is
/// shorter than the window at fmin.
SpectralResult compute_cqt(const AudioClip& clip, const TransformParams& params);

/// Full wavelet packet tree; psd is leaf energy / band width, bands in
/// frequency order. Throws ClipTooShort when len < 2^levels.
SpectralResult compute_wavelet_packet(const AudioClip& clip, const TransformParams& params);

/// Undecimated transform; one band per detail level plus the final
/// approximation, reported as energy / band width.
SpectralResult compute_swt(const AudioClip& clip, const TransformParams& params);

struct ChirpletResponse {
  std::vector<double> rates_hz_per_s;
  std::vector<double> start_freqs_hz;
  /// rates x start frequencies, frame-averaged normalized |<x, atom>|^2.
  Matrix response;
  int n_fft = 0;
  int hop_length = 0;
  double sigma_samples = 0.0;

  /// Rate with the largest response at a start-frequency bin (lowest rate on ties).
  double best_rate(std::size_t bin) const;
};

/// Gaussian-windowed linear chirp dictionary (sigma = n_fft/6) over the PSD
/// bin grid x the configured rate grid.
ChirpletResponse compute_chirplet_response(const AudioClip& clip, const TransformParams& params);

/// Max over rates of the chirplet response per start frequency.
SpectralResult compute_chirplet(const AudioClip& clip, const TransformParams& params);

/// Positions of the seams in a stitched multires result: index of the first
/// bin of each band after the first.
struct MultiresSeams {
  std::vector<std::size_t> first_bin_of_band;
};

/// compute_psd per plan entry restricted to its band, concatenated; each band
/// after the first is scaled so its first three bins average to the previous
/// band's last three.
SpectralResult compute_multires(const AudioClip& clip, const TransformParams& params,
                                MultiresSeams* seams = nullptr);

/// Dispatches on params.method. FFT_DUAL returns the PSD half.
SpectralResult compute(const AudioClip& clip, const TransformParams& params);

}  // namespace specbench
