#pragma once

#include <array>
#include <span>
#include <vector>

#include "specbench/transform_params.hpp"

namespace specbench::wavelet {

/// Orthonormal scaling (lowpass) filter, 16 taps, sum = sqrt(2), sum of
/// squares = 1.
const std::array<double, 16>& lowpass(Wavelet w);

/// Quadrature mirror: g[n] = (-1)^n h[L-1-n].
std::array<double, 16> highpass(Wavelet w);

/// One periodized analysis step: returns (approximation, detail), each half the
/// input length. Input length must be even.
std::pair<std::vector<double>, std::vector<double>> analyze(std::span<const double> x, Wavelet w);

/// Inverse of analyze.
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               Wavelet w);

/// Leaves of a full packet tree of the given depth, in natural (filter-bank)
/// order: leaf index bit i (from the top) set means the highpass branch was
/// taken at level i+1. Input length must be divisible by 2^levels.
std::vector<std::vector<double>> packet_decompose(std::span<const double> x, Wavelet w, int levels);

std::vector<double> packet_reconstruct(const std::vector<std::vector<double>>& leaves, Wavelet w,
                                       int levels);

/// Natural-order leaf index holding frequency band `band` (Gray code).
std::size_t natural_index_of_band(std::size_t band);

/// Leaf energies re-ordered from lowest to highest frequency band.
std::vector<double> packet_band_energies(std::span<const double> x, Wavelet w, int levels);

struct SwtLevels {
  /// details[j] is the level j+1 detail signal (same length as the input).
  std::vector<std::vector<double>> details;
  std::vector<double> approximation;
};

/// A-trous transform with filters scaled by 1/sqrt(2) so that the energies of
/// all details plus the final approximation sum to the input energy.
/// Convolution is circular.
SwtLevels swt(std::span<const double> x, Wavelet w, int levels);

/// Energies ordered from the lowest band (final approximation) up to the level
/// 1 detail.
std::vector<double> swt_band_energies(std::span<const double> x, Wavelet w, int levels);

}  // namespace specbench::wavelet
