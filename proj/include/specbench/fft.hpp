#pragma once

#include <complex>
#include <span>
#include <vector>

namespace specbench::fft {

/// Forward DFT of a real sequence of any length n >= 1; returns the n/2 + 1
/// non-negative-frequency bins, X[k] = sum x[t] exp(-2 pi i k t / n).
std::vector<std::complex<double>> forward_real(std::span<const double> input);

/// Forward complex DFT of any length n >= 1, same sign convention.
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> input);

}  // namespace specbench::fft
