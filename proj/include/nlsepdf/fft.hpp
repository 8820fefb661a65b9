#pragma once

#include <complex>
#include <span>

namespace nlsepdf::fft {

enum class Direction { Forward, Backward };

/// Unnormalized in-place DFT of arbitrary length using FFTW.
///   Forward:  a_n <- sum_k a_k exp(-2 pi i k n / n_total)
///   Backward: a_n <- sum_k a_k exp(+2 pi i k n / n_total)
/// Plans are cached per (length, direction); execution is thread-safe.
void transform(std::span<std::complex<double>> data, Direction dir);

/// Smallest length >= n whose only prime factors are 2, 3 and 5.
int good_size(int n);

}  // namespace nlsepdf::fft
