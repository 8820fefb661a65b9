#pragma once

// Independent reference evaluations used as test oracles. Nothing here calls
// the FFT path or the library's convolution kernels.

#include <cmath>
#include <random>

#include "nlsepdf/grid.hpp"

namespace oracle {

using nlsepdf::cplx;
using nlsepdf::cvec;
using nlsepdf::GridSpec;
using nlsepdf::kPi;

/// sum_{j1 + j2 - j3 = k} a_j1 b_j2 conj(c_j3), direct O(M^2) per output.
inline cvec trilinear(const cvec& a, const cvec& b, const cvec& c) {
  const int M = static_cast<int>(a.size());
  cvec out(M, cplx{});
  for (int k = 0; k < M; ++k)
    for (int j1 = 0; j1 < M; ++j1)
      for (int j2 = 0; j2 < M; ++j2) {
        const int j3 = j1 + j2 - k;
        if (j3 >= 0 && j3 < M) out[k] += a[j1] * b[j2] * std::conj(c[j3]);
      }
  return out;
}

inline cvec cubic(const cvec& a) { return trilinear(a, a, a); }

/// sum_{j1 + j2 + j3 - j4 - j5 = k} a a a conj(a) conj(a), direct O(M^4) per output.
inline cvec quintic(const cvec& a) {
  const int M = static_cast<int>(a.size());
  cvec out(M, cplx{});
  for (int k = 0; k < M; ++k)
    for (int j1 = 0; j1 < M; ++j1)
      for (int j2 = 0; j2 < M; ++j2)
        for (int j3 = 0; j3 < M; ++j3)
          for (int j4 = 0; j4 < M; ++j4) {
            const int j5 = j1 + j2 + j3 - j4 - k;
            if (j5 >= 0 && j5 < M)
              out[k] += a[j1] * a[j2] * a[j3] * std::conj(a[j4]) * std::conj(a[j5]);
          }
  return out;
}

/// u_n = delta sum_j f_j e^{-i w_j t_n}, direct DFT on the centered time grid.
inline cvec to_time(const GridSpec& g, const cvec& f) {
  cvec u(g.M, cplx{});
  for (int n = 0; n < g.M; ++n)
    for (int j = 0; j < g.M; ++j) u[n] += g.delta * f[j] * std::polar(1.0, -g.omega(j) * g.time(n));
  return u;
}

/// Exact Gaussian channel: each derotated mode is X_j plus a circular Gaussian
/// of variance Q L / delta, so log P = sum_j [log(delta/(pi Q L)) - delta |B_j|^2/(Q L)].
inline double gaussian_log_pdf(const GridSpec& g, const cvec& X, const cvec& Y, double beta2,
                               double Q, double L) {
  double s = 0.0;
  for (int j = 0; j < g.M; ++j) {
    const double w = g.omega(j);
    const cplx B = Y[j] * std::polar(1.0, -0.5 * beta2 * w * w * L) - X[j];
    s += std::log(g.delta / (kPi * Q * L)) - g.delta * std::norm(B) / (Q * L);
  }
  return s;
}

inline cvec random_field(int M, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  cvec v(M);
  for (auto& x : v) x = {n(rng), n(rng)};
  return v;
}

/// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
auto simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  auto s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * (h / 3.0);
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
