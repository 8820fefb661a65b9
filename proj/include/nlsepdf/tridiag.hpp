#pragma once

#include <span>
#include <vector>

namespace nlsepdf {

/// Thomas algorithm for a x_{i-1} + b x_i + c x_{i+1} = d_i with constant
/// real coefficients and arbitrary (complex) right-hand side. Solves in
/// place; requires a nonsingular system without pivoting.
template <typename T>
void solve_tridiagonal_constant(double a, double b, double c, std::span<T> d) {
  const std::size_t n = d.size();
  if (n == 0) return;
  std::vector<double> cp(n);
  cp[0] = c / b;
  d[0] /= b;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = b - a * cp[i - 1];
    cp[i] = c / m;
    d[i] = (d[i] - a * d[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
}

}  // namespace nlsepdf
