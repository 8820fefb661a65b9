#include "nlsepdf/grid.hpp"

#include <cmath>

#include "nlsepdf/fft.hpp"

namespace nlsepdf {

GridSpec GridSpec::symmetric(int M, double delta, int N, double L) {
  GridSpec g;
  g.M = M;
  g.N = N;
  g.delta = delta;
  g.dz = (N > 0) ? L / N : 0.0;
  g.omega_min = -kPi * delta * (M - 1);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (M < 1) throw GuardViolation("grid.M", "M must be >= 1");
  if (N < 1) throw GuardViolation("grid.N", "N must be >= 1");
  if (!(dz > 0.0) || !std::isfinite(dz)) throw GuardViolation("grid.dz", "dz must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw GuardViolation("grid.delta", "delta must be positive");
  if (!std::isfinite(omega_min)) throw GuardViolation("grid.omega_min", "omega_min must be finite");
}

SpectralField::SpectralField(const GridSpec& g, cvec v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.M)
    throw GuardViolation("field.size", "field length " + std::to_string(values.size()) +
                                           " does not match M=" + std::to_string(grid.M));
}

bool SpectralField::all_finite() const {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

cplx freq_integral(const GridSpec& g, std::span<const cplx> f) {
  cplx s = 0.0;
  for (const auto& v : f) s += v;
  return g.delta * s;
}

cplx freq_integral(const SpectralField& f) { return freq_integral(f.grid, f.values); }

double freq_norm2(const GridSpec& g, std::span<const cplx> f) {
  double s = 0.0;
  for (const auto& v : f) s += std::norm(v);
  return g.delta * s;
}

// omega_j t_n = omega_min t_n + 2 pi j (n - c) / M with c = floor(M/2); the
// j-dependent part of the shift becomes a pre-twist, the rest a post-twist.
cvec to_time(const SpectralField& f) {
  const GridSpec& g = f.grid;
  const int M = g.M;
  const int c = M / 2;
  cvec buf(M);
  for (int j = 0; j < M; ++j) buf[j] = f.values[j] * std::polar(1.0, 2.0 * kPi * double((long long)j * c % M) / M);
  fft::transform(buf, fft::Direction::Forward);
  for (int n = 0; n < M; ++n) buf[n] *= g.delta * std::polar(1.0, -g.omega_min * g.time(n));
  return buf;
}

SpectralField to_freq(const GridSpec& g, std::span<const cplx> u) {
  const int M = g.M;
  if (static_cast<int>(u.size()) != M)
    throw GuardViolation("field.size", "time-domain length does not match M");
  const int c = M / 2;
  cvec buf(M);
  for (int n = 0; n < M; ++n) buf[n] = u[n] * std::polar(1.0, g.omega_min * g.time(n));
  fft::transform(buf, fft::Direction::Backward);
  for (int j = 0; j < M; ++j) buf[j] *= g.dt() * std::polar(1.0, -2.0 * kPi * double((long long)j * c % M) / M);
  return SpectralField(g, std::move(buf));
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid == b.grid)) throw GuardViolation("grid.mismatch", "fields live on different grids");
  if (a.values.size() != b.values.size())
    throw GuardViolation("grid.mismatch", "field lengths differ");
}

}  // namespace nlsepdf
