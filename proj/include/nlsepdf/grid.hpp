#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsepdf {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Thrown when a precondition of a numerical routine is violated. The guard
/// name identifies the violated condition so front-ends can report it.
class GuardViolation : public std::runtime_error {
 public:
  GuardViolation(std::string guard, const std::string& what)
      : std::runtime_error(guard + ": " + what), guard_(std::move(guard)) {}
  const std::string& guard() const noexcept { return guard_; }

 private:
  std::string guard_;
};

/// Joint lattice in propagation distance z and angular frequency omega.
///
/// Frequencies are omega_j = omega_min + 2*pi*delta*j for j = 0..M-1, so the
/// window width is W = 2*pi*delta*(M-1) and the implied time window is
/// T_total = 1/delta. Slices in z are z_i = i*dz for i = 0..N.
struct GridSpec {
  int M = 1;
  int N = 1;
  double dz = 1.0;
  double delta = 1.0;
  double omega_min = 0.0;

  /// Symmetric window: omega_min = -pi*delta*(M-1), dz = L/N.
  static GridSpec symmetric(int M, double delta, int N, double L);

  double L() const { return dz * N; }
  double omega(int j) const { return omega_min + 2.0 * kPi * delta * j; }
  double omega_max() const { return omega(M - 1); }
  double W() const { return 2.0 * kPi * delta * (M - 1); }
  /// Bandwidth carried by M modes of width 2*pi*delta. This is the W that
  /// multiplies the noise-signal contraction terms on the lattice.
  double noise_bandwidth() const { return 2.0 * kPi * delta * M; }
  double t_total() const { return 1.0 / delta; }
  double dt() const { return 1.0 / (M * delta); }
  /// Centered time samples t_n = (n - floor(M/2)) * dt.
  double time(int n) const { return (n - M / 2) * dt(); }
  double z(int i) const { return i * dz; }

  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Complex spectral amplitudes over the frequency grid at one z.
struct SpectralField {
  GridSpec grid;
  cvec values;

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g) : grid(g), values(g.M) {}
  SpectralField(const GridSpec& g, cvec v);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t j) { return values[j]; }
  const cplx& operator[](std::size_t j) const { return values[j]; }
  bool all_finite() const;
};

/// Discrete rule for the frequency measure: delta * sum_j f_j.
cplx freq_integral(const SpectralField& f);
cplx freq_integral(const GridSpec& g, std::span<const cplx> f);
/// delta * sum_j |f_j|^2
double freq_norm2(const GridSpec& g, std::span<const cplx> f);

/// u(t_n) = delta * sum_j psi_j exp(-i omega_j t_n) on the centered time grid.
cvec to_time(const SpectralField& f);
/// psi_j = dt * sum_n u_n exp(i omega_j t_n); exact inverse of to_time.
SpectralField to_freq(const GridSpec& g, std::span<const cplx> u);

void require_same_grid(const SpectralField& a, const SpectralField& b);

}  // namespace nlsepdf
