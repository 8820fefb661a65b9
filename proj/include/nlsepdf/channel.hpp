#pragma once

#include <cstdint>
#include <vector>

#include "nlsepdf/grid.hpp"
#include "nlsepdf/rng.hpp"

namespace nlsepdf {

/// Physical constants of the noisy NLSE channel.
///   beta2 : group-velocity dispersion (time^2 / distance)
///   gamma : Kerr coefficient (1 / (power * distance))
///   Q     : noise intensity, <eta eta*> = 2 pi Q delta(z - z') delta(w - w')
///   L     : propagation distance
struct ChannelParams {
  double beta2 = 0.0;
  double gamma = 0.0;
  double Q = 0.0;
  double L = 1.0;

  void validate() const;
  bool operator==(const ChannelParams&) const = default;
};

/// Throws unless grid.L() matches params.L to rounding.
void require_compatible(const GridSpec& grid, const ChannelParams& params);

struct DimensionlessDiagnostics {
  double p_ave = 0.0;
  double gamma_tilde = 0.0;
  double epsilon = 0.0;  // NaN when the input carries no power
  double snr() const { return 1.0 / epsilon; }
};

/// V_w = i gamma (2pi)^-2 int dw1 dw2 psi_w1 psi_w2 conj(psi_w3), w3 = w1 + w2 - w,
/// discretized as i gamma delta^2 * (truncated cubic convolution).
SpectralField kerr_vertex(const SpectralField& psi, double gamma);

/// Multiplies each mode by exp(i beta2 w_j^2 z / 2).
SpectralField free_propagate(const SpectralField& psi, double beta2, double z);
void free_propagate_inplace(const GridSpec& grid, std::span<cplx> psi, double beta2, double z);

/// Integrated noise increment for one z-step: independent circular Gaussians
/// per mode with E|dW_j|^2 = Q dz / delta.
SpectralField sample_noise_step(RngStream& rng, const GridSpec& grid, double Q);

/// One realization of psi(L) given psi(0) = X: symmetric split step (half
/// dispersion, explicit-midpoint Kerr step, half dispersion) followed by the
/// step's noise increment.
SpectralField split_step_forward(const SpectralField& X, const ChannelParams& params,
                                 RngStream& rng);

/// Noise-free split-step propagation; used for power-conservation studies.
SpectralField split_step_deterministic(const SpectralField& X, const ChannelParams& params);

/// p_ave = delta sum |X|^2 / T_total, gamma_tilde = gamma p_ave L,
/// epsilon = Q L W / (2 pi p_ave) with W the noise bandwidth 2 pi delta M.
DimensionlessDiagnostics diagnostics(const SpectralField& X, const ChannelParams& params);

/// As diagnostics() but throws when epsilon is undefined (zero-power input).
DimensionlessDiagnostics diagnostics_strict(const SpectralField& X, const ChannelParams& params);

/// Ensemble of forward runs. Run r uses RngStream(seed, r); the parallel and
/// serial variants return bit-identical results.
std::vector<SpectralField> forward_ensemble(const SpectralField& X, const ChannelParams& params,
                                            int n_runs, std::uint64_t seed);
std::vector<SpectralField> forward_ensemble_serial(const SpectralField& X,
                                                   const ChannelParams& params, int n_runs,
                                                   std::uint64_t seed);

}  // namespace nlsepdf
