#include "nlsepdf/channel.hpp"

#include <cmath>
#include <limits>

#include "nlsepdf/spectral_conv.hpp"

namespace nlsepdf {

void ChannelParams::validate() const {
  if (!std::isfinite(beta2)) throw GuardViolation("channel.beta2", "beta2 must be finite");
  if (!std::isfinite(gamma)) throw GuardViolation("channel.gamma", "gamma must be finite");
  if (!(Q >= 0.0) || !std::isfinite(Q)) throw GuardViolation("channel.Q", "Q must be >= 0");
  if (!(L > 0.0) || !std::isfinite(L)) throw GuardViolation("channel.L", "L must be > 0");
}

void require_compatible(const GridSpec& grid, const ChannelParams& params) {
  grid.validate();
  params.validate();
  if (std::abs(grid.L() - params.L) > 1e-12 * std::max(1.0, params.L))
    throw GuardViolation("grid.L", "grid length N*dz = " + std::to_string(grid.L()) +
                                       " differs from channel L = " + std::to_string(params.L));
}

SpectralField kerr_vertex(const SpectralField& psi, double gamma) {
  SpectralField out(psi.grid, cubic(psi.values));
  const cplx scale = kI * gamma * psi.grid.delta * psi.grid.delta;
  for (auto& v : out.values) v *= scale;
  return out;
}

void free_propagate_inplace(const GridSpec& grid, std::span<cplx> psi, double beta2, double z) {
  if (beta2 == 0.0 || z == 0.0) return;
  for (int j = 0; j < grid.M; ++j) {
    const double w = grid.omega(j);
    psi[j] *= std::polar(1.0, 0.5 * beta2 * w * w * z);
  }
}

SpectralField free_propagate(const SpectralField& psi, double beta2, double z) {
  SpectralField out = psi;
  free_propagate_inplace(out.grid, out.values, beta2, z);
  return out;
}

SpectralField sample_noise_step(RngStream& rng, const GridSpec& grid, double Q) {
  if (!(Q >= 0.0)) throw GuardViolation("channel.Q", "noise intensity must be >= 0");
  SpectralField out(grid);
  if (Q == 0.0) return out;
  const double var = Q * grid.dz / grid.delta;
  for (auto& v : out.values) v = rng.complex_normal(var);
  return out;
}

namespace {

// explicit midpoint step for d psi/dz = V(psi)
void kerr_step(SpectralField& psi, double gamma, double h) {
  if (gamma == 0.0) return;
  SpectralField k1 = kerr_vertex(psi, gamma);
  SpectralField mid = psi;
  for (int j = 0; j < psi.grid.M; ++j) mid[j] += 0.5 * h * k1[j];
  SpectralField k2 = kerr_vertex(mid, gamma);
  for (int j = 0; j < psi.grid.M; ++j) psi[j] += h * k2[j];
}

SpectralField propagate(const SpectralField& X, const ChannelParams& params, RngStream* rng) {
  require_compatible(X.grid, params);
  SpectralField psi = X;
  const double h = X.grid.dz;
  for (int i = 0; i < X.grid.N; ++i) {
    free_propagate_inplace(psi.grid, psi.values, params.beta2, 0.5 * h);
    kerr_step(psi, params.gamma, h);
    free_propagate_inplace(psi.grid, psi.values, params.beta2, 0.5 * h);
    if (rng && params.Q > 0.0) {
      const SpectralField dw = sample_noise_step(*rng, psi.grid, params.Q);
      for (int j = 0; j < psi.grid.M; ++j) psi[j] += dw[j];
    }
  }
  return psi;
}

}  // namespace

SpectralField split_step_forward(const SpectralField& X, const ChannelParams& params,
                                 RngStream& rng) {
  return propagate(X, params, &rng);
}

SpectralField split_step_deterministic(const SpectralField& X, const ChannelParams& params) {
  return propagate(X, params, nullptr);
}

DimensionlessDiagnostics diagnostics(const SpectralField& X, const ChannelParams& params) {
  params.validate();
  DimensionlessDiagnostics d;
  const GridSpec& g = X.grid;
  d.p_ave = freq_norm2(g, X.values) / g.t_total();
  d.gamma_tilde = params.gamma * d.p_ave * params.L;
  d.epsilon = d.p_ave > 0.0 ? params.Q * params.L * g.noise_bandwidth() / (2.0 * kPi * d.p_ave)
                            : std::numeric_limits<double>::quiet_NaN();
  return d;
}

DimensionlessDiagnostics diagnostics_strict(const SpectralField& X, const ChannelParams& params) {
  DimensionlessDiagnostics d = diagnostics(X, params);
  if (!(d.p_ave > 0.0))
    throw GuardViolation("diagnostics.zero_power", "input carries no power; epsilon undefined");
  return d;
}

std::vector<SpectralField> forward_ensemble(const SpectralField& X, const ChannelParams& params,
                                            int n_runs, std::uint64_t seed) {
  require_compatible(X.grid, params);
  std::vector<SpectralField> out(n_runs);
#pragma omp parallel for schedule(dynamic, 16)
  for (int r = 0; r < n_runs; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    out[r] = split_step_forward(X, params, rng);
  }
  return out;
}

std::vector<SpectralField> forward_ensemble_serial(const SpectralField& X,
                                                   const ChannelParams& params, int n_runs,
                                                   std::uint64_t seed) {
  std::vector<SpectralField> out;
  out.reserve(n_runs);
  for (int r = 0; r < n_runs; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    out.push_back(split_step_forward(X, params, rng));
  }
  return out;
}

}  // namespace nlsepdf
