#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsepdf/log_pdf.hpp"

namespace nlsepdf {

/// Gaussian pulse train X(t) = sum_{k=-N..N} c_k F(t - kT), F(t) = alpha e^{-t^2/2tau^2}.
struct ConstellationSpec {
  int n_side = 2;
  double T = 1.0;
  double tau = 0.125;
  double alpha = 1.0;

  int count() const { return 2 * n_side + 1; }
  /// P_ave = alpha^2 tau sqrt(pi) / T
  double p_ave() const;
  void validate() const;
  /// Regime warnings (tau > T/4).
  std::vector<std::string> warnings() const;
};

/// Per-symbol received-constellation perturbation c~_k = c_k + rho_k e^{i phase_k}.
struct SymbolPerturbation {
  std::vector<double> rho;
  std::vector<double> phase;
};

/// Grid whose time window holds exactly the 2N+1 symbol slots (T_total = (2N+1)T).
GridSpec constellation_grid(const ConstellationSpec& spec, int M, int N_z, double L);

/// Channel constants that realize the requested gamma_tilde and epsilon for this
/// constellation on this grid.
ChannelParams constellation_params(const ConstellationSpec& spec, const GridSpec& grid,
                                   double gamma_tilde, double epsilon, double beta2);

/// Symbol phases must lie in {0, pi/2, pi, -pi/2}.
void validate_qpsk_phases(const ConstellationSpec& spec, const std::vector<double>& phases);

/// sqrt(2 pi) alpha tau e^{-w^2 tau^2/2} sum_k a_k e^{i w k T}
SpectralField pulse_train(const ConstellationSpec& spec, const GridSpec& grid,
                          const std::vector<cplx>& coeffs);

/// X(w) for QPSK symbols c_k = e^{i phi_k}; rejects windows where the pulse
/// spectrum at the edge exceeds 1e-8 of its peak.
SpectralField build_input(const ConstellationSpec& spec, const GridSpec& grid,
                          const std::vector<double>& phases);

/// phi_nl(w) = (2pi)^-2 int X X conj(X) (1 - e^{-mu})/mu, evaluated as
/// (1/L) int_0^L dz P_{-z}[delta^2 cubic(P_z X)].
SpectralField nonlinear_phase(const SpectralField& X, const ChannelParams& params);

/// Y = { X + pulse_train(rho e^{i phase}) + i gamma L phi_nl(X) } e^{i beta2 w^2 L/2}
SpectralField build_received(const ConstellationSpec& spec, const GridSpec& grid,
                             const std::vector<double>& phases, const SymbolPerturbation& pert,
                             const ChannelParams& params);

/// Matched-filter symbol estimates: projection onto each unit-amplitude pulse.
std::vector<cplx> matched_filter(const ConstellationSpec& spec, const SpectralField& Z);

/// -(P_ave T/(Q L)) rho^2 + log(1 + (gamma W T L P_ave / 3 pi) rho sin(dphi))
double per_symbol_log_factor(double rho, double dphi, const ConstellationSpec& spec,
                             const GridSpec& grid, const ChannelParams& params);

/// log Lambda + sum_k per_symbol_log_factor.
LogPdf product_log_pdf(const SymbolPerturbation& pert, const std::vector<double>& phases,
                       const ConstellationSpec& spec, const GridSpec& grid,
                       const ChannelParams& params);

/// log Lambda - (P_ave T/(Q L)) sum rho^2 + log(1 + kappa sum rho sin(dphi)).
LogPdf product_log_pdf_first_order(const SymbolPerturbation& pert,
                                   const std::vector<double>& phases,
                                   const ConstellationSpec& spec, const GridSpec& grid,
                                   const ChannelParams& params);

/// E[rho sin(dphi)] under the per-symbol deformed Gaussian: kappa sigma^2 / 2
/// with sigma^2 = Q L / (P_ave T).
double skew_prediction(const ConstellationSpec& spec, const GridSpec& grid,
                       const ChannelParams& params);

/// Variance sigma^2 = E[rho^2] of the per-symbol Gaussian.
double symbol_noise_variance(const ConstellationSpec& spec, const ChannelParams& params);

struct SymbolSamples {
  std::vector<double> rho;
  std::vector<double> dphi;  // wrapped to [-pi, pi)

  double mean_rho2() const;
  double mean_skew() const;       // mean of rho sin(dphi)
  double std_err_skew() const;
};

struct EmpiricalStats {
  std::vector<SymbolSamples> symbols;
  int n_runs = 0;
};

/// Forward-simulates n_runs channel realizations, derotates the dispersion,
/// removes the deterministic nonlinear phase and matched-filters each symbol.
EmpiricalStats empirical_symbol_stats(const ConstellationSpec& spec, const GridSpec& grid,
                                      const std::vector<double>& phases,
                                      const ChannelParams& params, int n_runs,
                                      std::uint64_t seed);
EmpiricalStats empirical_symbol_stats_serial(const ConstellationSpec& spec, const GridSpec& grid,
                                             const std::vector<double>& phases,
                                             const ChannelParams& params, int n_runs,
                                             std::uint64_t seed);

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<long> counts;
  double bin_width() const { return (hi - lo) / counts.size(); }
  double center(std::size_t b) const { return lo + (b + 0.5) * bin_width(); }
};

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins);

double wrap_phase(double a);

}  // namespace nlsepdf
