#pragma once

#include <cstdint>
#include <limits>

#include "nlsepdf/action.hpp"
#include "nlsepdf/log_pdf.hpp"
#include "nlsepdf/rng.hpp"

namespace nlsepdf {

struct BridgeSample {
  PathLattice path;
  /// Log-density of the interior slices under the sampler (NaN when Q = 0).
  double log_density;
};

/// Draws interior slices from the exact gamma = 0 conditional law: in the
/// rotating frame each mode is a complex Brownian bridge from X_j to
/// e^{-i beta2 w_j^2 L/2} Y_j with per-step variance Q dz / delta.
BridgeSample sample_bridge(RngStream& rng, const SpectralField& X, const SpectralField& Y,
                           const ChannelParams& params);

/// Importance log-weight -(S - S_free)/Q of a path under the exponential
/// lattice scheme; identically zero for gamma = 0.
double log_importance_weight(const PathLattice& path, const ChannelParams& params);

/// Running statistics of importance weights held as (count, max log w,
/// sum e^{lw - max}, sum e^{2(lw - max)}). Merging is associative.
class WeightStats {
 public:
  void add(double log_w);
  void merge(const WeightStats& other);

  long count() const { return n_; }
  double log_mean() const;
  /// Delta-method standard error of log_mean().
  double std_err_log() const;
  double ess() const;
  double max_log_weight() const { return max_; }

 private:
  void rescale(double new_max);
  long n_ = 0;
  double max_ = -std::numeric_limits<double>::infinity();
  double s1_ = 0.0;
  double s2_ = 0.0;
};

struct McOptions {
  long n_samples = 10000;
  std::uint64_t seed = 1;
  int chunk_size = 1024;
  double min_ess = 10.0;
};

/// Monte-Carlo estimate of log P[Y|X] from the causal lattice integral with
/// the free bridge as importance density:
///   log P = log P_free(Y|X) + log E_bridge[exp(-(S - S_free)/Q)].
/// Chunk c of samples uses RngStream(seed, c), so the result is independent
/// of the thread count.
LogPdf estimate_log_pdf(const SpectralField& X, const SpectralField& Y,
                        const ChannelParams& params, const McOptions& opts);
/// Single-threaded reference; bit-identical to estimate_log_pdf.
LogPdf estimate_log_pdf_serial(const SpectralField& X, const SpectralField& Y,
                               const ChannelParams& params, const McOptions& opts);

/// Per-sample log-weights for diagnostics (first n samples of the stream layout).
std::vector<double> sample_log_weights(const SpectralField& X, const SpectralField& Y,
                                       const ChannelParams& params, const McOptions& opts);

struct BruteForceOptions {
  double rel_tol = 1e-9;
  double radius = 8.0;  // box half-width in free-bridge standard deviations
  long max_evaluations = 40'000'000;
  int initial_nodes = 16;
};

/// Deterministic tensor Gauss-Legendre evaluation of the lattice integral
/// (exponential scheme) for M*(N-1) <= 3 interior complex variables. Node
/// counts grow until successive estimates agree to rel_tol.
LogPdf brute_force_tiny(const SpectralField& X, const SpectralField& Y,
                        const ChannelParams& params, const BruteForceOptions& opts = {});

}  // namespace nlsepdf
