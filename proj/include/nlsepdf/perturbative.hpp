#pragma once

#include "nlsepdf/log_pdf.hpp"

namespace nlsepdf {

/// B_j = Y_j e^{-i beta2 w_j^2 L/2} - X_j.
SpectralField mismatch(const SpectralField& X, const SpectralField& Y, const ChannelParams& params);

/// lambda(z) = X + z B / L.
SpectralField interpolant(const SpectralField& X, const SpectralField& B, double z, double L);

/// Zero-order (Gaussian channel) density:
///   log P0 = log Lambda - delta sum |B_j|^2 / (Q L).
LogPdf log_p0(const SpectralField& X, const SpectralField& Y, const ChannelParams& params);

/// z-rule for the G integral and the bandwidth term.
///   GaussLegendre : continuum integral over [0, L]
///   Lattice       : left-endpoint sums on the z-lattice, matching the causal
///                   discretization of the path integral at finite N
enum class ZRule { GaussLegendre, Lattice };

/// Phase kernel of the G integrand. RunningZ uses exp(i beta2 (w-w1)(w-w2) z);
/// Literal multiplies the exponent by an extra factor L.
enum class ExponentConvention { RunningZ, Literal };

struct FirstOrderOptions {
  ZRule rule = ZRule::GaussLegendre;
  int nodes = 32;
  bool self_check = true;  // double the nodes until the result moves < 1e-8
  ExponentConvention exponent = ExponentConvention::RunningZ;
};

struct FirstOrderTerms {
  double w_term = 0.0;  // Q-independent bandwidth term
  cplx G{};             // scales as 1/Q
  double total = 0.0;   // w_term + Im G
  int nodes_used = 0;
  bool converged = true;
};

FirstOrderTerms first_order_terms(const SpectralField& X, const SpectralField& Y,
                                  const ChannelParams& params, const FirstOrderOptions& opts = {});

/// The first-order bracket: P1 = P0 * first_order_correction, i.e.
/// d log P / d gamma at gamma = 0.
double first_order_correction(const SpectralField& X, const SpectralField& Y,
                              const ChannelParams& params, const FirstOrderOptions& opts = {});

/// The per-z integrand kernel sum_j B_j conj(K_j(z)), with
/// K(z) = P_{-s}[delta^2 cubic(P_s lambda(z))]; exposed for cross-checks.
cplx g_integrand(const SpectralField& X, const SpectralField& B, const ChannelParams& params,
                 double z, ExponentConvention exponent);

/// order 0: log P0; order 1: log P0 + log(1 + gamma * bracket), requiring
/// |gamma * bracket| < 1.
LogPdf series_log_pdf(const SpectralField& X, const SpectralField& Y, const ChannelParams& params,
                      int order, const FirstOrderOptions& opts = {});

}  // namespace nlsepdf
