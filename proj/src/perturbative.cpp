#include "nlsepdf/perturbative.hpp"

#include <cmath>

#include "nlsepdf/action.hpp"
#include "nlsepdf/quadrature.hpp"
#include "nlsepdf/spectral_conv.hpp"

namespace nlsepdf {

SpectralField mismatch(const SpectralField& X, const SpectralField& Y, const ChannelParams& params) {
  require_same_grid(X, Y);
  SpectralField B = free_propagate(Y, params.beta2, -params.L);
  for (int j = 0; j < X.grid.M; ++j) B[j] -= X[j];
  return B;
}

SpectralField interpolant(const SpectralField& X, const SpectralField& B, double z, double L) {
  SpectralField lam = X;
  const double s = z / L;
  for (int j = 0; j < X.grid.M; ++j) lam[j] += s * B[j];
  return lam;
}

LogPdf log_p0(const SpectralField& X, const SpectralField& Y, const ChannelParams& params) {
  require_compatible(X.grid, params);
  if (!(params.Q > 0.0)) throw GuardViolation("series.Q", "Q must be > 0");
  const SpectralField B = mismatch(X, Y, params);
  const LogMeasure m = log_measure_constants(X.grid, params.Q);
  LogPdf out;
  out.method = Method::Series0;
  out.grid = X.grid;
  out.params = params;
  out.log_p = m.log_lambda - freq_norm2(X.grid, B.values) / (params.Q * params.L);
  out.diagnostics["log_lambda"] = m.log_lambda;
  return out;
}

cplx g_integrand(const SpectralField& X, const SpectralField& B, const ChannelParams& params,
                 double z, ExponentConvention exponent) {
  const GridSpec& g = X.grid;
  const double s = exponent == ExponentConvention::RunningZ ? z : z * params.L;
  SpectralField lam = interpolant(X, B, z, params.L);
  free_propagate_inplace(g, lam.values, params.beta2, s);
  cvec K = cubic(lam.values);
  free_propagate_inplace(g, K, params.beta2, -s);
  const double d2 = g.delta * g.delta;
  cplx acc = 0.0;
  for (int j = 0; j < g.M; ++j) acc += B[j] * std::conj(d2 * K[j]);
  return acc;
}

namespace {

cplx g_by_nodes(const SpectralField& X, const SpectralField& B, const ChannelParams& params,
                const std::vector<double>& z, const std::vector<double>& w,
                ExponentConvention exponent) {
  std::vector<cplx> per_node(z.size());
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < z.size(); ++k)
    per_node[k] = w[k] * g_integrand(X, B, params, z[k], exponent);
  cplx acc = 0.0;
  for (const auto& v : per_node) acc += v;
  return (2.0 * X.grid.delta / params.Q) * acc / params.L;
}

}  // namespace

FirstOrderTerms first_order_terms(const SpectralField& X, const SpectralField& Y,
                                  const ChannelParams& params, const FirstOrderOptions& opts) {
  require_compatible(X.grid, params);
  require_same_grid(X, Y);
  if (!(params.Q > 0.0)) throw GuardViolation("series.Q", "Q must be > 0");
  const GridSpec& g = X.grid;
  const SpectralField B = mismatch(X, Y, params);
  const SpectralField Yr = free_propagate(Y, params.beta2, -params.L);

  FirstOrderTerms t;
  double z_kernel = params.L;  // 6 * int_0^L dz/L z(L-z)/L
  if (opts.rule == ZRule::Lattice) {
    const int N = g.N;
    std::vector<double> z(N), w(N, g.dz);
    double k_sum = 0.0;
    for (int k = 0; k < N; ++k) {
      z[k] = g.z(k);
      k_sum += g.dz * double(k) * (N - k) / N;
    }
    z_kernel = 6.0 * k_sum / N;
    t.G = g_by_nodes(X, B, params, z, w, opts.exponent);
    t.nodes_used = N;
  } else {
    int n = std::max(1, opts.nodes);
    auto eval = [&](int nodes) {
      const QuadratureRule r = gauss_legendre(nodes, 0.0, params.L);
      return g_by_nodes(X, B, params, r.nodes, r.weights, opts.exponent);
    };
    t.G = eval(n);
    if (opts.self_check) {
      t.converged = false;
      while (n <= 1024) {
        const cplx G2 = eval(2 * n);
        const bool ok = std::abs(G2 - t.G) <= 1e-8 * std::max(1.0, std::abs(G2));
        t.G = G2;
        n *= 2;
        if (ok) {
          t.converged = true;
          break;
        }
      }
    }
    t.nodes_used = n;
  }
  cplx overlap = 0.0;
  for (int j = 0; j < g.M; ++j) overlap += Yr[j] * std::conj(X[j]);
  overlap *= g.delta;
  t.w_term = g.noise_bandwidth() * z_kernel / (3.0 * kPi) * overlap.imag();
  t.total = t.w_term + t.G.imag();
  return t;
}

double first_order_correction(const SpectralField& X, const SpectralField& Y,
                              const ChannelParams& params, const FirstOrderOptions& opts) {
  return first_order_terms(X, Y, params, opts).total;
}

LogPdf series_log_pdf(const SpectralField& X, const SpectralField& Y, const ChannelParams& params,
                      int order, const FirstOrderOptions& opts) {
  if (order != 0 && order != 1) throw GuardViolation("series.order", "order must be 0 or 1");
  LogPdf out = log_p0(X, Y, params);
  if (order == 0 || params.gamma == 0.0) {
    out.method = order == 0 ? Method::Series0 : Method::Series1;
    return out;
  }
  const FirstOrderTerms t = first_order_terms(X, Y, params, opts);
  const double x = params.gamma * t.total;
  if (!(std::abs(x) < 1.0))
    throw GuardViolation("series.validity",
                         "|gamma * first-order bracket| = " + std::to_string(std::abs(x)) +
                             " >= 1; use the small-noise method");
  out.method = Method::Series1;
  out.log_p += std::log1p(x);
  out.diagnostics["first_order_bracket"] = t.total;
  out.diagnostics["w_term"] = t.w_term;
  out.diagnostics["im_G"] = t.G.imag();
  out.diagnostics["z_nodes"] = t.nodes_used;
  if (!t.converged) out.warnings.push_back("G quadrature did not meet the 1e-8 self-check");
  return out;
}

}  // namespace nlsepdf
