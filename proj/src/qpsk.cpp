#include "nlsepdf/qpsk.hpp"

#include <cmath>
#include <sstream>

#include "nlsepdf/action.hpp"
#include "nlsepdf/channel.hpp"
#include "nlsepdf/quadrature.hpp"
#include "nlsepdf/spectral_conv.hpp"

namespace nlsepdf {

double ConstellationSpec::p_ave() const { return alpha * alpha * tau * std::sqrt(kPi) / T; }

void ConstellationSpec::validate() const {
  if (n_side < 0) throw GuardViolation("qpsk.n_side", "n_side must be >= 0");
  if (!(T > 0.0)) throw GuardViolation("qpsk.T", "T must be > 0");
  if (!(tau > 0.0)) throw GuardViolation("qpsk.tau", "tau must be > 0");
  if (!(alpha > 0.0)) throw GuardViolation("qpsk.alpha", "alpha must be > 0");
}

std::vector<std::string> ConstellationSpec::warnings() const {
  std::vector<std::string> w;
  if (tau > T / 4.0) w.push_back("tau > T/4: pulses overlap; per-symbol factorization degrades");
  return w;
}

GridSpec constellation_grid(const ConstellationSpec& spec, int M, int N_z, double L) {
  spec.validate();
  return GridSpec::symmetric(M, 1.0 / (spec.count() * spec.T), N_z, L);
}

ChannelParams constellation_params(const ConstellationSpec& spec, const GridSpec& grid,
                                   double gamma_tilde, double epsilon, double beta2) {
  const double p = spec.p_ave();
  const double L = grid.L();
  ChannelParams params;
  params.L = L;
  params.beta2 = beta2;
  params.gamma = gamma_tilde / (p * L);
  params.Q = epsilon * 2.0 * kPi * p / (L * grid.noise_bandwidth());
  return params;
}

void validate_qpsk_phases(const ConstellationSpec& spec, const std::vector<double>& phases) {
  if (static_cast<int>(phases.size()) != spec.count())
    throw GuardViolation("qpsk.symbols", "expected " + std::to_string(spec.count()) + " symbols");
  for (double p : phases) {
    const double q = p / (0.5 * kPi);
    if (std::abs(q - std::round(q)) > 1e-12 || std::round(q) < -1 || std::round(q) > 2)
      throw GuardViolation("qpsk.symbols", "symbol phase " + std::to_string(p) +
                                               " is not in {0, pi/2, pi, -pi/2}");
  }
}

SpectralField pulse_train(const ConstellationSpec& spec, const GridSpec& grid,
                          const std::vector<cplx>& coeffs) {
  SpectralField out(grid);
  const double amp = std::sqrt(2.0 * kPi) * spec.alpha * spec.tau;
  for (int j = 0; j < grid.M; ++j) {
    const double w = grid.omega(j);
    cplx s = 0.0;
    for (int k = -spec.n_side; k <= spec.n_side; ++k)
      s += coeffs[k + spec.n_side] * std::polar(1.0, w * k * spec.T);
    out[j] = amp * std::exp(-0.5 * w * w * spec.tau * spec.tau) * s;
  }
  return out;
}

SpectralField build_input(const ConstellationSpec& spec, const GridSpec& grid,
                          const std::vector<double>& phases) {
  spec.validate();
  validate_qpsk_phases(spec, phases);
  const double edge = std::max(std::abs(grid.omega_min), std::abs(grid.omega_max()));
  if (std::exp(-0.5 * edge * edge * spec.tau * spec.tau) >= 1e-8) {
    std::ostringstream msg;
    msg << "window edge |w| = " << edge << " leaves pulse spectrum above 1e-8 of peak";
    throw GuardViolation("qpsk.window", msg.str());
  }
  std::vector<cplx> c(phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) c[k] = std::polar(1.0, phases[k]);
  return pulse_train(spec, grid, c);
}

SpectralField nonlinear_phase(const SpectralField& X, const ChannelParams& params) {
  const GridSpec& g = X.grid;
  const double d2 = g.delta * g.delta;
  if (params.beta2 == 0.0) {
    SpectralField out(g, cubic(X.values));
    for (auto& v : out.values) v *= d2;
    return out;
  }
  auto eval = [&](int n) {
    const QuadratureRule r = gauss_legendre(n, 0.0, params.L);
    std::vector<cvec> per_node(n);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
      cvec u = X.values;
      free_propagate_inplace(g, u, params.beta2, r.nodes[k]);
      cvec c = cubic(u);
      free_propagate_inplace(g, c, params.beta2, -r.nodes[k]);
      for (auto& v : c) v *= r.weights[k] * d2 / params.L;
      per_node[k] = std::move(c);
    }
    cvec acc(g.M, cplx{});
    for (const auto& c : per_node)
      for (int j = 0; j < g.M; ++j) acc[j] += c[j];
    return acc;
  };
  int n = 16;
  cvec cur = eval(n);
  while (n < 2048) {
    cvec next = eval(2 * n);
    double diff = 0.0, scale = 0.0;
    for (int j = 0; j < g.M; ++j) {
      diff = std::max(diff, std::abs(next[j] - cur[j]));
      scale = std::max(scale, std::abs(next[j]));
    }
    cur = std::move(next);
    n *= 2;
    if (diff <= 1e-12 * std::max(scale, 1e-300)) break;
  }
  return SpectralField(g, std::move(cur));
}

SpectralField build_received(const ConstellationSpec& spec, const GridSpec& grid,
                             const std::vector<double>& phases, const SymbolPerturbation& pert,
                             const ChannelParams& params) {
  const SpectralField X = build_input(spec, grid, phases);
  if (static_cast<int>(pert.rho.size()) != spec.count() ||
      static_cast<int>(pert.phase.size()) != spec.count())
    throw GuardViolation("qpsk.perturbation", "perturbation must have one entry per symbol");
  std::vector<cplx> e(spec.count());
  for (int k = 0; k < spec.count(); ++k) e[k] = std::polar(pert.rho[k], pert.phase[k]);
  const SpectralField P = pulse_train(spec, grid, e);
  SpectralField Y = X;
  for (int j = 0; j < grid.M; ++j) Y[j] += P[j];
  if (params.gamma != 0.0) {
    const SpectralField phi = nonlinear_phase(X, params);
    for (int j = 0; j < grid.M; ++j) Y[j] += kI * params.gamma * params.L * phi[j];
  }
  free_propagate_inplace(grid, Y.values, params.beta2, params.L);
  return Y;
}

std::vector<cplx> matched_filter(const ConstellationSpec& spec, const SpectralField& Z) {
  const GridSpec& g = Z.grid;
  std::vector<cplx> out(spec.count());
  const double amp = std::sqrt(2.0 * kPi) * spec.tau;
  std::vector<double> env(g.M);
  double norm = 0.0;
  for (int j = 0; j < g.M; ++j) {
    const double w = g.omega(j);
    env[j] = amp * std::exp(-0.5 * w * w * spec.tau * spec.tau);
    norm += env[j] * env[j];
  }
  for (int k = -spec.n_side; k <= spec.n_side; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < g.M; ++j) s += env[j] * std::polar(1.0, -g.omega(j) * k * spec.T) * Z[j];
    out[k + spec.n_side] = s / (spec.alpha * norm);
  }
  return out;
}

namespace {

double kappa(const ConstellationSpec& spec, const GridSpec& grid, const ChannelParams& params) {
  return params.gamma * grid.noise_bandwidth() * spec.T * params.L * spec.p_ave() / (3.0 * kPi);
}

double gauss_coeff(const ConstellationSpec& spec, const ChannelParams& params) {
  if (!(params.Q > 0.0)) throw GuardViolation("qpsk.Q", "Q must be > 0");
  return spec.p_ave() * spec.T / (params.Q * params.L);
}

LogPdf product_base(const ConstellationSpec& spec, const GridSpec& grid, const ChannelParams& params,
                    const SymbolPerturbation& pert, const std::vector<double>& phases) {
  spec.validate();
  require_compatible(grid, params);
  if (static_cast<int>(pert.rho.size()) != spec.count() ||
      static_cast<int>(pert.phase.size()) != spec.count() ||
      static_cast<int>(phases.size()) != spec.count())
    throw GuardViolation("qpsk.perturbation", "perturbation must have one entry per symbol");
  LogPdf out;
  out.grid = grid;
  out.params = params;
  out.log_p = log_measure_constants(grid, params.Q).log_lambda;
  out.warnings = spec.warnings();
  const double gt = params.gamma * spec.p_ave() * params.L;
  out.diagnostics["gamma_tilde"] = gt;
  if (std::abs(gt) > 0.3) out.warnings.push_back("gamma_tilde is not small");
  if (std::abs(params.beta2 * params.L / spec.tau) > 0.1 * spec.T)
    out.warnings.push_back("|beta2 L / tau| is not small against T: pulses broaden");
  return out;
}

}  // namespace

double per_symbol_log_factor(double rho, double dphi, const ConstellationSpec& spec,
                             const GridSpec& grid, const ChannelParams& params) {
  const double skew = 1.0 + kappa(spec, grid, params) * rho * std::sin(dphi);
  if (!(skew > 0.0))
    throw GuardViolation("qpsk.skew", "deformed-Gaussian factor is not positive");
  return -gauss_coeff(spec, params) * rho * rho + std::log(skew);
}

LogPdf product_log_pdf(const SymbolPerturbation& pert, const std::vector<double>& phases,
                       const ConstellationSpec& spec, const GridSpec& grid,
                       const ChannelParams& params) {
  LogPdf out = product_base(spec, grid, params, pert, phases);
  out.method = Method::QpskProduct;
  for (int k = 0; k < spec.count(); ++k)
    out.log_p += per_symbol_log_factor(pert.rho[k], pert.phase[k] - phases[k], spec, grid, params);
  return out;
}

LogPdf product_log_pdf_first_order(const SymbolPerturbation& pert,
                                   const std::vector<double>& phases,
                                   const ConstellationSpec& spec, const GridSpec& grid,
                                   const ChannelParams& params) {
  LogPdf out = product_base(spec, grid, params, pert, phases);
  out.method = Method::QpskProductFirstOrder;
  double r2 = 0.0, skew = 0.0;
  for (int k = 0; k < spec.count(); ++k) {
    r2 += pert.rho[k] * pert.rho[k];
    skew += pert.rho[k] * std::sin(pert.phase[k] - phases[k]);
  }
  const double bracket = 1.0 + kappa(spec, grid, params) * skew;
  if (!(bracket > 0.0)) throw GuardViolation("qpsk.skew", "first-order bracket is not positive");
  out.log_p += -gauss_coeff(spec, params) * r2 + std::log(bracket);
  return out;
}

double symbol_noise_variance(const ConstellationSpec& spec, const ChannelParams& params) {
  return params.Q * params.L / (spec.p_ave() * spec.T);
}

double skew_prediction(const ConstellationSpec& spec, const GridSpec& grid,
                       const ChannelParams& params) {
  return 0.5 * kappa(spec, grid, params) * symbol_noise_variance(spec, params);
}

double SymbolSamples::mean_rho2() const {
  double s = 0.0;
  for (double r : rho) s += r * r;
  return s / rho.size();
}

double SymbolSamples::mean_skew() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * std::sin(dphi[i]);
  return s / rho.size();
}

double SymbolSamples::std_err_skew() const {
  const double m = mean_skew();
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double y = rho[i] * std::sin(dphi[i]) - m;
    s += y * y;
  }
  const double n = static_cast<double>(rho.size());
  return std::sqrt(s / (n - 1.0) / n);
}

double wrap_phase(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

namespace {

struct DemoSetup {
  SpectralField X;
  cvec offset;  // i gamma L phi_nl, subtracted after derotation
  std::vector<cplx> c;
};

DemoSetup prepare(const ConstellationSpec& spec, const GridSpec& grid,
                  const std::vector<double>& phases, const ChannelParams& params, int n_runs) {
  if (n_runs < 1000) throw GuardViolation("qpsk.n_runs", "need at least 1000 forward runs");
  require_compatible(grid, params);
  DemoSetup s{build_input(spec, grid, phases), cvec(grid.M, cplx{}), {}};
  if (params.gamma != 0.0) {
    const SpectralField phi = nonlinear_phase(s.X, params);
    for (int j = 0; j < grid.M; ++j) s.offset[j] = kI * params.gamma * params.L * phi[j];
  }
  for (double p : phases) s.c.push_back(std::polar(1.0, p));
  return s;
}

void one_run(const ConstellationSpec& spec, const ChannelParams& params, const DemoSetup& s,
             std::uint64_t seed, int r, EmpiricalStats& out) {
  RngStream rng(seed, static_cast<std::uint64_t>(r));
  SpectralField Z = split_step_forward(s.X, params, rng);
  free_propagate_inplace(Z.grid, Z.values, params.beta2, -params.L);
  for (int j = 0; j < Z.grid.M; ++j) Z[j] -= s.offset[j];
  const std::vector<cplx> est = matched_filter(spec, Z);
  for (int k = 0; k < spec.count(); ++k) {
    const cplx e = est[k] - s.c[k];
    out.symbols[k].rho[r] = std::abs(e);
    out.symbols[k].dphi[r] = wrap_phase(std::arg(e) - std::arg(s.c[k]));
  }
}

EmpiricalStats allocate(const ConstellationSpec& spec, int n_runs) {
  EmpiricalStats out;
  out.n_runs = n_runs;
  out.symbols.resize(spec.count());
  for (auto& sym : out.symbols) {
    sym.rho.assign(n_runs, 0.0);
    sym.dphi.assign(n_runs, 0.0);
  }
  return out;
}

}  // namespace

EmpiricalStats empirical_symbol_stats(const ConstellationSpec& spec, const GridSpec& grid,
                                      const std::vector<double>& phases,
                                      const ChannelParams& params, int n_runs,
                                      std::uint64_t seed) {
  const DemoSetup s = prepare(spec, grid, phases, params, n_runs);
  EmpiricalStats out = allocate(spec, n_runs);
#pragma omp parallel for schedule(dynamic, 64)
  for (int r = 0; r < n_runs; ++r) one_run(spec, params, s, seed, r, out);
  return out;
}

EmpiricalStats empirical_symbol_stats_serial(const ConstellationSpec& spec, const GridSpec& grid,
                                             const std::vector<double>& phases,
                                             const ChannelParams& params, int n_runs,
                                             std::uint64_t seed) {
  const DemoSetup s = prepare(spec, grid, phases, params, n_runs);
  EmpiricalStats out = allocate(spec, n_runs);
  for (int r = 0; r < n_runs; ++r) one_run(spec, params, s, seed, r, out);
  return out;
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
    ++h.counts[b];
  }
  return h;
}

}  // namespace nlsepdf
