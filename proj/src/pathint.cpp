#include "nlsepdf/pathint.hpp"

#include <cmath>
#include <sstream>

#include "nlsepdf/perturbative.hpp"
#include "nlsepdf/quadrature.hpp"

namespace nlsepdf {
namespace {

// Rotating-frame bridge for all modes; phi has N+1 rows with fixed ends.
double draw_bridge(RngStream& rng, std::vector<cvec>& phi, double var_step) {
  const int N = static_cast<int>(phi.size()) - 1;
  const std::size_t M = phi[0].size();
  double log_q = 0.0;
  for (int i = 1; i < N; ++i) {
    const double r = N - i + 1;
    const double var = var_step * (r - 1.0) / r;
    for (std::size_t j = 0; j < M; ++j) {
      const cplx mean = phi[i - 1][j] + (phi[N][j] - phi[i - 1][j]) / r;
      if (var > 0.0) {
        const cplx e = rng.complex_normal(var);
        phi[i][j] = mean + e;
        log_q += -std::log(kPi * var) - std::norm(e) / var;
      } else {
        phi[i][j] = mean;
      }
    }
  }
  return var_step > 0.0 ? log_q : std::numeric_limits<double>::quiet_NaN();
}

// -(S - S_free)/Q for a rotating-frame path under the exponential scheme.
double log_weight_rot(const GridSpec& g, const ChannelParams& params, const std::vector<cvec>& phi) {
  const int N = g.N, M = g.M;
  double acc = 0.0;
  SpectralField psi(g);
  for (int i = 1; i <= N; ++i) {
    psi.values = phi[i - 1];
    free_propagate_inplace(g, psi.values, params.beta2, g.z(i - 1));
    SpectralField D = kerr_vertex(psi, params.gamma);
    free_propagate_inplace(g, D.values, params.beta2, -g.z(i - 1));
    for (int j = 0; j < M; ++j) {
      const cplx d = phi[i][j] - phi[i - 1][j];
      acc += std::norm(d - g.dz * D[j]) - std::norm(d);
    }
  }
  return -g.delta / (params.Q * g.dz) * acc;
}

std::vector<cvec> rotating_endpoints(const SpectralField& X, const SpectralField& Y,
                                     const ChannelParams& params) {
  const GridSpec& g = X.grid;
  std::vector<cvec> phi(g.N + 1, cvec(g.M));
  phi[0] = X.values;
  phi[g.N] = free_propagate(Y, params.beta2, -params.L).values;
  return phi;
}

void check_mc_inputs(const SpectralField& X, const SpectralField& Y, const ChannelParams& params,
                     const McOptions& opts) {
  require_compatible(X.grid, params);
  require_same_grid(X, Y);
  if (!(params.Q > 0.0)) throw GuardViolation("pathint.Q", "Q must be > 0");
  if (opts.n_samples < 2) throw GuardViolation("pathint.n_samples", "need at least 2 samples");
  if (opts.chunk_size < 1) throw GuardViolation("pathint.chunk_size", "chunk size must be >= 1");
}

WeightStats run_chunk(const SpectralField& X, const ChannelParams& params,
                      const std::vector<cvec>& ends, std::uint64_t seed, long chunk, long count) {
  const GridSpec& g = X.grid;
  const double var_step = params.Q * g.dz / g.delta;
  RngStream rng(seed, static_cast<std::uint64_t>(chunk));
  std::vector<cvec> phi = ends;
  WeightStats stats;
  for (long s = 0; s < count; ++s) {
    draw_bridge(rng, phi, var_step);
    stats.add(log_weight_rot(g, params, phi));
  }
  return stats;
}

LogPdf assemble(const SpectralField& X, const SpectralField& Y, const ChannelParams& params,
                const McOptions& opts, const std::vector<WeightStats>& chunks) {
  WeightStats total;
  for (const auto& c : chunks) total.merge(c);
  if (!std::isfinite(total.max_log_weight()))
    throw GuardViolation("pathint.degenerate", "all importance weights vanished");
  LogPdf out = log_p0(X, Y, params);
  out.method = Method::PathIntegralMC;
  out.log_p += total.log_mean();
  out.std_err = total.std_err_log();
  out.diagnostics["ess"] = total.ess();
  out.diagnostics["n_samples"] = static_cast<double>(total.count());
  out.diagnostics["max_log_weight"] = total.max_log_weight();
  if (total.ess() < opts.min_ess) {
    out.reliable = false;
    std::ostringstream msg;
    msg << "effective sample size " << total.ess() << " below " << opts.min_ess;
    out.warnings.push_back(msg.str());
  }
  return out;
}

}  // namespace

void WeightStats::rescale(double new_max) {
  if (std::isfinite(max_)) {
    const double f = std::exp(max_ - new_max);
    s1_ *= f;
    s2_ *= f * f;
  }
  max_ = new_max;
}

void WeightStats::add(double log_w) {
  ++n_;
  if (log_w == -std::numeric_limits<double>::infinity()) return;
  if (log_w > max_) rescale(log_w);
  const double e = std::exp(log_w - max_);
  s1_ += e;
  s2_ += e * e;
}

void WeightStats::merge(const WeightStats& other) {
  if (other.n_ == 0) return;
  if (std::isfinite(other.max_)) {
    if (other.max_ > max_) rescale(other.max_);
    const double f = std::exp(other.max_ - max_);
    s1_ += other.s1_ * f;
    s2_ += other.s2_ * f * f;
  }
  n_ += other.n_;
}

double WeightStats::log_mean() const { return max_ + std::log(s1_ / double(n_)); }

double WeightStats::std_err_log() const {
  if (n_ < 2 || s1_ <= 0.0) return 0.0;
  const double r = double(n_) * s2_ / (s1_ * s1_);  // E[w^2]/E[w]^2
  return std::sqrt(std::max(0.0, r - 1.0) / double(n_ - 1));
}

double WeightStats::ess() const { return s2_ > 0.0 ? s1_ * s1_ / s2_ : 0.0; }

BridgeSample sample_bridge(RngStream& rng, const SpectralField& X, const SpectralField& Y,
                           const ChannelParams& params) {
  require_compatible(X.grid, params);
  require_same_grid(X, Y);
  const GridSpec& g = X.grid;
  std::vector<cvec> phi = rotating_endpoints(X, Y, params);
  const double log_q = draw_bridge(rng, phi, params.Q * g.dz / g.delta);
  PathLattice path(g, X.values, Y.values);
  for (int i = 1; i < g.N; ++i) {
    auto row = path.interior(i);
    std::copy(phi[i].begin(), phi[i].end(), row.begin());
    free_propagate_inplace(g, row, params.beta2, g.z(i));
  }
  return {std::move(path), log_q};
}

double log_importance_weight(const PathLattice& path, const ChannelParams& params) {
  require_compatible(path.grid(), params);
  if (!(params.Q > 0.0)) throw GuardViolation("pathint.Q", "Q must be > 0");
  return log_weight_rot(path.grid(), params, to_rotating_frame(path, params.beta2));
}

LogPdf estimate_log_pdf(const SpectralField& X, const SpectralField& Y, const ChannelParams& params,
                        const McOptions& opts) {
  check_mc_inputs(X, Y, params, opts);
  const std::vector<cvec> ends = rotating_endpoints(X, Y, params);
  const long n_chunks = (opts.n_samples + opts.chunk_size - 1) / opts.chunk_size;
  std::vector<WeightStats> chunks(n_chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (long c = 0; c < n_chunks; ++c) {
    const long count = std::min<long>(opts.chunk_size, opts.n_samples - c * opts.chunk_size);
    chunks[c] = run_chunk(X, params, ends, opts.seed, c, count);
  }
  return assemble(X, Y, params, opts, chunks);
}

LogPdf estimate_log_pdf_serial(const SpectralField& X, const SpectralField& Y,
                               const ChannelParams& params, const McOptions& opts) {
  check_mc_inputs(X, Y, params, opts);
  const std::vector<cvec> ends = rotating_endpoints(X, Y, params);
  const long n_chunks = (opts.n_samples + opts.chunk_size - 1) / opts.chunk_size;
  std::vector<WeightStats> chunks(n_chunks);
  for (long c = 0; c < n_chunks; ++c) {
    const long count = std::min<long>(opts.chunk_size, opts.n_samples - c * opts.chunk_size);
    chunks[c] = run_chunk(X, params, ends, opts.seed, c, count);
  }
  return assemble(X, Y, params, opts, chunks);
}

std::vector<double> sample_log_weights(const SpectralField& X, const SpectralField& Y,
                                       const ChannelParams& params, const McOptions& opts) {
  check_mc_inputs(X, Y, params, opts);
  const GridSpec& g = X.grid;
  const double var_step = params.Q * g.dz / g.delta;
  std::vector<cvec> phi = rotating_endpoints(X, Y, params);
  std::vector<double> out;
  out.reserve(opts.n_samples);
  for (long c = 0; long(out.size()) < opts.n_samples; ++c) {
    RngStream rng(opts.seed, static_cast<std::uint64_t>(c));
    for (int s = 0; s < opts.chunk_size && long(out.size()) < opts.n_samples; ++s) {
      draw_bridge(rng, phi, var_step);
      out.push_back(log_weight_rot(g, params, phi));
    }
  }
  return out;
}

LogPdf brute_force_tiny(const SpectralField& X, const SpectralField& Y, const ChannelParams& params,
                        const BruteForceOptions& opts) {
  require_compatible(X.grid, params);
  require_same_grid(X, Y);
  if (!(params.Q > 0.0)) throw GuardViolation("brute_force.Q", "Q must be > 0");
  const GridSpec& g = X.grid;
  const int slices = g.M * (g.N - 1);
  if (slices > 3)
    throw GuardViolation("brute_force.dimension",
                         "M*(N-1) = " + std::to_string(slices) + " exceeds the cap of 3");
  const LogMeasure measure = log_measure_constants(g, params.Q);
  LogPdf out;
  out.method = Method::BruteForce;
  out.grid = g;
  out.params = params;

  if (slices == 0) {
    PathLattice path(g, X.values, Y.values);
    out.log_p = measure.log_lambda_tilde -
                discrete_action(path, params, LatticeScheme::Exponential) / params.Q;
    out.diagnostics["quadrature_rel_change"] = 0.0;
    return out;
  }

  // centre on the free bridge mean, scale by its marginal standard deviation
  const double var_step = params.Q * g.dz / g.delta;
  const SpectralField B = mismatch(X, Y, params);
  struct Var {
    int i, j;
    cplx mean;
    double sd;  // per real component
  };
  std::vector<Var> vars;
  for (int i = 1; i < g.N; ++i)
    for (int j = 0; j < g.M; ++j) {
      const double s = double(i) / g.N;
      cplx mean = X[j] + s * B[j];
      mean *= std::polar(1.0, 0.5 * params.beta2 * g.omega(j) * g.omega(j) * g.z(i));
      vars.push_back({i, j, mean, std::sqrt(0.5 * var_step * i * (g.N - i) / g.N)});
    }
  const int dims = 2 * slices;

  auto integrate = [&](int n) {
    const QuadratureRule rule = gauss_legendre(n, -opts.radius, opts.radius);
    double log_jac = 0.0;
    for (const auto& v : vars) log_jac += 2.0 * std::log(v.sd);
    std::vector<int> idx(dims, 0);
    PathLattice path(g, X.values, Y.values);
    double max_l = -std::numeric_limits<double>::infinity(), acc = 0.0;
    while (true) {
      double w = 1.0;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        const double x = rule.nodes[idx[2 * k]], y = rule.nodes[idx[2 * k + 1]];
        w *= rule.weights[idx[2 * k]] * rule.weights[idx[2 * k + 1]];
        path.interior(vars[k].i)[vars[k].j] = vars[k].mean + vars[k].sd * cplx(x, y);
      }
      const double l = -discrete_action(path, params, LatticeScheme::Exponential) / params.Q;
      if (l > max_l) {
        if (std::isfinite(max_l)) acc *= std::exp(max_l - l);
        max_l = l;
      }
      acc += w * std::exp(l - max_l);
      int d = 0;
      while (d < dims && ++idx[d] == n) idx[d++] = 0;
      if (d == dims) break;
    }
    return log_jac + max_l + std::log(acc);
  };

  int n = opts.initial_nodes;
  double prev = integrate(n);
  double change = std::numeric_limits<double>::infinity();
  while (true) {
    const int next = n + n / 2;
    if (std::pow(double(next), dims) > double(opts.max_evaluations)) break;
    const double cur = integrate(next);
    change = std::abs(std::expm1(cur - prev));
    prev = cur;
    n = next;
    if (change <= opts.rel_tol) break;
  }
  out.diagnostics["quadrature_rel_change"] = change;
  out.diagnostics["nodes_per_dim"] = n;
  if (!(change <= opts.rel_tol)) {
    std::ostringstream msg;
    msg << "quadrature reached relative change " << change << " with " << n
        << " nodes per dimension; requested " << opts.rel_tol;
    throw GuardViolation("brute_force.convergence", msg.str());
  }
  out.log_p = measure.log_lambda_tilde + prev;
  return out;
}

}  // namespace nlsepdf
