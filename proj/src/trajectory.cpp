#include "nlsepdf/trajectory.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nlsepdf/spectral_conv.hpp"
#include "nlsepdf/tridiag.hpp"

namespace nlsepdf {
namespace {

using Rows = std::vector<cvec>;

Rows lab_rows(const PathLattice& p) {
  Rows r(p.rows());
  for (int i = 0; i < p.rows(); ++i) r[i] = cvec(p.row(i).begin(), p.row(i).end());
  return r;
}

void rotate(const GridSpec& g, double beta2, Rows& rows, double sign) {
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    free_propagate_inplace(g, rows[i], beta2, sign * g.z(i));
}

// Nonlinear right-hand side of the trajectory equation at one slice (lab frame).
cvec nonlinear_terms(const GridSpec& g, const ChannelParams& p, const cvec& psi, const cvec& l0,
                     bool include_quintic) {
  const int M = g.M;
  cvec out(M, cplx{});
  if (p.gamma == 0.0) return out;
  const double d2 = g.delta * g.delta;
  const cvec t4 = trilinear(l0, psi, psi);
  cvec mu_term(M, cplx{});
  if (p.beta2 != 0.0) {
    cvec w2psi(M);
    for (int j = 0; j < M; ++j) w2psi[j] = g.omega(j) * g.omega(j) * psi[j];
    const cvec c0 = cubic(psi);
    const cvec c3 = trilinear(psi, psi, w2psi);
    const cvec c1 = trilinear(w2psi, psi, psi);
    for (int j = 0; j < M; ++j) {
      const double w2 = g.omega(j) * g.omega(j);
      mu_term[j] = kI * p.beta2 * 0.5 * (w2 * c0[j] + c3[j] - 2.0 * c1[j]);
    }
  }
  for (int j = 0; j < M; ++j) out[j] = kI * p.gamma * d2 * (4.0 * t4[j] - mu_term[j]);
  if (include_quintic) {
    const cvec q = quintic(psi);
    const double d4 = d2 * d2;
    for (int j = 0; j < M; ++j) out[j] += 3.0 * p.gamma * p.gamma * d4 * q[j];
  }
  return out;
}

// Rotating-frame field split as phi_i = phi_0 + z_i * slope + dev_i. The straight
// part has an exact derivative and zero second difference, so only dev is
// differenced and round-off does not scale with |phi|.
struct Split {
  Rows dev;
  cvec slope;
};

Split split_linear(const GridSpec& g, const Rows& phi) {
  const int N = g.N, M = g.M;
  Split s{Rows(N + 1, cvec(M, cplx{})), cvec(M)};
  const double L = g.L();
  for (int j = 0; j < M; ++j) s.slope[j] = (phi[N][j] - phi[0][j]) / L;
  for (int i = 1; i < N; ++i)
    for (int j = 0; j < M; ++j) s.dev[i][j] = phi[i][j] - (phi[0][j] + g.z(i) * s.slope[j]);
  return s;
}

// L0[psi] at interior slice i via the rotating frame: e^{i b w^2 z/2} d_z phi.
cvec l0_interior(const GridSpec& g, double beta2, const Split& f, int i) {
  cvec d(g.M);
  for (int j = 0; j < g.M; ++j)
    d[j] = f.slope[j] + (f.dev[i + 1][j] - f.dev[i - 1][j]) / (2.0 * g.dz);
  free_propagate_inplace(g, d, beta2, g.z(i));
  return d;
}

struct SliceEval {
  Rows rhs;  // rotating-frame nonlinear terms, interior slices
  ResidualParts parts;
};

SliceEval evaluate(const GridSpec& g, const ChannelParams& p, const Rows& phi, const Rows& psi,
                   bool include_quintic) {
  const int N = g.N, M = g.M;
  SliceEval ev;
  ev.rhs.assign(N + 1, cvec(M, cplx{}));
  const Split f = split_linear(g, phi);
  std::vector<double> lhs2(N + 1, 0.0), nl2(N + 1, 0.0), lin2(N + 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 1; i < N; ++i) {
    const cvec l0 = l0_interior(g, p.beta2, f, i);
    cvec nl = nonlinear_terms(g, p, psi[i], l0, include_quintic);
    double a = 0.0, b = 0.0, c = 0.0;
    cvec d2phi(M);
    for (int j = 0; j < M; ++j)
      d2phi[j] = (f.dev[i + 1][j] - 2.0 * f.dev[i][j] + f.dev[i - 1][j]) / (g.dz * g.dz);
    free_propagate_inplace(g, d2phi, p.beta2, g.z(i));
    for (int j = 0; j < M; ++j) {
      a += std::norm(d2phi[j] - nl[j]);
      b += std::norm(nl[j]);
      c += std::norm(l0[j]);
    }
    lhs2[i] = a;
    nl2[i] = b;
    lin2[i] = c;
    free_propagate_inplace(g, nl, p.beta2, -g.z(i));
    ev.rhs[i] = std::move(nl);
  }
  double sa = 0.0, sb = 0.0, sc = 0.0;
  for (int i = 1; i < N; ++i) {
    sa += lhs2[i];
    sb += nl2[i];
    sc += lin2[i];
  }
  const double h = g.dz * g.delta;
  ev.parts.absolute = std::sqrt(h * sa);
  ev.parts.nonlinear = std::sqrt(h * sb);
  ev.parts.linear_scale = std::sqrt(h * sc) / p.L;
  return ev;
}

PathLattice from_rotating(const GridSpec& g, double beta2, const Rows& phi, const SpectralField& X,
                          const SpectralField& Y) {
  PathLattice path(g, X.values, Y.values);
  for (int i = 1; i < g.N; ++i) {
    auto row = path.interior(i);
    std::copy(phi[i].begin(), phi[i].end(), row.begin());
    free_propagate_inplace(g, row, beta2, g.z(i));
  }
  return path;
}

}  // namespace

double ResidualParts::relative() const {
  const double scale = nonlinear + linear_scale;
  if (scale > 0.0) return absolute / scale;
  return absolute;
}

double tolerance_floor(int N) { return 4.0 * std::numeric_limits<double>::epsilon() * double(N) * N; }

Trajectory initial_guess(const SpectralField& X, const SpectralField& Y, const ChannelParams& params) {
  require_compatible(X.grid, params);
  require_same_grid(X, Y);
  const GridSpec& g = X.grid;
  const SpectralField B = mismatch(X, Y, params);
  PathLattice path(g, X.values, Y.values);
  for (int i = 1; i < g.N; ++i) {
    const SpectralField lam = interpolant(X, B, g.z(i), params.L);
    auto row = path.interior(i);
    std::copy(lam.values.begin(), lam.values.end(), row.begin());
    free_propagate_inplace(g, row, params.beta2, g.z(i));
  }
  return Trajectory{std::move(path), 0.0, 0, true, {}};
}

ResidualParts trajectory_residual_parts(const PathLattice& traj, const ChannelParams& params,
                                        bool include_quintic) {
  const GridSpec& g = traj.grid();
  require_compatible(g, params);
  if (g.N < 4) throw GuardViolation("trajectory.N", "residual needs N >= 4");
  Rows psi = lab_rows(traj);
  Rows phi = psi;
  rotate(g, params.beta2, phi, -1.0);
  return evaluate(g, params, phi, psi, include_quintic).parts;
}

double trajectory_residual(const PathLattice& traj, const ChannelParams& params,
                           bool include_quintic) {
  return trajectory_residual_parts(traj, params, include_quintic).absolute;
}

Trajectory solve_trajectory(const SpectralField& X, const SpectralField& Y,
                            const ChannelParams& params, const SolveOptions& opts) {
  require_compatible(X.grid, params);
  require_same_grid(X, Y);
  const GridSpec& g = X.grid;
  const int N = g.N, M = g.M;
  if (N < 4) throw GuardViolation("trajectory.N", "solver needs N >= 4");
  const double floor = tolerance_floor(N);
  if (opts.tol < floor) {
    std::ostringstream msg;
    msg << "tol " << opts.tol << " is below the round-off floor " << floor << " of the N=" << N
        << " second-difference operator";
    throw GuardViolation("trajectory.tol", msg.str());
  }
  const double p_max = std::max(diagnostics(X, params).p_ave, diagnostics(Y, params).p_ave);
  const double gt = std::abs(params.gamma) * p_max * params.L;
  if (gt > opts.gamma_tilde_max) {
    std::ostringstream msg;
    msg << "gamma_tilde = " << gt << " exceeds the solver basin limit " << opts.gamma_tilde_max;
    throw GuardViolation("trajectory.gamma_tilde", msg.str());
  }

  Trajectory traj = initial_guess(X, Y, params);
  bool zero = true;
  for (int j = 0; j < M; ++j) zero = zero && X[j] == cplx{} && Y[j] == cplx{};
  if (zero) return traj;

  Rows psi = lab_rows(traj.path);
  Rows phi = psi;
  rotate(g, params.beta2, phi, -1.0);
  {
    // start from the straight line itself so the split below sees dev = 0 exactly
    const Split f = split_linear(g, phi);
    for (int i = 1; i < N; ++i)
      for (int j = 0; j < M; ++j) phi[i][j] = phi[0][j] + g.z(i) * f.slope[j];
  }
  const Rows linear = phi;

  for (int it = 1; it <= opts.max_iter; ++it) {
    SliceEval ev = evaluate(g, params, phi, psi, opts.include_quintic);
    // phi = linear + c with d_z^2 c = rhs and c = 0 at both ends: one
    // constant-coefficient tridiagonal system per mode
#pragma omp parallel for schedule(static)
    for (int j = 0; j < M; ++j) {
      cvec d(N - 1);
      for (int i = 1; i < N; ++i) d[i - 1] = g.dz * g.dz * ev.rhs[i][j];
      solve_tridiagonal_constant<cplx>(1.0, -2.0, 1.0, d);
      for (int i = 1; i < N; ++i) phi[i][j] = linear[i][j] + d[i - 1];
    }
    for (int i = 1; i < N; ++i) {
      psi[i] = phi[i];
      free_propagate_inplace(g, psi[i], params.beta2, g.z(i));
    }
    const ResidualParts parts = evaluate(g, params, phi, psi, opts.include_quintic).parts;
    traj.residual_history.push_back(parts.relative());
    traj.residual_norm = parts.relative();
    traj.iterations = it;
    if (!std::isfinite(traj.residual_norm)) break;
    if (traj.residual_norm <= opts.tol) {
      traj.converged = true;
      traj.path = from_rotating(g, params.beta2, phi, X, Y);
      return traj;
    }
  }
  std::ostringstream msg;
  msg << "no convergence after " << traj.iterations << " iterations; residual history:";
  for (double r : traj.residual_history) msg << ' ' << r;
  throw GuardViolation("trajectory.convergence", msg.str());
}

double prefactor_correction(const PathLattice& traj, const ChannelParams& params) {
  const GridSpec& g = traj.grid();
  require_compatible(g, params);
  if (params.gamma == 0.0) return 1.0;
  const int N = g.N, M = g.M;
  const double L = params.L;
  Rows psi = lab_rows(traj);
  Rows phi = psi;
  rotate(g, params.beta2, phi, -1.0);
  const Split f = split_linear(g, phi);
  cplx acc = 0.0;
  for (int i = 1; i < N; ++i) {
    const cvec l0 = l0_interior(g, params.beta2, f, i);
    const double z = g.z(i);
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) s += l0[j] * std::conj(psi[i][j]);
    acc += g.dz * z * (L - z) / L * g.delta * s;  // trapezoid; end weights vanish
  }
  return 1.0 + 2.0 * params.gamma * g.noise_bandwidth() / kPi * acc.imag();
}

LogPdf small_noise_log_pdf(const SpectralField& X, const SpectralField& Y,
                           const ChannelParams& params, const SmallNoiseOptions& opts) {
  LogPdf out = log_p0(X, Y, params);
  const DimensionlessDiagnostics dx = diagnostics(X, params);
  if (std::isfinite(dx.epsilon) && dx.epsilon > opts.epsilon_warn) {
    std::ostringstream msg;
    msg << "epsilon = " << dx.epsilon << " exceeds " << opts.epsilon_warn
        << "; small-noise approximation may be inaccurate";
    out.warnings.push_back(msg.str());
  }
  if (opts.variant == SmallNoiseVariant::ClosedForm) {
    out.method = Method::SmallNoiseClosedForm;
    if (params.gamma == 0.0) return out;
    const FirstOrderTerms t = first_order_terms(X, Y, params, opts.first_order);
    const double bracket = 1.0 + params.gamma * t.w_term;
    if (!(bracket > 0.0))
      throw GuardViolation("small_noise.prefactor", "bandwidth bracket is not positive");
    out.log_p += params.gamma * t.G.imag() + std::log(bracket);
    out.diagnostics["im_G"] = t.G.imag();
    out.diagnostics["w_term"] = t.w_term;
    return out;
  }
  const Trajectory traj = solve_trajectory(X, Y, params, opts.solve);
  const double S = rotating_frame_action(traj.path, params);
  const double pref = prefactor_correction(traj.path, params);
  if (!(pref > 0.0))
    throw GuardViolation("small_noise.prefactor",
                         "prefactor bracket " + std::to_string(pref) + " is not positive");
  const LogMeasure m = log_measure_constants(X.grid, params.Q);
  out.method = Method::SmallNoise;
  out.log_p = m.log_lambda - S / params.Q + std::log(pref);
  out.diagnostics["action"] = S;
  out.diagnostics["prefactor"] = pref;
  out.diagnostics["residual"] = traj.residual_norm;
  out.diagnostics["iterations"] = traj.iterations;
  return out;
}

}  // namespace nlsepdf
