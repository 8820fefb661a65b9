#pragma once

#include <vector>

#include "nlsepdf/action.hpp"
#include "nlsepdf/log_pdf.hpp"
#include "nlsepdf/perturbative.hpp"

namespace nlsepdf {

/// Minimum-action path between the boundary data, with solver diagnostics.
struct Trajectory {
  PathLattice path;
  double residual_norm = 0.0;  // relative residual at exit
  int iterations = 0;
  bool converged = true;
  std::vector<double> residual_history;
};

/// Psi_{i,j} = e^{i beta2 w_j^2 z_i/2} (X_j + z_i B_j / L): the gamma = 0 minimizer.
Trajectory initial_guess(const SpectralField& X, const SpectralField& Y,
                         const ChannelParams& params);

struct ResidualParts {
  double absolute = 0.0;   // sqrt(dz delta sum |LHS|^2) over interior slices
  double nonlinear = 0.0;  // same norm of the nonlinear terms alone
  double linear_scale = 0.0;  // norm of L0[Psi] / L
  double relative() const;
};

/// Evaluates the Euler-Lagrange left-hand side of the action:
///   (d_z - i b w^2/2)^2 Psi - i gamma {4 Psi conj(Psi) L0[Psi] - (mu/L) Psi Psi conj(Psi)}
///     - 3 gamma^2 (quintic convolution) = 0,   mu = i beta2 (w - w1)(w - w2) L,
/// with second differences in the rotating frame and truncated convolutions.
ResidualParts trajectory_residual_parts(const PathLattice& traj, const ChannelParams& params,
                                        bool include_quintic = true);
/// Absolute L2 lattice norm of the left-hand side; requires N >= 4.
double trajectory_residual(const PathLattice& traj, const ChannelParams& params,
                           bool include_quintic = true);

/// Smallest accepted solver tolerance on an N-step lattice: 4 eps N^2, the
/// round-off level of the second-difference operator.
double tolerance_floor(int N);

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 200;
  bool include_quintic = true;
  double gamma_tilde_max = 0.3;
};

/// Picard iteration: each sweep solves d_z^2 phi = e^{-i b w^2 z/2} N(Psi_old) in the
/// rotating frame, one tridiagonal system per mode, until the relative
/// residual drops below tol. Throws GuardViolation on non-convergence with
/// the residual history in the message.
Trajectory solve_trajectory(const SpectralField& X, const SpectralField& Y,
                            const ChannelParams& params, const SolveOptions& opts = {});

/// 1 + (2 gamma W / pi) Im{ int dz z(L-z)/L  delta sum_j L0[Psi]_j conj(Psi_j) }
/// with L0[Psi] = e^{i b w^2 z/2} d_z phi by centered differences of the rotating-frame
/// field phi, and the trapezoid rule in z.
double prefactor_correction(const PathLattice& traj, const ChannelParams& params);

enum class SmallNoiseVariant { Solver, ClosedForm };

struct SmallNoiseOptions {
  SmallNoiseVariant variant = SmallNoiseVariant::Solver;
  SolveOptions solve;
  FirstOrderOptions first_order;
  double epsilon_warn = 0.1;
};

/// Solver: log Lambda - S[Psi*]/Q + log(prefactor).
/// ClosedForm: log P0 + gamma Im G + log(1 + gamma * bandwidth term).
LogPdf small_noise_log_pdf(const SpectralField& X, const SpectralField& Y,
                           const ChannelParams& params, const SmallNoiseOptions& opts = {});

}  // namespace nlsepdf
