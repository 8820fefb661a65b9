#include <doctest.h>

#include "nlsepdf/trajectory.hpp"
#include "oracles.hpp"

using namespace nlsepdf;

namespace {

/// Independent residual: direct convolution sums and the (w - w1)(w - w2) kernel
/// written out, second differences of the derotated field.
double direct_residual(const PathLattice& P, const ChannelParams& p) {
  const GridSpec& g = P.grid();
  const int N = g.N, M = g.M;
  const double a = 0.5 * p.beta2, d2 = g.delta * g.delta;
  auto phi = [&](int i, int j) {
    return std::polar(1.0, -a * g.omega(j) * g.omega(j) * g.z(i)) * P.row(i)[j];
  };
  double s = 0.0;
  for (int i = 1; i < N; ++i) {
    const cvec psi(P.row(i).begin(), P.row(i).end());
    cvec l0(M);
    for (int j = 0; j < M; ++j)
      l0[j] = std::polar(1.0, a * g.omega(j) * g.omega(j) * g.z(i)) *
              (phi(i + 1, j) - phi(i - 1, j)) / (2.0 * g.dz);
    const cvec t4 = oracle::trilinear(l0, psi, psi);
    const cvec q = oracle::quintic(psi);
    for (int k = 0; k < M; ++k) {
      cplx mu = 0.0;
      for (int j1 = 0; j1 < M; ++j1)
        for (int j2 = 0; j2 < M; ++j2) {
          const int j3 = j1 + j2 - k;
          if (j3 < 0 || j3 >= M) continue;
          mu += kI * p.beta2 * (g.omega(k) - g.omega(j1)) * (g.omega(k) - g.omega(j2)) * psi[j1] *
                psi[j2] * std::conj(psi[j3]);
        }
      const cplx dd = std::polar(1.0, a * g.omega(k) * g.omega(k) * g.z(i)) *
                      (phi(i + 1, k) - 2.0 * phi(i, k) + phi(i - 1, k)) / (g.dz * g.dz);
      const cplx lhs = dd - kI * p.gamma * d2 * (4.0 * t4[k] - mu) - 3.0 * p.gamma * p.gamma * d2 * d2 * q[k];
      s += std::norm(lhs);
    }
  }
  return std::sqrt(g.dz * g.delta * s);
}

struct Case {
  GridSpec g;
  SpectralField X, Y;
  ChannelParams p;
};

/// Gaussian-shaped input with unit average power; Y a perturbed free propagation.
Case make_case(int M, int N, double gamma_tilde, double beta2 = 0.3) {
  Case c;
  c.g = GridSpec::symmetric(M, 0.25, N, 1.0);
  c.X = SpectralField(c.g);
  for (int j = 0; j < M; ++j) c.X[j] = std::exp(-0.1 * c.g.omega(j) * c.g.omega(j)) * cplx(1.0, 0.2);
  const double scale = 1.0 / std::sqrt(freq_norm2(c.g, c.X.values) / c.g.t_total());
  for (auto& v : c.X.values) v *= scale;
  c.p = ChannelParams{beta2, gamma_tilde, 0.01, 1.0};
  c.Y = free_propagate(c.X, beta2, 1.0);
  const cvec n = oracle::random_field(M, 77, 0.05);
  for (int j = 0; j < M; ++j) c.Y[j] += n[j] * scale;
  return c;
}

}  // namespace

TEST_CASE("initial guess boundary rows and free solution") {
  Case c = make_case(8, 16, 0.0);
  const Trajectory t = initial_guess(c.X, c.Y, c.p);
  CHECK(oracle::max_abs_diff(cvec(t.path.row(0).begin(), t.path.row(0).end()), c.X.values) == 0.0);
  CHECK(oracle::max_abs_diff(cvec(t.path.row(16).begin(), t.path.row(16).end()), c.Y.values) == 0.0);
  const Trajectory f = initial_guess(c.X, free_propagate(c.X, c.p.beta2, 1.0), c.p);
  for (int i = 0; i <= 16; ++i) {
    const SpectralField want = free_propagate(c.X, c.p.beta2, c.g.z(i));
    CHECK(oracle::max_abs_diff(cvec(f.path.row(i).begin(), f.path.row(i).end()), want.values) < 1e-14);
  }
}

TEST_CASE("residual: linear path at gamma = 0, zero path, and direct-sum oracle") {
  Case c = make_case(8, 32, 0.0);
  CHECK(trajectory_residual(initial_guess(c.X, c.Y, c.p).path, c.p) < 1e-10);
  const SpectralField Z(c.g);
  CHECK(trajectory_residual(initial_guess(Z, Z, c.p).path, c.p) == 0.0);
  const Case coarse = make_case(8, 3, 0.0);
  CHECK_THROWS_AS(trajectory_residual(initial_guess(coarse.X, coarse.Y, coarse.p).path, coarse.p),
                  GuardViolation);

  for (int M : {1, 4, 8}) {
    GridSpec g = GridSpec::symmetric(M, 0.4, 6, 1.0);
    std::vector<cvec> rows;
    for (int i = 0; i <= 6; ++i) {
      cvec r(M);
      for (int j = 0; j < M; ++j) r[j] = cplx(std::cos(0.9 * g.z(i) + j), std::sin(1.7 * g.z(i) - 0.5 * j));
      rows.push_back(r);
    }
    PathLattice P(g, rows.front(), rows.back());
    for (int i = 1; i < 6; ++i) std::copy(rows[i].begin(), rows[i].end(), P.interior(i).begin());
    const ChannelParams p{0.45, 0.8, 0.1, 1.0};
    const double want = direct_residual(P, p);
    CHECK(std::abs(trajectory_residual(P, p) - want) < 1e-10 * want);
  }
}

TEST_CASE("solver at gamma = 0 returns the interpolant in one sweep") {
  Case c = make_case(8, 64, 0.0);
  const Trajectory t = solve_trajectory(c.X, c.Y, c.p);
  const Trajectory g = initial_guess(c.X, c.Y, c.p);
  CHECK(t.iterations == 1);
  CHECK(t.converged);
  double d = 0.0;
  for (int i = 0; i <= c.g.N; ++i)
    for (int j = 0; j < c.g.M; ++j) d = std::max(d, std::abs(t.path.row(i)[j] - g.path.row(i)[j]));
  CHECK(d < 1e-12);
}

TEST_CASE("solver converges and lowers the action at gamma_tilde = 0.05") {
  Case c = make_case(16, 256, 0.05);
  const Trajectory t = solve_trajectory(c.X, c.Y, c.p);
  const Trajectory g = initial_guess(c.X, c.Y, c.p);
  CHECK(t.converged);
  CHECK(t.residual_norm < 1e-8);
  CHECK(trajectory_residual_parts(t.path, c.p).relative() == doctest::Approx(t.residual_norm));
  CHECK(rotating_frame_action(t.path, c.p) < rotating_frame_action(g.path, c.p));
  CHECK(continuum_action(t.path, c.p) < continuum_action(g.path, c.p));
  MESSAGE("iterations " << t.iterations);
}

TEST_CASE("solver covariance under a global phase") {
  Case c = make_case(8, 32, 0.1);
  const Trajectory a = solve_trajectory(c.X, c.Y, c.p);
  const cplx ph = std::polar(1.0, 1.1);
  SpectralField X2 = c.X, Y2 = c.Y;
  for (auto& v : X2.values) v *= ph;
  for (auto& v : Y2.values) v *= ph;
  const Trajectory b = solve_trajectory(X2, Y2, c.p);
  double d = 0.0;
  for (int i = 0; i <= c.g.N; ++i)
    for (int j = 0; j < c.g.M; ++j) d = std::max(d, std::abs(b.path.row(i)[j] - ph * a.path.row(i)[j]));
  CHECK(d < 1e-10);
  CHECK(rotating_frame_action(b.path, c.p) ==
        doctest::Approx(rotating_frame_action(a.path, c.p)).epsilon(1e-10));
}

TEST_CASE("solver guards") {
  Case c = make_case(8, 32, 0.05);
  SolveOptions o;
  o.tol = 1e-16;
  CHECK_THROWS_WITH_AS(solve_trajectory(c.X, c.Y, c.p, o), doctest::Contains("trajectory.tol"), GuardViolation);
  Case big = make_case(8, 32, 0.5);
  CHECK_THROWS_AS(solve_trajectory(big.X, big.Y, big.p), GuardViolation);
  o = SolveOptions{};
  o.max_iter = 1;
  try {
    solve_trajectory(c.X, c.Y, c.p, o);
    FAIL("expected non-convergence");
  } catch (const GuardViolation& e) {
    CHECK(e.guard() == "trajectory.convergence");
    CHECK(std::string(e.what()).find("residual history") != std::string::npos);
  }
  const SpectralField Z(c.g);
  const Trajectory z = solve_trajectory(Z, Z, c.p);
  CHECK(z.iterations == 0);
  CHECK(trajectory_residual(z.path, c.p) == 0.0);
}

TEST_CASE("prefactor values") {
  Case c = make_case(8, 64, 0.05);
  ChannelParams p0 = c.p;
  p0.gamma = 0.0;
  CHECK(prefactor_correction(initial_guess(c.X, c.Y, p0).path, p0) == 1.0);
  const SpectralField Yf = free_propagate(c.X, c.p.beta2, 1.0);
  CHECK(prefactor_correction(initial_guess(c.X, Yf, c.p).path, c.p) == doctest::Approx(1.0).epsilon(1e-13));

  // the coarse lattice value must agree with a fine-lattice solve of the same problem
  const Trajectory coarse = solve_trajectory(c.X, c.Y, c.p);
  Case fine = make_case(8, 1024, 0.05);
  const Trajectory tf = solve_trajectory(fine.X, fine.Y, fine.p);
  const double a = prefactor_correction(coarse.path, c.p), b = prefactor_correction(tf.path, fine.p);
  MESSAGE("prefactor N=64 " << a << " N=1024 " << b);
  CHECK(std::abs(a - b) < 1e-3 * std::abs(b - 1.0) + 1e-10);
}

TEST_CASE("prefactor on the interpolant equals the closed-form bandwidth term") {
  Case c = make_case(6, 128, 0.05);
  const double pref = prefactor_correction(initial_guess(c.X, c.Y, c.p).path, c.p);
  cplx s = 0.0;
  const SpectralField Yr = free_propagate(c.Y, c.p.beta2, -1.0);
  for (int j = 0; j < c.g.M; ++j) s += Yr[j] * std::conj(c.X[j]);
  const double N = c.g.N;
  const double kern = 6.0 * (N * N - 1.0) / (6.0 * N * N);  // 6 * trapezoid sum of z(L-z)/L at L = 1
  const double want =
      1.0 + c.p.gamma * c.g.noise_bandwidth() * kern / (3.0 * kPi) * (c.g.delta * s).imag();
  CHECK(pref == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("small-noise density") {
  Case c = make_case(8, 64, 0.0);
  CHECK(small_noise_log_pdf(c.X, c.Y, c.p).log_p ==
        doctest::Approx(log_p0(c.X, c.Y, c.p).log_p).epsilon(1e-12));
  SmallNoiseOptions cf;
  cf.variant = SmallNoiseVariant::ClosedForm;
  CHECK(small_noise_log_pdf(c.X, c.Y, c.p, cf).log_p == log_p0(c.X, c.Y, c.p).log_p);
  ChannelParams noisy = c.p;
  noisy.Q = 1.0;
  const LogPdf w = small_noise_log_pdf(c.X, c.Y, noisy);
  CHECK(!w.warnings.empty());
}

TEST_CASE("small-noise density tracks the first-order series to O(gamma^2)") {
  std::vector<double> gam{0.005, 0.01, 0.02}, diff;
  for (double ga : gam) {
    Case c = make_case(8, 256, ga);
    c.p.Q = 0.2;
    const double a = small_noise_log_pdf(c.X, c.Y, c.p).log_p;
    const double b = series_log_pdf(c.X, c.Y, c.p, 1).log_p;
    diff.push_back(std::abs(a - b));
  }
  const double slope = std::log(diff[2] / diff[0]) / std::log(gam[2] / gam[0]);
  MESSAGE("small-noise vs series differences " << diff[0] << " " << diff[1] << " " << diff[2]
                                               << " slope " << slope);
  CHECK(slope > 1.7);
}
