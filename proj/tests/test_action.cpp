#include <doctest.h>

#include "nlsepdf/action.hpp"
#include "oracles.hpp"

using namespace nlsepdf;

namespace {

/// Independent evaluation of dz delta sum_i sum_j |dpsi/dz - i(b/2)w^2 psi_{i-1} - V_{i-1}|^2
/// with the vertex from the direct convolution sum.
double direct_euler_action(const GridSpec& g, const std::vector<cvec>& rows, const ChannelParams& p) {
  double s = 0.0;
  for (int i = 1; i <= g.N; ++i) {
    const cvec c = oracle::cubic(rows[i - 1]);
    for (int j = 0; j < g.M; ++j) {
      const double w = g.omega(j);
      const cplx V = kI * p.gamma * g.delta * g.delta * c[j];
      const cplx r = (rows[i][j] - rows[i - 1][j]) / g.dz -
                     kI * 0.5 * p.beta2 * w * w * rows[i - 1][j] - V;
      s += std::norm(r);
    }
  }
  return s * g.dz * g.delta;
}

PathLattice lattice_from_rows(const GridSpec& g, const std::vector<cvec>& rows) {
  PathLattice P(g, rows.front(), rows.back());
  for (int i = 1; i < g.N; ++i) std::copy(rows[i].begin(), rows[i].end(), P.interior(i).begin());
  return P;
}

std::vector<cvec> interpolant_rows(const GridSpec& g, const cvec& X, const cvec& B, double beta2) {
  std::vector<cvec> rows(g.N + 1, cvec(g.M));
  for (int i = 0; i <= g.N; ++i)
    for (int j = 0; j < g.M; ++j) {
      const double w = g.omega(j), z = g.z(i);
      rows[i][j] = std::polar(1.0, 0.5 * beta2 * w * w * z) * (X[j] + z * B[j] / g.L());
    }
  return rows;
}

double b_energy(const GridSpec& g, const cvec& B) { return freq_norm2(g, B) / g.L(); }

}  // namespace

TEST_CASE("noiseless Euler recursion has zero discrete action") {
  GridSpec g = GridSpec::symmetric(6, 0.2, 10, 1.0);
  const ChannelParams p{0.3, 0.8, 0.1, 1.0};
  std::vector<cvec> rows{oracle::random_field(6, 3, 0.5)};
  for (int i = 1; i <= g.N; ++i) {
    const cvec& prev = rows.back();
    const cvec V = kerr_vertex(SpectralField(g, prev), p.gamma).values;
    cvec next(g.M);
    for (int j = 0; j < g.M; ++j) {
      const double w = g.omega(j);
      next[j] = prev[j] + g.dz * (kI * 0.5 * p.beta2 * w * w * prev[j] + V[j]);
    }
    rows.push_back(next);
  }
  CHECK(discrete_action(lattice_from_rows(g, rows), p) < 1e-26);
}

TEST_CASE("noiseless exponential recursion has zero action under that scheme") {
  GridSpec g = GridSpec::symmetric(5, 0.5, 8, 1.0);
  const ChannelParams p{0.3, 0.8, 0.1, 1.0};
  std::vector<cvec> rows{oracle::random_field(5, 4, 0.5)};
  for (int i = 1; i <= g.N; ++i) {
    const cvec& prev = rows.back();
    const cvec V = kerr_vertex(SpectralField(g, prev), p.gamma).values;
    cvec next(g.M);
    for (int j = 0; j < g.M; ++j) {
      const double w = g.omega(j);
      next[j] = std::polar(1.0, 0.5 * p.beta2 * w * w * g.dz) * (prev[j] + g.dz * V[j]);
    }
    rows.push_back(next);
  }
  CHECK(discrete_action(lattice_from_rows(g, rows), p, LatticeScheme::Exponential) < 1e-26);
}

TEST_CASE("discrete action of a random path equals the direct double sum") {
  GridSpec g = GridSpec::symmetric(7, 0.4, 6, 1.5);
  const ChannelParams p{-0.4, 1.1, 0.1, 1.5};
  std::vector<cvec> rows;
  for (int i = 0; i <= g.N; ++i) rows.push_back(oracle::random_field(7, 50 + i));
  const double want = direct_euler_action(g, rows, p);
  const double got = discrete_action(lattice_from_rows(g, rows), p);
  CHECK(got >= 0.0);
  CHECK(std::abs(got - want) < 1e-12 * want);
}

TEST_CASE("gamma = 0 interpolant action tends to delta sum |B|^2 / L") {
  const cvec X = oracle::random_field(4, 7), B = oracle::random_field(4, 8);
  const ChannelParams base{0.5, 0.0, 0.1, 1.0};
  double prev_err = 1e300;
  for (int N : {16, 64, 256}) {
    GridSpec g = GridSpec::symmetric(4, 0.3, N, 1.0);
    const auto rows = interpolant_rows(g, X, B, base.beta2);
    const PathLattice P = lattice_from_rows(g, rows);
    const double got = discrete_action(P, base);
    CHECK(std::abs(got - direct_euler_action(g, rows, base)) < 1e-11 * got);
    const double err = std::abs(got - b_energy(g, B));
    CHECK(err < prev_err);
    prev_err = err;
    // exponential scheme: the derotated linear path has constant increments
    CHECK(discrete_action(P, base, LatticeScheme::Exponential) ==
          doctest::Approx(b_energy(g, B)).epsilon(1e-12));
  }
}

TEST_CASE("continuum_action: free solution and refinement slope") {
  const cvec X = oracle::random_field(4, 9), B = oracle::random_field(4, 10);
  const ChannelParams p{0.8, 0.0, 0.1, 1.0};
  std::vector<double> errs, free_vals;
  for (int N : {64, 128, 256, 512}) {
    GridSpec g = GridSpec::symmetric(4, 0.3, N, 1.0);
    const PathLattice free = lattice_from_rows(g, interpolant_rows(g, X, cvec(4), p.beta2));
    free_vals.push_back(continuum_action(free, p));
    CHECK(rotating_frame_action(free, p) < 1e-24);
    const PathLattice lin = lattice_from_rows(g, interpolant_rows(g, X, B, p.beta2));
    errs.push_back(std::abs(continuum_action(lin, p) - b_energy(g, B)));
    CHECK(rotating_frame_action(lin, p) == doctest::Approx(b_energy(g, B)).epsilon(1e-12));
  }
  const double slope = std::log(errs[2] / errs[3]) / std::log(2.0);
  MESSAGE("continuum_action refinement slope " << slope);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  // residual O(dz^2) enters squared when B = 0
  for (std::size_t k = 1; k < free_vals.size(); ++k) CHECK(free_vals[k] < 0.25 * free_vals[k - 1]);
}

TEST_CASE("continuum and discrete actions agree to O(dz) on smooth paths") {
  const ChannelParams p{0.3, 0.6, 0.1, 1.0};
  std::vector<double> diffs;
  for (int N : {32, 64, 128}) {
    GridSpec g = GridSpec::symmetric(5, 0.4, N, 1.0);
    std::vector<cvec> rows(N + 1, cvec(5));
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j < 5; ++j) {
        const double z = g.z(i);
        rows[i][j] = cplx(std::cos(1.3 * z + j), std::sin(0.7 * z * z - j)) * (0.5 + 0.1 * j);
      }
    const PathLattice P = lattice_from_rows(g, rows);
    diffs.push_back(std::abs(continuum_action(P, p) - discrete_action(P, p)));
  }
  CHECK(diffs[1] < 0.6 * diffs[0]);
  CHECK(diffs[2] < 0.6 * diffs[1]);
}

TEST_CASE("minimum of the gamma = 0 Euler quadratic form approaches the Gaussian exponent") {
  // M = 1: minimize sum |psi_i - c psi_{i-1}|^2 over interior slices,
  // c = 1 + i (b/2) w^2 dz, by the normal equations
  //   -c psi_{k-1} + (1 + |c|^2) psi_k - conj(c) psi_{k+1} = 0.
  const double beta2 = 0.6, L = 1.0;
  const cplx X{0.8, -0.3}, Y{0.1, 0.9};
  GridSpec g0 = GridSpec::symmetric(1, 1.0, 1, L);
  g0.omega_min = 1.2;
  const double w = g0.omega(0);
  const cplx B = Y * std::polar(1.0, -0.5 * beta2 * w * w * L) - X;
  double prev = 1e300;
  for (int N : {8, 16, 32, 64}) {
    GridSpec g = g0;
    g.N = N;
    g.dz = L / N;
    const cplx c = 1.0 + kI * 0.5 * beta2 * w * w * g.dz;
    const int n = N - 1;
    std::vector<cplx> sub(n, -c), diag(n, 1.0 + std::norm(c)), sup(n, -std::conj(c)), rhs(n, 0.0);
    rhs[0] += c * X;
    rhs[n - 1] += std::conj(c) * Y;
    for (int k = 1; k < n; ++k) {
      const cplx m = sub[k] / diag[k - 1];
      diag[k] -= m * sup[k - 1];
      rhs[k] -= m * rhs[k - 1];
    }
    std::vector<cplx> psi(N + 1);
    psi[0] = X;
    psi[N] = Y;
    psi[n] = rhs[n - 1] / diag[n - 1];
    for (int k = n - 2; k >= 0; --k) psi[k + 1] = (rhs[k] - sup[k] * psi[k + 2]) / diag[k];
    std::vector<cvec> rows;
    for (const cplx& v : psi) rows.push_back(cvec{v});
    const double smin = discrete_action(lattice_from_rows(g, rows), ChannelParams{beta2, 0.0, 1.0, L});
    const double err = std::abs(smin - g.delta * std::norm(B) / L);
    CHECK(err < prev);
    prev = err;
    // perturbing an interior slice raises the action
    rows[N / 2][0] += cplx(1e-3, -1e-3);
    CHECK(discrete_action(lattice_from_rows(g, rows), ChannelParams{beta2, 0.0, 1.0, L}) > smin);
  }
  CHECK(prev < 0.05 * g0.delta * std::norm(B) / L);
}

TEST_CASE("log measure constants") {
  GridSpec g{1, 1, 1.0, 1.0, 0.0};
  CHECK(log_measure_constants(g, 1.0 / kPi).log_lambda == doctest::Approx(0.0));
  GridSpec g2{2, 1, 1.0, 1.0, 0.0};
  CHECK(log_measure_constants(g2, std::exp(1.0) / kPi).log_lambda == doctest::Approx(-2.0));
  GridSpec g3{3, 5, 0.2, 0.7, 0.0};
  const double Q = 0.4;
  const LogMeasure m = log_measure_constants(g3, Q);
  const double want = -3.0 * 4.0 * std::log(g3.dz * kPi * Q / g3.delta) + 3.0 * std::log(5.0);
  CHECK(m.log_lambda_tilde - m.log_lambda == doctest::Approx(want));
  CHECK_THROWS_AS(log_measure_constants(g3, 0.0), GuardViolation);
}

TEST_CASE("path lattice boundary rows are fixed") {
  GridSpec g = GridSpec::symmetric(3, 1.0, 4, 1.0);
  const cvec X = oracle::random_field(3, 1), Y = oracle::random_field(3, 2);
  PathLattice P(g, X, Y);
  CHECK(std::equal(X.begin(), X.end(), P.row(0).begin()));
  CHECK(std::equal(Y.begin(), Y.end(), P.row(4).begin()));
  CHECK_THROWS_AS(P.interior(0), GuardViolation);
  CHECK_THROWS_AS(P.interior(4), GuardViolation);
  CHECK_NOTHROW(P.interior(2));
}
