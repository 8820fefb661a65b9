#include <doctest.h>

#include "nlsepdf/channel.hpp"
#include "oracles.hpp"

using namespace nlsepdf;

namespace {

SpectralField smooth_field(const GridSpec& g, double amp = 1.0) {
  SpectralField f(g);
  for (int j = 0; j < g.M; ++j) {
    const double w = g.omega(j);
    f[j] = amp * std::exp(-0.3 * w * w) * cplx(1.0, 0.4 * w);
  }
  return f;
}

}  // namespace

TEST_CASE("kerr_vertex: single tone is pure self-phase") {
  GridSpec g = GridSpec::symmetric(8, 0.5, 1, 1.0);
  SpectralField f(g);
  const cplx a{0.7, -0.2};
  f[3] = a;
  const SpectralField V = kerr_vertex(f, 1.5);
  for (int j = 0; j < g.M; ++j) {
    const cplx want = j == 3 ? kI * 1.5 * g.delta * g.delta * std::norm(a) * a : cplx{};
    CHECK(std::abs(V[j] - want) < 1e-14);
  }
  CHECK(oracle::max_abs_diff(kerr_vertex(SpectralField(g), 2.0).values, cvec(8)) == 0.0);
}

TEST_CASE("kerr_vertex: two tones produce four-wave-mixing products") {
  GridSpec g = GridSpec::symmetric(9, 1.0, 1, 1.0);
  SpectralField f(g);
  const cplx a{1.0, 0.5}, b{-0.3, 0.8};
  f[3] = a;
  f[5] = b;
  const double gam = 0.7, d2 = g.delta * g.delta;
  const SpectralField V = kerr_vertex(f, gam);
  CHECK(std::abs(V[1] - kI * gam * d2 * a * a * std::conj(b)) < 1e-13);
  CHECK(std::abs(V[7] - kI * gam * d2 * b * b * std::conj(a)) < 1e-13);
  CHECK(std::abs(V[3] - kI * gam * d2 * (std::norm(a) + 2.0 * std::norm(b)) * a) < 1e-13);
  CHECK(std::abs(V[0]) < 1e-14);
}

TEST_CASE("kerr_vertex equals the direct double sum on random fields") {
  for (int M : {1, 4, 13, 32}) {
    GridSpec g = GridSpec::symmetric(M, 0.4, 1, 1.0);
    const cvec a = oracle::random_field(M, M);
    const cvec ref = oracle::cubic(a);
    const SpectralField V = kerr_vertex(SpectralField(g, a), 0.9);
    cvec want(M);
    for (int j = 0; j < M; ++j) want[j] = kI * 0.9 * g.delta * g.delta * ref[j];
    CHECK(oracle::max_abs_diff(V.values, want) < 1e-12 * M);
  }
}

TEST_CASE("free_propagate identities") {
  GridSpec g = GridSpec::symmetric(12, 0.3, 1, 1.0);
  const SpectralField f = smooth_field(g);
  CHECK(oracle::max_abs_diff(free_propagate(f, 0.4, 0.0).values, f.values) == 0.0);
  CHECK(oracle::max_abs_diff(free_propagate(f, 0.0, 2.0).values, f.values) == 0.0);
  const SpectralField twice = free_propagate(free_propagate(f, 0.4, 0.35), 0.4, 0.35);
  CHECK(oracle::max_abs_diff(twice.values, free_propagate(f, 0.4, 0.7).values) < 1e-14);
  const SpectralField p = free_propagate(f, 0.4, 1.3);
  for (int j = 0; j < g.M; ++j) CHECK(std::abs(p[j]) == doctest::Approx(std::abs(f[j])));
}

TEST_CASE("sample_noise_step statistics") {
  GridSpec g = GridSpec::symmetric(4, 0.5, 10, 1.0);
  RngStream z(1, 0);
  for (const cplx& v : sample_noise_step(z, g, 0.0).values) CHECK(v == cplx{});
  CHECK_THROWS_AS(sample_noise_step(z, g, -1.0), GuardViolation);

  const double Q = 0.3;
  const int draws = 250000;
  RngStream rng(5, 0);
  double re2 = 0.0, cross = 0.0, cross2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    const SpectralField n = sample_noise_step(rng, g, Q);
    for (int j = 0; j < g.M; ++j) re2 += n[j].real() * n[j].real();
    const double c = n[0].real() * n[1].real();
    cross += c;
    cross2 += c * c;
  }
  const double var_re = re2 / (draws * g.M);
  CHECK(var_re == doctest::Approx(Q * g.dz / (2.0 * g.delta)).epsilon(0.01));
  const double mean_c = cross / draws;
  const double se_c = std::sqrt((cross2 / draws - mean_c * mean_c) / draws);
  CHECK(std::abs(mean_c) < 3.0 * se_c);
}

TEST_CASE("split_step_forward without noise or nonlinearity is free propagation") {
  GridSpec g = GridSpec::symmetric(16, 0.25, 7, 1.4);
  const SpectralField X = smooth_field(g);
  const ChannelParams p{0.3, 0.0, 0.0, 1.4};
  RngStream rng(3, 0);
  const SpectralField Y = split_step_forward(X, p, rng);
  CHECK(oracle::max_abs_diff(Y.values, free_propagate(X, 0.3, 1.4).values) < 1e-13);
}

TEST_CASE("zero-dispersion single tone rotates by the self-phase") {
  GridSpec g = GridSpec::symmetric(8, 0.5, 400, 1.0);
  SpectralField X(g);
  const cplx a{1.2, 0.4};
  X[4] = a;
  const ChannelParams p{0.0, 2.0, 0.0, 1.0};
  const SpectralField Y = split_step_deterministic(X, p);
  const double phase = p.gamma * g.delta * g.delta * std::norm(a) * p.L;
  // explicit-midpoint Kerr step: phase error O(dz^2) globally
  CHECK(std::abs(Y[4] - a * std::polar(1.0, phase)) < 1e-5);
  CHECK(std::abs(Y[4]) == doctest::Approx(std::abs(a)).epsilon(1e-8));
}

TEST_CASE("split-step power drift shrinks at least as dz^2") {
  const double L = 1.0;
  std::vector<double> errs;
  for (int N : {8, 16, 32, 64}) {
    GridSpec g = GridSpec::symmetric(16, 0.3, N, L);
    const SpectralField X = smooth_field(g, 3.0);
    const ChannelParams p{0.8, 3.0, 0.0, L};
    const SpectralField Y = split_step_deterministic(X, p);
    errs.push_back(std::abs(freq_norm2(g, Y.values) - freq_norm2(g, X.values)));
  }
  const double slope = std::log(errs[2] / errs[3]) / std::log(2.0);
  MESSAGE("power drift slope " << slope);
  CHECK(slope > 1.8);
}

TEST_CASE("linear channel output statistics") {
  GridSpec g = GridSpec::symmetric(4, 0.5, 4, 1.0);
  const SpectralField X = smooth_field(g);
  const ChannelParams p{0.2, 0.0, 0.05, 1.0};
  const int runs = 100000;
  const auto Ys = forward_ensemble(X, p, runs, 17);
  const SpectralField Yf = free_propagate(X, p.beta2, p.L);
  for (int j = 0; j < g.M; ++j) {
    double v = 0.0;
    cplx m = 0.0;
    for (const auto& Y : Ys) {
      v += std::norm(Y[j] - Yf[j]);
      m += Y[j] - Yf[j];
    }
    const double var = p.Q * p.L / g.delta;
    CHECK(v / runs == doctest::Approx(var).epsilon(0.02));
    CHECK(std::abs(m / double(runs)) < 3.0 * std::sqrt(var / runs));
  }
}

TEST_CASE("forward ensemble is identical serial and parallel") {
  GridSpec g = GridSpec::symmetric(8, 0.3, 5, 1.0);
  const SpectralField X = smooth_field(g);
  const ChannelParams p{0.2, 0.5, 0.01, 1.0};
  const auto a = forward_ensemble(X, p, 37, 9);
  const auto b = forward_ensemble_serial(X, p, 37, 9);
  for (int r = 0; r < 37; ++r) CHECK(a[r].values == b[r].values);
}

TEST_CASE("dimensionless diagnostics") {
  GridSpec g = GridSpec::symmetric(10, 0.2, 4, 2.0);
  const double P0 = 1.7;
  // flat spectrum with delta sum |X|^2 / T_total = P0
  SpectralField X(g, cvec(g.M, cplx{std::sqrt(P0 * g.t_total() / (g.M * g.delta)), 0.0}));
  ChannelParams p{0.1, 0.0, 0.0, 2.0};
  DimensionlessDiagnostics d = diagnostics(X, p);
  CHECK(d.p_ave == doctest::Approx(P0));
  CHECK(d.gamma_tilde == 0.0);
  CHECK(d.epsilon == 0.0);
  p.gamma = 0.3;
  p.Q = 0.02;
  d = diagnostics(X, p);
  CHECK(d.gamma_tilde == doctest::Approx(0.3 * P0 * 2.0));
  CHECK(d.epsilon == doctest::Approx(0.02 * 2.0 * g.noise_bandwidth() / (2.0 * kPi * P0)));
  CHECK(d.snr() == doctest::Approx(1.0 / d.epsilon));
  CHECK_THROWS_AS(diagnostics_strict(SpectralField(g), p), GuardViolation);
}

TEST_CASE("channel parameter guards") {
  ChannelParams p{0.0, 0.0, -1.0, 1.0};
  CHECK_THROWS_AS(p.validate(), GuardViolation);
  p.Q = 0.0;
  p.L = 0.0;
  CHECK_THROWS_AS(p.validate(), GuardViolation);
  p.L = 1.0;
  CHECK_THROWS_AS(require_compatible(GridSpec::symmetric(2, 1.0, 4, 2.0), p), GuardViolation);
}
