#include "nlsepdf/action.hpp"

#include <cmath>
#include <numeric>

namespace nlsepdf {

PathLattice::PathLattice(const GridSpec& grid, std::span<const cplx> X, std::span<const cplx> Y)
    : grid_(grid) {
  grid_.validate();
  const int M = grid_.M;
  if (static_cast<int>(X.size()) != M || static_cast<int>(Y.size()) != M)
    throw GuardViolation("path.boundary", "boundary rows must have M entries");
  data_.assign(static_cast<std::size_t>(grid_.N + 1) * M, cplx{});
  std::copy(X.begin(), X.end(), data_.begin());
  std::copy(Y.begin(), Y.end(), data_.begin() + static_cast<std::ptrdiff_t>(grid_.N) * M);
}

std::span<const cplx> PathLattice::row(int i) const {
  return {data_.data() + static_cast<std::size_t>(i) * grid_.M, static_cast<std::size_t>(grid_.M)};
}

std::span<cplx> PathLattice::interior(int i) {
  if (i <= 0 || i >= grid_.N)
    throw GuardViolation("path.boundary", "boundary rows are read-only");
  return {data_.data() + static_cast<std::size_t>(i) * grid_.M, static_cast<std::size_t>(grid_.M)};
}

bool PathLattice::all_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

namespace {

SpectralField row_field(const PathLattice& path, int i) {
  auto r = path.row(i);
  return SpectralField(path.grid(), cvec(r.begin(), r.end()));
}

double ordered_sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// second-order one-sided at the ends, centered inside
cvec z_derivative(const std::vector<cvec>& f, int i, double h) {
  const int N = static_cast<int>(f.size()) - 1;
  const std::size_t M = f[0].size();
  cvec d(M);
  for (std::size_t j = 0; j < M; ++j) {
    if (N == 1) {
      d[j] = (f[1][j] - f[0][j]) / h;
    } else if (i == 0) {
      d[j] = (-3.0 * f[0][j] + 4.0 * f[1][j] - f[2][j]) / (2.0 * h);
    } else if (i == N) {
      d[j] = (3.0 * f[N][j] - 4.0 * f[N - 1][j] + f[N - 2][j]) / (2.0 * h);
    } else {
      d[j] = (f[i + 1][j] - f[i - 1][j]) / (2.0 * h);
    }
  }
  return d;
}

double trapezoid(const std::vector<double>& per_slice, double h) {
  std::vector<double> w(per_slice);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return h * ordered_sum(w);
}

}  // namespace

double discrete_action(const PathLattice& path, const ChannelParams& params, LatticeScheme scheme) {
  const GridSpec& g = path.grid();
  require_compatible(g, params);
  const int N = g.N, M = g.M;
  const double h = g.dz;
  std::vector<double> per_step(N, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 1; i <= N; ++i) {
    const SpectralField prev = row_field(path, i - 1);
    const SpectralField V = kerr_vertex(prev, params.gamma);
    auto cur = path.row(i);
    double s = 0.0;
    for (int j = 0; j < M; ++j) {
      const double w2 = g.omega(j) * g.omega(j);
      cplx r;
      if (scheme == LatticeScheme::Euler) {
        r = (cur[j] - prev[j]) / h - kI * (0.5 * params.beta2 * w2) * prev[j] - V[j];
      } else {
        const cplx rot = std::polar(1.0, 0.5 * params.beta2 * w2 * h);
        r = (cur[j] - rot * (prev[j] + h * V[j])) / h;
      }
      s += std::norm(r);
    }
    per_step[i - 1] = s;
  }
  return h * g.delta * ordered_sum(per_step);
}

double continuum_action(const PathLattice& path, const ChannelParams& params) {
  const GridSpec& g = path.grid();
  require_compatible(g, params);
  const int N = g.N, M = g.M;
  std::vector<cvec> psi(N + 1);
  for (int i = 0; i <= N; ++i) psi[i] = cvec(path.row(i).begin(), path.row(i).end());
  std::vector<double> per_slice(N + 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i <= N; ++i) {
    const cvec d = z_derivative(psi, i, g.dz);
    const SpectralField V = kerr_vertex(SpectralField(g, psi[i]), params.gamma);
    double s = 0.0;
    for (int j = 0; j < M; ++j) {
      const double w2 = g.omega(j) * g.omega(j);
      s += std::norm(d[j] - kI * (0.5 * params.beta2 * w2) * psi[i][j] - V[j]);
    }
    per_slice[i] = g.delta * s;
  }
  return trapezoid(per_slice, g.dz);
}

std::vector<cvec> to_rotating_frame(const PathLattice& path, double beta2) {
  const GridSpec& g = path.grid();
  std::vector<cvec> phi(g.N + 1);
  for (int i = 0; i <= g.N; ++i) {
    phi[i] = cvec(path.row(i).begin(), path.row(i).end());
    free_propagate_inplace(g, phi[i], beta2, -g.z(i));
  }
  return phi;
}

double rotating_frame_action(const PathLattice& path, const ChannelParams& params) {
  const GridSpec& g = path.grid();
  require_compatible(g, params);
  const int N = g.N, M = g.M;
  const std::vector<cvec> phi = to_rotating_frame(path, params.beta2);
  std::vector<double> per_slice(N + 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i <= N; ++i) {
    const cvec d = z_derivative(phi, i, g.dz);
    SpectralField V = kerr_vertex(row_field(path, i), params.gamma);
    free_propagate_inplace(g, V.values, params.beta2, -g.z(i));
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += std::norm(d[j] - V[j]);
    per_slice[i] = g.delta * s;
  }
  return trapezoid(per_slice, g.dz);
}

LogMeasure log_measure_constants(const GridSpec& grid, double Q) {
  if (!(Q > 0.0)) throw GuardViolation("measure.Q", "Q must be > 0 for the path measure");
  grid.validate();
  LogMeasure m;
  m.log_lambda_tilde = -double(grid.N) * grid.M * std::log(grid.dz * kPi * Q / grid.delta);
  m.log_lambda = -double(grid.M) * std::log(kPi * Q * grid.L() / grid.delta);
  return m;
}

}  // namespace nlsepdf
