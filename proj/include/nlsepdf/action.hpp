#pragma once

#include <span>
#include <vector>

#include "nlsepdf/channel.hpp"
#include "nlsepdf/grid.hpp"

namespace nlsepdf {

/// Field values psi_{i,j} = psi_{w_j}(z_i) over the full (N+1) x M lattice.
/// Rows 0 and N hold the boundary data X and Y and cannot be modified after
/// construction.
class PathLattice {
 public:
  PathLattice(const GridSpec& grid, std::span<const cplx> X, std::span<const cplx> Y);

  const GridSpec& grid() const { return grid_; }
  int rows() const { return grid_.N + 1; }
  std::span<const cplx> row(int i) const;
  /// Mutable access to an interior slice, 0 < i < N.
  std::span<cplx> interior(int i);
  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<cplx> data_;
};

/// Causal discretizations of the linear operator in the lattice action.
///   Euler       : r = (psi_i - psi_{i-1})/dz - i(beta2/2)w^2 psi_{i-1} - V_{i-1}
///   Exponential : r = (psi_i - e^{i beta2 w^2 dz/2}(psi_{i-1} + dz V_{i-1}))/dz
/// Both share the continuum limit; the exponential form makes the free
/// (gamma = 0) lattice density exactly Gaussian at every N.
enum class LatticeScheme { Euler, Exponential };

/// dz * delta * sum_{i=1..N} sum_j |r_{i,j}|^2 with the Kerr vertex taken at
/// slice i-1.
double discrete_action(const PathLattice& path, const ChannelParams& params,
                       LatticeScheme scheme = LatticeScheme::Euler);

/// Trapezoid-in-z action with second-order centered differences and the
/// vertex at the same slice, in the lab frame. Error O(dz^2) for smooth paths.
double continuum_action(const PathLattice& path, const ChannelParams& params);

/// As continuum_action, but the z-derivative is taken of the dispersion-free
/// field e^{-i beta2 w^2 z/2} psi, so the free part of the integrand is exact
/// for rotating-frame linear paths. Used to evaluate classical trajectories.
double rotating_frame_action(const PathLattice& path, const ChannelParams& params);

struct LogMeasure {
  double log_lambda_tilde;  // -N M log(dz pi Q / delta)
  double log_lambda;        // -M log(pi Q L / delta)
};

LogMeasure log_measure_constants(const GridSpec& grid, double Q);

/// Per-slice rotating-frame transform: phi_{i,j} = e^{-i beta2 w_j^2 z_i / 2} psi_{i,j}.
std::vector<cvec> to_rotating_frame(const PathLattice& path, double beta2);

}  // namespace nlsepdf
