#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "effham/potential.hpp"

namespace effham {

class SolverError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme {
  /// Dissipation per cell and dimension from the stencil's one-sided
  /// gradients, max(|p_i + D^-_i w|, |p_i + D^+_i w|).
  LocalLaxFriedrichs,
  /// Dissipation fixed at the a-priori gradient bound |p| + sqrt(2 osc V) + 1.
  LaxFriedrichs,
  /// Second-order ENO differences, local Lax-Friedrichs flux, Heun time steps.
  Eno2,
};

struct SolverConfig {
  int grid_points_per_dim = 64;
  double cfl = 0.4;
  /// <= 0 selects 0.5 * T2.
  double horizon_T1 = 0.0;
  /// <= 0 selects horizon_scale / (1 + |p|).
  double horizon_T2 = 0.0;
  double horizon_scale = 50.0;
  Scheme scheme = Scheme::Eno2;
  /// Extrapolate from this grid and one with half the points, assuming an
  /// O(dx^2) grid error as the Lax-Friedrichs schemes show (even grids of
  /// at least 16 points only).
  bool richardson = false;
};

struct HbarSample {
  RealVec p;
  double value = 0.0;
  /// |two-horizon quotient - single-horizon quotient| on the fine grid
  double error_estimate = 0.0;
  /// Amount added by the grid extrapolation, 0 without it.
  double grid_correction = 0.0;
};

/// Effective Hamiltonian of 1/2|p|^2 + V from the large-time limit of
/// w_t + 1/2|p + Dw|^2 + V = 0, w(., 0) = 0, on a periodic grid:
/// Hbar(p) ~ -(mean w(T2) - mean w(T1)) / (T2 - T1),
/// Richardson-extrapolated in the grid spacing. Supports dim 1..3.
HbarSample hbar_numeric(const TrigPotential& v, const RealVec& p, const SolverConfig& cfg = {});

/// Element-wise hbar_numeric, order preserved.
std::vector<HbarSample> hbar_grid(const TrigPotential& v, const std::vector<RealVec>& ps,
                                  const SolverConfig& cfg = {});

/// Closed-form one-dimensional effective Hamiltonian: max W when
/// |p| <= int_0^1 sqrt(2(max W - W)), otherwise the root h of
/// int_0^1 sqrt(2(h - W)) dx = |p|.
double hbar_1d_exact(const TrigPotential& w, double p, double quad_tol = 1e-11);

/// int_0^1 sqrt(2(max W - W(x))) dx, the half-width of the flat piece.
double hbar_1d_critical_momentum(const TrigPotential& w, double quad_tol = 1e-11);

/// One factor of a separable potential: `potential` lives on the
/// coordinates `coords` and enters the full potential as potential(c x).
struct SeparableBlock {
  std::vector<std::size_t> coords;
  TrigPotential potential;
  Rational scaling{1};
};

/// Hbar(p) = sum_j Hbar_j(p restricted to block j). One-dimensional blocks use
/// hbar_1d_exact, the rest hbar_numeric with `cfg`. The scalings do not enter.
double hbar_separable(const std::vector<SeparableBlock>& blocks, const RealVec& p,
                      const SolverConfig& cfg = {});

/// The full potential sum_j W_j(c_j x_block) in dimension `dim`.
TrigPotential assemble_separable(const std::vector<SeparableBlock>& blocks, std::size_t dim);

/// Splits V into blocks along the connected components of the coordinate
/// supports of its modes. The mean goes to the first block.
std::vector<SeparableBlock> decompose_separable(const TrigPotential& v);

}  // namespace effham
