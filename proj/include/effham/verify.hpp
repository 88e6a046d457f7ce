#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "effham/homogenize.hpp"
#include "effham/io.hpp"
#include "effham/rigidity.hpp"

namespace effham {

struct VerifyConfig {
  /// Grid points per dimension in 2-D; 3-D grids use min(grid, grid_3d).
  int grid = 96;
  int grid_3d = 32;
  /// The grid is refined to this many points along the shortest
  /// wavelength of either potential, up to max_grid / max_grid_3d.
  int points_per_wavelength = 16;
  int max_grid = 256;
  int max_grid_3d = 40;
  /// Below this resolution at the cap, H-bar is not compared.
  int min_points_per_wavelength = 12;
  double horizon_scale = 50.0;
  std::uint64_t seed = 7;
  /// Number of momenta besides p = 0.
  int p_samples = 4;
  double p_max = 1.5;
  int q_samples = 3;
  /// H-bar agreement required of equivalent pairs.
  double hbar_tol = 5e-2;
  /// Torus-max gap required of phase-condition failures.
  double max_gap_tol = 1e-2;
  /// Relative tolerance for expansion coefficients to count as equal.
  double coeff_rel_tol = 1e-6;
};

struct CoefficientComparison {
  RealVec Q;
  double a2_first = 0.0, a2_second = 0.0;
  double a4_first = 0.0, a4_second = 0.0;
};

struct VerifyReport {
  Verdict verdict;
  double max_first = 0.0, max_second = 0.0;
  std::vector<RealVec> p;
  std::vector<double> hbar_first, hbar_second;
  double max_hbar_discrepancy = 0.0;
  bool hbar_computed = false;
  /// Grid points per dimension used for H-bar, 0 if skipped.
  int grid = 0;
  std::vector<CoefficientComparison> coefficients;
  bool consistent = false;
  std::vector<std::string> notes;
};

VerifyReport run_verify(const TrigPotential& v1, const TrigPotential& v2, const VerifyConfig& cfg = {});
json report_to_json(const VerifyReport& r);

/// (t, M(t)) rows over the given t values.
std::vector<std::pair<double, double>> run_mfunc(const MFunctionParams& params,
                                                 const std::vector<double>& ts);

}  // namespace effham
