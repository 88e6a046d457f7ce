#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "effham/potential.hpp"

namespace effham::testing {

inline IntVec random_mode(std::mt19937_64& rng, std::size_t dim, int kmax) {
  std::uniform_int_distribution<int> comp(-kmax, kmax);
  IntVec k(dim);
  do {
    for (auto& c : k) c = comp(rng);
  } while (is_zero(k));
  return k;
}

inline Complex random_amplitude(std::mt19937_64& rng, double rmin = 0.2, double rmax = 0.6) {
  std::uniform_real_distribution<double> r(rmin, rmax), ph(0.0, kTwoPi);
  return std::polar(r(rng), ph(rng));
}

/// m pairwise non-parallel random modes with |k_i| <= kmax.
inline TrigPotential random_potential(std::mt19937_64& rng, std::size_t dim, std::size_t m, int kmax = 2,
                                      double mean = 0.0) {
  std::vector<FourierMode> modes;
  while (modes.size() < m) {
    const IntVec k = random_mode(rng, dim, kmax);
    bool ok = true;
    for (const auto& other : modes) ok = ok && !parallel(k, other.k);
    if (ok) modes.push_back({k, random_amplitude(rng)});
  }
  return TrigPotential(dim, mean, std::move(modes));
}

inline RealVec random_point(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVec x(dim);
  for (auto& c : x) c = u(rng);
  return x;
}

/// mean + sum_j 2 Re(lambda_j e^{i 2 pi k_j.x}) written out term by term.
inline double direct_eval(const TrigPotential& v, const RealVec& x) {
  double s = v.mean();
  for (const auto& m : v.modes()) {
    double ph = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) ph += static_cast<double>(m.k[i]) * x[i];
    s += 2.0 * std::abs(m.amplitude) * std::cos(kTwoPi * ph + std::arg(m.amplitude));
  }
  return s;
}

/// Brute-force maximum on an n-dimensional grid (no refinement).
inline double grid_max(const TrigPotential& v, int res) {
  const std::size_t n = v.dim();
  std::vector<int> idx(n, 0);
  RealVec x(n);
  double best = -1e300;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(idx[i]) / res;
    best = std::max(best, direct_eval(v, x));
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == res) idx[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace effham::testing
