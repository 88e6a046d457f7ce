#include "effham/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace effham {

namespace {

double norm(const RealVec& p) {
  double s = 0.0;
  for (double c : p) s += c * c;
  return std::sqrt(s);
}

// One forward-Euler step of the Lax-Friedrichs scheme on an n^Dim periodic
// grid (x fastest). Rows along x are swept with explicit wrap at both ends.
template <int Dim, bool Local>
void lf_step(const std::vector<double>& w, std::vector<double>& wn, const std::vector<double>& vg,
             std::size_t n, const double* p, const double* abound, double dx, double dt) {
  const double inv = 1.0 / dx;
  const double p0 = p[0], p1 = Dim >= 2 ? p[1] : 0.0, p2 = Dim >= 3 ? p[2] : 0.0;
  const double a0 = abound[0], a1 = Dim >= 2 ? abound[1] : 0.0, a2 = Dim >= 3 ? abound[2] : 0.0;
  const std::size_t ny = Dim >= 2 ? n : 1, nz = Dim >= 3 ? n : 1;
  auto axis = [&](double wc, double wm, double wp, double pd, double ab, double& ham,
                  double& diss) {
    const double dm = (wc - wm) * inv;
    const double dp = (wp - wc) * inv;
    const double q = pd + 0.5 * (dm + dp);
    ham += 0.5 * q * q;
    const double a = Local ? std::max(std::abs(pd + dm), std::abs(pd + dp)) : ab;
    diss += 0.5 * a * (dp - dm);
  };
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t row = (z * ny + y) * n;
      const double* __restrict wr = w.data() + row;
      const double* ym = nullptr;
      const double* yp = nullptr;
      const double* zm = nullptr;
      const double* zp = nullptr;
      if constexpr (Dim >= 2) {
        ym = w.data() + (z * ny + (y + ny - 1) % ny) * n;
        yp = w.data() + (z * ny + (y + 1) % ny) * n;
      }
      if constexpr (Dim >= 3) {
        zm = w.data() + (((z + nz - 1) % nz) * ny + y) * n;
        zp = w.data() + (((z + 1) % nz) * ny + y) * n;
      }
      const double* vr = vg.data() + row;
      double* __restrict out = wn.data() + row;
      auto cell = [&](std::size_t i, std::size_t im, std::size_t ip) {
        const double wc = wr[i];
        double ham = 0.0, diss = 0.0;
        axis(wc, wr[im], wr[ip], p0, a0, ham, diss);
        if constexpr (Dim >= 2) axis(wc, ym[i], yp[i], p1, a1, ham, diss);
        if constexpr (Dim >= 3) axis(wc, zm[i], zp[i], p2, a2, ham, diss);
        out[i] = wc - dt * (ham - diss + vr[i]);
      };
      cell(0, n - 1, 1);
      for (std::size_t i = 1; i + 1 < n; ++i) cell(i, i - 1, i + 1);
      cell(n - 1, n - 2, 0);
    }
  }
}

using StepFn = void (*)(const std::vector<double>&, std::vector<double>&,
                        const std::vector<double>&, std::size_t, const double*, const double*,
                        double, double);

// Second-order ENO one-sided differences with local Lax-Friedrichs flux:
// out = -(H(D-, D+) + V), the right-hand side of w_t.
template <int Dim>
void eno2_rhs(const std::vector<double>& w, std::vector<double>& out, const std::vector<double>& vg,
                std::size_t n, const double* p, double dx) {
  const double inv = 1.0 / dx;
  const std::size_t ny = Dim >= 2 ? n : 1, nz = Dim >= 3 ? n : 1;
  const std::size_t plane = ny * n;
  // wrapped coordinates for offsets -2..+2
  std::vector<std::size_t> wrap(n + 4);
  for (std::size_t i = 0; i < n + 4; ++i) wrap[i] = (i + 2 * n - 2) % n;
  auto axis = [inv](double wm2, double wm1, double wc, double wp1, double wp2, double pd, double& ham,
                    double& diss) {
    const double d2m = wc - 2.0 * wm1 + wm2;
    const double d2c = wp1 - 2.0 * wc + wm1;
    const double d2p = wp2 - 2.0 * wp1 + wc;
    const double dm = (wc - wm1 + 0.5 * (std::abs(d2c) <= std::abs(d2m) ? d2c : d2m)) * inv;
    const double dp = (wp1 - wc - 0.5 * (std::abs(d2c) <= std::abs(d2p) ? d2c : d2p)) * inv;
    const double q = pd + 0.5 * (dm + dp);
    ham += 0.5 * q * q;
    diss += 0.5 * std::max(std::abs(pd + dm), std::abs(pd + dp)) * (dp - dm);
  };
  const double* wd = w.data();
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t row = z * plane + y * n;
      const double* r0 = wd + row;
      const double *ym2 = r0, *ym1 = r0, *yp1 = r0, *yp2 = r0;
      const double *zm2 = r0, *zm1 = r0, *zp1 = r0, *zp2 = r0;
      if constexpr (Dim >= 2) {
        const double* zb = wd + z * plane;
        ym2 = zb + wrap[y] * n;
        ym1 = zb + wrap[y + 1] * n;
        yp1 = zb + wrap[y + 3] * n;
        yp2 = zb + wrap[y + 4] * n;
      }
      if constexpr (Dim >= 3) {
        const double* yb = wd + y * n;
        zm2 = yb + wrap[z] * plane;
        zm1 = yb + wrap[z + 1] * plane;
        zp1 = yb + wrap[z + 3] * plane;
        zp2 = yb + wrap[z + 4] * plane;
      }
      for (std::size_t x = 0; x < n; ++x) {
        double ham = 0.0, diss = 0.0;
        const double wc = r0[x];
        axis(r0[wrap[x]], r0[wrap[x + 1]], wc, r0[wrap[x + 3]], r0[wrap[x + 4]], p[0], ham, diss);
        if constexpr (Dim >= 2) axis(ym2[x], ym1[x], wc, yp1[x], yp2[x], p[1], ham, diss);
        if constexpr (Dim >= 3) axis(zm2[x], zm1[x], wc, zp1[x], zp2[x], p[2], ham, diss);
        out[row + x] = -(ham - diss + vg[row + x]);
      }
    }
  }
}

// Two-stage TVD Runge-Kutta (Heun) step of the ENO scheme.
template <int Dim>
void eno2_step(const std::vector<double>& w, std::vector<double>& wn, const std::vector<double>& vg,
               std::size_t n, const double* p, const double*, double dx, double dt) {
  thread_local std::vector<double> k, w1;
  k.resize(w.size());
  w1.resize(w.size());
  eno2_rhs<Dim>(w, k, vg, n, p, dx);
  for (std::size_t i = 0; i < w.size(); ++i) w1[i] = w[i] + dt * k[i];
  eno2_rhs<Dim>(w1, k, vg, n, p, dx);
  for (std::size_t i = 0; i < w.size(); ++i) wn[i] = 0.5 * (w[i] + w1[i] + dt * k[i]);
}

StepFn pick_step(std::size_t dim, Scheme scheme) {
  const bool local = scheme == Scheme::LocalLaxFriedrichs;
  if (scheme == Scheme::Eno2) {
    switch (dim) {
      case 1: return &eno2_step<1>;
      case 2: return &eno2_step<2>;
      default: return &eno2_step<3>;
    }
  }
  switch (dim) {
    case 1: return local ? &lf_step<1, true> : &lf_step<1, false>;
    case 2: return local ? &lf_step<2, true> : &lf_step<2, false>;
    default: return local ? &lf_step<3, true> : &lf_step<3, false>;
  }
}

// Local maxima of a 1-d potential that attain the global maximum.
std::vector<double> global_maximizers_1d(const TrigPotential& w, double wmax) {
  const int res = static_cast<int>(std::max<std::int64_t>(256, 16 * w.max_frequency()));
  std::vector<double> pts;
  auto f = [&](double x) { return w.eval({x}); };
  for (int i = 0; i < res; ++i) {
    const double x = static_cast<double>(i) / res;
    const double h = 1.0 / res;
    if (f(x) >= f(x - h) && f(x) >= f(x + h)) {
      // golden-section refine on [x - h, x + h]
      double a = x - h, b = x + h;
      constexpr double gr = 0.6180339887498949;
      for (int it = 0; it < 80; ++it) {
        const double c = b - gr * (b - a), d = a + gr * (b - a);
        if (f(c) > f(d)) b = d; else a = c;
      }
      const double xm = 0.5 * (a + b);
      if (f(xm) >= wmax - 1e-9) pts.push_back(xm - std::floor(xm));
    }
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

double integrate_sqrt(const TrigPotential& w, double h, const std::vector<double>& breaks,
                      double tol) {
  auto integrand = [&](double x) {
    const double r = h - w.eval({x});
    return r > 0.0 ? std::sqrt(2.0 * r) : 0.0;
  };
  std::vector<double> nodes{0.0};
  for (double b : breaks) {
    if (b > nodes.back() + 1e-14 && b < 1.0 - 1e-14) nodes.push_back(b);
  }
  nodes.push_back(1.0);
  // the integrand is only near-singular at the maximizers, which are segment
  // endpoints; double-exponential quadrature clusters nodes there
  boost::math::quadrature::tanh_sinh<double> rule(12);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double err = 0.0;
    total += rule.integrate(integrand, nodes[i], nodes[i + 1], tol, &err);
    if (!(err <= 1e3 * tol * std::max(1.0, std::abs(total)))) {
      throw QuadratureError("adaptive quadrature did not converge (error estimate " +
                            std::to_string(err) + ")");
    }
  }
  return total;
}

void check_1d(const TrigPotential& w) {
  if (w.dim() != 1) throw DimensionMismatch("hbar_1d_exact needs a one-dimensional potential");
}

}  // namespace

namespace {

// One run of the time-marching scheme on an n^dim grid.
HbarSample solve_on_grid(const TrigPotential& v, const RealVec& p, const SolverConfig& cfg, int grid) {
  const std::size_t dim = v.dim();
  const double pn = norm(p);
  const double T2 = cfg.horizon_T2 > 0.0 ? cfg.horizon_T2 : cfg.horizon_scale / (1.0 + pn);
  const double T1 = cfg.horizon_T1 > 0.0 ? cfg.horizon_T1 : 0.5 * T2;
  if (!(T1 < T2)) throw SolverError("horizons must satisfy 0 < T1 < T2");

  const auto n = static_cast<std::size_t>(grid);
  std::size_t cells = 1;
  for (std::size_t d = 0; d < dim; ++d) cells *= n;
  const double dx = 1.0 / static_cast<double>(n);

  std::vector<double> vgrid(cells);
  {
    RealVec x(dim);
    for (std::size_t c = 0; c < cells; ++c) {
      std::size_t r = c;
      for (std::size_t d = 0; d < dim; ++d) {
        x[d] = static_cast<double>(r % n) * dx;
        r /= n;
      }
      vgrid[c] = v.eval(x);
    }
  }
  // a-priori Lipschitz bound on the solution: |Dw| <= |p| + sqrt(2 osc V) + 1
  const double osc = 2.0 * v.amplitude_sum();
  std::vector<double> abound(dim);
  double asum = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    abound[d] = std::abs(p[d]) + std::sqrt(2.0 * osc) + 1.0;
    asum += abound[d];
  }
  const double dt_max = cfg.cfl * dx / asum;
  const StepFn step = pick_step(dim, cfg.scheme);

  std::vector<double> w(cells, 0.0), wn(cells);
  double offset = 0.0;  // true solution is w + offset
  auto mean = [&] {
    return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(cells) + offset;
  };

  auto advance = [&](double t_from, double t_to) {
    double t = t_from;
    std::size_t steps = 0;
    while (t < t_to) {
      const double dt = std::min(dt_max, t_to - t);
      step(w, wn, vgrid, n, p.data(), abound.data(), dx, dt);
      w.swap(wn);
      t += dt;
      if (++steps % 512 == 0) {
        const double s = w[0];
        for (auto& x : w) x -= s;
        offset += s;
      }
    }
  };

  advance(0.0, T1);
  const double m1 = mean();
  advance(T1, T2);
  const double m2 = mean();

  HbarSample out;
  out.p = p;
  out.value = -(m2 - m1) / (T2 - T1);
  out.error_estimate = std::abs(out.value - (-m2 / T2));
  return out;
}

}  // namespace

HbarSample hbar_numeric(const TrigPotential& v, const RealVec& p, const SolverConfig& cfg) {
  if (v.dim() > 3) throw SolverError("grid solver supports dimension <= 3; use hbar_separable");
  if (p.size() != v.dim()) throw DimensionMismatch("momentum dimension does not match potential");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw SolverError("CFL number must lie in (0, 1)");
  const int n = cfg.grid_points_per_dim;
  if (n < 4) throw SolverError("grid needs at least 4 points per dimension");
  auto fine = solve_on_grid(v, p, cfg, n);
  if (!cfg.richardson || n % 2 != 0 || n < 16) return fine;
  // the scheme's grid error is O(dx^2)
  const auto coarse = solve_on_grid(v, p, cfg, n / 2);
  fine.grid_correction = (fine.value - coarse.value) / 3.0;
  fine.value += fine.grid_correction;
  return fine;
}

std::vector<HbarSample> hbar_grid(const TrigPotential& v, const std::vector<RealVec>& ps,
                                  const SolverConfig& cfg) {
  std::vector<HbarSample> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(hbar_numeric(v, p, cfg));
  return out;
}

double hbar_1d_critical_momentum(const TrigPotential& w, double quad_tol) {
  check_1d(w);
  if (w.mode_count() == 0) return 0.0;
  const double wmax = max_on_torus(w, 256);
  return integrate_sqrt(w, wmax, global_maximizers_1d(w, wmax), quad_tol);
}

double hbar_1d_exact(const TrigPotential& w, double p, double quad_tol) {
  check_1d(w);
  const double ap = std::abs(p);
  if (w.mode_count() == 0) return 0.5 * p * p + w.mean();
  const double wmax = max_on_torus(w, 256);
  const auto breaks = global_maximizers_1d(w, wmax);
  const double pc = integrate_sqrt(w, wmax, breaks, quad_tol);
  if (ap <= pc) return wmax;
  auto f = [&](double h) { return integrate_sqrt(w, h, breaks, quad_tol) - ap; };
  // int sqrt(2(h - W)) >= sqrt(2(h - max W)), so h = max W + p^2/2 brackets the root
  double lo = wmax, hi = wmax + 0.5 * ap * ap;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a)); };
  const auto r = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

double hbar_separable(const std::vector<SeparableBlock>& blocks, const RealVec& p,
                      const SolverConfig& cfg) {
  std::vector<int> seen(p.size(), 0);
  for (const auto& b : blocks) {
    if (b.coords.size() != b.potential.dim()) {
      throw std::invalid_argument("block potential dimension does not match its coordinates");
    }
    for (auto c : b.coords) {
      if (c >= p.size()) throw std::invalid_argument("block coordinate out of range");
      if (seen[c]++) throw std::invalid_argument("blocks overlap at coordinate " + std::to_string(c));
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw std::invalid_argument("coordinate " + std::to_string(i) + " not covered");
  }
  double total = 0.0;
  for (const auto& b : blocks) {
    RealVec pb;
    for (auto c : b.coords) pb.push_back(p[c]);
    total += b.potential.dim() == 1 ? hbar_1d_exact(b.potential, pb[0])
                                    : hbar_numeric(b.potential, pb, cfg).value;
  }
  return total;
}

TrigPotential assemble_separable(const std::vector<SeparableBlock>& blocks, std::size_t dim) {
  double mean = 0.0;
  std::vector<FourierMode> modes;
  for (const auto& b : blocks) {
    // W(c y) has modes c k
    mean += b.potential.mean();
    for (const auto& m : b.potential.modes()) {
      IntVec k(dim, 0);
      for (std::size_t i = 0; i < b.coords.size(); ++i) {
        const Rational ck = b.scaling * m.k[i];
        if (ck.denominator() != 1) throw TransformRejected("block scaling gives a non-integral mode");
        k.at(b.coords[i]) = ck.numerator();
      }
      modes.push_back({std::move(k), m.amplitude});
    }
  }
  return TrigPotential(dim, mean, std::move(modes));
}

std::vector<SeparableBlock> decompose_separable(const TrigPotential& v) {
  const std::size_t n = v.dim();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& m : v.modes()) {
    std::size_t first = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (m.k[i] == 0) continue;
      if (first == n) first = i; else parent[find(i)] = find(first);
    }
  }
  std::vector<SeparableBlock> blocks;
  std::vector<std::size_t> block_of_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    if (block_of_root[r] == n) {
      block_of_root[r] = blocks.size();
      blocks.push_back({});
    }
    blocks[block_of_root[r]].coords.push_back(i);
  }
  std::vector<std::vector<FourierMode>> block_modes(blocks.size());
  for (const auto& m : v.modes()) {
    std::size_t i = 0;
    while (m.k[i] == 0) ++i;
    const auto b = block_of_root[find(i)];
    IntVec k;
    for (auto c : blocks[b].coords) k.push_back(m.k[c]);
    block_modes[b].push_back({std::move(k), m.amplitude});
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].potential = TrigPotential(blocks[b].coords.size(), b == 0 ? v.mean() : 0.0,
                                        std::move(block_modes[b]));
  }
  return blocks;
}

}  // namespace effham
