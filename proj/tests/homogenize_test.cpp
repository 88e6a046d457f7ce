#include "doctest.h"

#include <cmath>
#include <random>

#include "effham/homogenize.hpp"
#include "effham/potential.hpp"
#include "support.hpp"

using namespace effham;

namespace {

constexpr double kPi = kTwoPi / 2.0;

FourierMode cosine(IntVec k, double r = 1.0, double omega = 0.0) {
  return from_real_form({std::move(k), r, omega});
}

const TrigPotential kCos1d(1, 0.0, {cosine({1})});
const TrigPotential kCos2d(2, 0.0, {cosine({1, 0}), cosine({0, 1})});

SolverConfig quick(int n = 48) {
  SolverConfig c;
  c.grid_points_per_dim = n;
  c.horizon_scale = 20.0;
  return c;
}

// Midpoint rule on a fine grid, independent of the library's quadrature.
double action(const TrigPotential& w, double h, int n = 200000) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    s += std::sqrt(std::max(0.0, 2.0 * (h - w.eval({x}))));
  }
  return s / n;
}

}  // namespace

TEST_CASE("one-dimensional oracle") {
  REQUIRE(hbar_1d_exact(kCos1d, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(hbar_1d_critical_momentum(kCos1d) == doctest::Approx(4.0 / kPi).epsilon(1e-10));
  REQUIRE(hbar_1d_exact(kCos1d, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(hbar_1d_exact(kCos1d, -1.0) == doctest::Approx(1.0).epsilon(1e-12));

  const double h3 = hbar_1d_exact(kCos1d, 3.0);
  REQUIRE(h3 > 4.5);
  REQUIRE(h3 < 5.5);
  REQUIRE(action(kCos1d, h3) == doctest::Approx(3.0).epsilon(1e-8));

  // shifted, non-primitive mode with nonzero mean
  const TrigPotential w(1, 0.2, {cosine({2}, 0.7, 0.4)});
  const double pc = hbar_1d_critical_momentum(w);
  REQUIRE(action(w, max_on_torus(w)) == doctest::Approx(pc).epsilon(1e-6));
  for (double p : {0.5 * pc, 1.2 * pc, 2.0, 4.0}) {
    const double h = hbar_1d_exact(w, p);
    if (std::abs(p) <= pc) {
      REQUIRE(h == doctest::Approx(max_on_torus(w)).epsilon(1e-10));
    } else {
      REQUIRE(action(w, h) == doctest::Approx(p).epsilon(1e-7));
    }
  }
  REQUIRE_THROWS_AS(hbar_1d_exact(kCos2d, 1.0), DimensionMismatch);
}

TEST_CASE("constant potential gives the kinetic energy") {
  const TrigPotential c(2, 0.0);
  const auto s = hbar_numeric(c, {1.0, 1.0}, quick(16));
  REQUIRE(std::abs(s.value - 1.0) < 1e-6);
  const auto s3 = hbar_numeric(TrigPotential(3, 0.4), {0.5, -1.0, 0.0}, quick(8));
  REQUIRE(std::abs(s3.value - (0.625 + 0.4)) < 1e-6);
}

TEST_CASE("hbar_numeric matches the one-dimensional oracle") {
  for (double p : {0.0, 0.8, 2.0, -2.5}) {
    const auto s = hbar_numeric(kCos1d, {p}, quick(64));
    REQUIRE(std::abs(s.value - hbar_1d_exact(kCos1d, p)) < 5e-3);
  }
}

TEST_CASE("Lax-Friedrichs schemes converge, faster with grid extrapolation") {
  const TrigPotential w(1, 0.0, {cosine({3}, 0.5)});
  for (double p : {0.0, 1.3, 2.0}) {
    const double exact = hbar_1d_exact(w, p);
    auto cfg = quick(128);
    cfg.scheme = Scheme::LocalLaxFriedrichs;
    const auto plain = hbar_numeric(w, {p}, cfg);
    REQUIRE(plain.grid_correction == 0.0);
    cfg.richardson = true;
    const auto extrapolated = hbar_numeric(w, {p}, cfg);
    REQUIRE(std::abs(extrapolated.value - exact) < 2e-3);
    REQUIRE(std::abs(extrapolated.value - exact) <= std::abs(plain.value - exact) + 1e-4);

    cfg.scheme = Scheme::LaxFriedrichs;
    cfg.richardson = false;
    // the global bound smears more than the local one
    const double global = std::abs(hbar_numeric(w, {p}, cfg).value - exact);
    REQUIRE(global < 0.25);
    REQUIRE(global >= std::abs(plain.value - exact) - 1e-4);
  }
}

TEST_CASE("separable two-dimensional potential") {
  const auto s = hbar_numeric(kCos2d, {2.0, 1.0}, quick(32));
  const double oracle = hbar_1d_exact(kCos1d, 2.0) + hbar_1d_exact(kCos1d, 1.0);
  REQUIRE(std::abs(s.value - oracle) < 1e-2);

  const auto blocks = decompose_separable(kCos2d);
  REQUIRE(blocks.size() == 2);
  REQUIRE(hbar_separable(blocks, {2.0, 1.0}) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("hbar_separable") {
  const TrigPotential w1(1, 0.3, {cosine({1}, 0.8, 0.2)});
  const TrigPotential w2(1, -0.1, {cosine({3}, 0.5, 1.0)});
  std::vector<SeparableBlock> blocks{{{0}, w1, Rational(1)}, {{1}, w2, Rational(1)}};
  const RealVec p{1.7, -0.4};
  const double expect = hbar_1d_exact(w1, 1.7) + hbar_1d_exact(w2, -0.4);
  REQUIRE(hbar_separable(blocks, p) == doctest::Approx(expect).epsilon(1e-12));

  // the full potential with a rescaled block has the same value
  blocks[0].scaling = Rational(2);
  const auto full = assemble_separable(blocks, 2);
  REQUIRE(full.modes()[0].k == IntVec{2, 0});
  REQUIRE(hbar_separable(blocks, p) == doctest::Approx(expect).epsilon(1e-12));
  const auto parts = decompose_separable(full);
  REQUIRE(hbar_separable(parts, p) == doctest::Approx(expect).epsilon(1e-10));

  const std::vector<SeparableBlock> constant{{{0}, TrigPotential(1, 0.5), Rational(1)},
                                             {{1}, TrigPotential(1, 0.25), Rational(1)}};
  REQUIRE(hbar_separable(constant, p) == doctest::Approx(0.5 * (1.7 * 1.7 + 0.16) + 0.75));

  const std::vector<SeparableBlock> overlap{{{0}, w1, Rational(1)}, {{0}, w2, Rational(1)}};
  REQUIRE_THROWS(hbar_separable(overlap, p));
  const std::vector<SeparableBlock> missing{{{0}, w1, Rational(1)}};
  REQUIRE_THROWS(hbar_separable(missing, p));
}

TEST_CASE("hbar_grid preserves order, evenness and the sandwich bound") {
  std::mt19937_64 rng(31);
  const auto v = effham::testing::random_potential(rng, 2, 3, 1, 0.1);
  const std::vector<RealVec> ps{{0.7, -0.3}, {-0.7, 0.3}, {1.5, 1.0}, {-1.5, -1.0}};
  const auto cfg = quick(48);
  const auto samples = hbar_grid(v, ps, cfg);
  REQUIRE(samples.size() == ps.size());
  const auto single = hbar_numeric(v, ps[2], cfg);
  REQUIRE(samples[2].p == ps[2]);
  REQUIRE(samples[2].value == single.value);

  const double vmax = max_on_torus(v);
  for (std::size_t i = 0; i < ps.size(); i += 2) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    REQUIRE(std::abs(a.value - b.value) <= 2.0 * std::max(a.error_estimate, b.error_estimate));
  }
  for (const auto& s : samples) {
    const double kin = 0.5 * (s.p[0] * s.p[0] + s.p[1] * s.p[1]);
    const double tol = 2.0 * s.error_estimate + 5e-2;
    REQUIRE(s.value >= kin + v.mean() - tol);
    REQUIRE(s.value <= kin + vmax + tol);
  }
}

TEST_CASE("refinement changes the value by less than the coarse error estimate") {
  const RealVec p{0.6, 0.2};
  const auto coarse = hbar_numeric(kCos2d, p, quick(32));
  const auto fine = hbar_numeric(kCos2d, p, quick(64));
  REQUIRE(std::abs(fine.value - coarse.value) < std::max(coarse.error_estimate, 1e-2) + 2e-2);
}

TEST_CASE("three-dimensional separable potential") {
  const TrigPotential v(3, 0.0, {cosine({1, 0, 0}), cosine({0, 1, 0}, 0.5), cosine({0, 0, 1}, 0.25)});
  const RealVec p{0.5, 1.2, 0.0};
  const auto s = hbar_numeric(v, p, quick(20));
  const double oracle = hbar_separable(decompose_separable(v), p);
  REQUIRE(std::abs(s.value - oracle) < 2e-2);
}

TEST_CASE("solver arguments are validated") {
  REQUIRE_THROWS_AS(hbar_numeric(TrigPotential(4, 0.0), {0, 0, 0, 0}), SolverError);
  REQUIRE_THROWS_AS(hbar_numeric(kCos2d, {0.0}), DimensionMismatch);
  SolverConfig bad = quick();
  bad.cfl = 1.5;
  REQUIRE_THROWS_AS(hbar_numeric(kCos2d, {0.0, 0.0}, bad), SolverError);
  bad = quick();
  bad.horizon_T1 = 5.0;
  bad.horizon_T2 = 4.0;
  REQUIRE_THROWS_AS(hbar_numeric(kCos2d, {0.0, 0.0}, bad), SolverError);
}
