#include "doctest.h"

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "effham/expansion.hpp"
#include "effham/rigidity.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace effham;
using namespace effham::testing;

namespace {

FourierMode cosine(IntVec k, double r = 1.0, double omega = 0.0) {
  return from_real_form({std::move(k), r, omega});
}

}  // namespace

TEST_CASE("check_nonresonant") {
  const TrigPotential one(2, 0.0, {cosine({1, 0})});
  REQUIRE(check_nonresonant(one, {1.0, 1.0}, 4) == doctest::Approx(1.0));
  REQUIRE(check_nonresonant(one, {0.0, 1.0}, 4) == 0.0);

  const TrigPotential tri(2, 0.0, {cosine({1, 0}), cosine({0, 1}), cosine({1, 1})});
  REQUIRE(check_nonresonant(tri, {1.0, -1.0}, 2) == 0.0);

  const std::vector<Rational> q{Rational(1), Rational(-1)};
  REQUIRE(check_nonresonant_exact(tri, q, 2) == Rational(0));
  const std::vector<Rational> q2{Rational(1), Rational(7, 10)};
  // (1,-1) costs two modes; (-2,3), the first with |k.Q| = 1/10, costs five
  REQUIRE(check_nonresonant_exact(tri, q2, 4) == Rational(3, 10));
  REQUIRE(check_nonresonant_exact(tri, q2, 5) == Rational(1, 10));
}

TEST_CASE("corrector_recursion rejects resonant directions and bad orders") {
  const TrigPotential tri(2, 0.0, {cosine({1, 0}), cosine({0, 1}), cosine({1, 1})});
  REQUIRE_THROWS_AS(corrector_recursion(tri, {1.0, -1.0}, 2), ResonantDirection);
  REQUIRE_THROWS_AS(corrector_recursion(tri, {1.0, 0.7}, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(corrector_recursion(tri, {1.0, 0.7, 0.2}, 2), DimensionMismatch);
}

TEST_CASE("a0 and a1") {
  std::mt19937_64 rng(21);
  const auto v = random_potential(rng, 2, 3, 2, 0.37);
  const RealVec q{1.3, -0.4};
  const auto r = corrector_recursion(v, q, 4);
  REQUIRE(r.a.size() == 5);
  REQUIRE(r.a[0] == 0.5 * (1.3 * 1.3 + 0.4 * 0.4));
  REQUIRE(r.a[1] == 0.37);
}

TEST_CASE("a2_closed_form") {
  const TrigPotential v(2, 0.0, {cosine({1, 0})});
  REQUIRE(a2_closed_form(v, {1.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-15));
  REQUIRE(a2_closed_form(TrigPotential(2, 0.3), {1.0, 1.0}) == 0.0);
  for (double d : {1e-1, 1e-2, 1e-3}) {
    REQUIRE(a2_closed_form(v, {d, 1.0}) == doctest::Approx(0.25 / (d * d)).epsilon(1e-12));
  }
}

TEST_CASE("Dv1 matches the closed form") {
  std::mt19937_64 rng(22);
  const auto v = random_potential(rng, 2, 3, 2);
  const RealVec q{0.83, 0.29};
  const auto r = corrector_recursion(v, q, 2);
  const auto dv1 = dv1_closed_form(v, q);
  for (int s = 0; s < 10; ++s) {
    const auto x = random_point(rng, 2);
    const auto g = r.correctors[0].gradient(x);
    for (std::size_t i = 0; i < 2; ++i) {
      Complex expect{};
      for (const auto& [k, c] : dv1) expect += c[i] * std::polar(1.0, kTwoPi * dot(k, x));
      REQUIRE(std::abs(g[i] - expect.real()) < 1e-12);
    }
  }
}

TEST_CASE("a2 and a3 against independent constructions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_potential(rng, 2, 3, 3);
    RealVec q = random_direction(rng, 2);
    if (check_nonresonant(v, q, 4) < 1e-2) {
      --trial;
      continue;
    }
    const auto r = corrector_recursion(v, q, 4);
    const double a2 = a2_closed_form(v, q);
    REQUIRE(std::abs(r.a[2] - a2) <= 1e-12 * std::max(1.0, std::abs(a2)));

    const auto dv1 = dv1_closed_form(v, q);
    const auto dv2 = dv2_from(dv1, q);
    const Complex a2z = 0.5 * zero_mode(dot_product(dv1, dv1), 2);
    REQUIRE(std::abs(a2z.real() - a2) <= 1e-12 * std::max(1.0, a2));
    const Complex a3 = zero_mode(dot_product(dv1, dv2), 2);
    REQUIRE(std::abs(a3.imag()) <= 1e-12 * std::max(1.0, std::abs(a3.real())));
    REQUIRE(std::abs(r.a[3] - a3.real()) <= 1e-12 * std::max(1.0, std::abs(a3.real())));

    const double a4 = a4_oracle(dv1, dv2, q);
    REQUIRE(std::abs(r.a[4] - a4) <= 1e-11 * std::max(1.0, std::abs(a4)));
  }
}

TEST_CASE("exact rational coefficients agree with the double recursion") {
  std::mt19937_64 rng(24);
  const std::vector<std::vector<Rational>> qs{
      {Rational(1), Rational(7, 10)}, {Rational(3, 2), Rational(-2, 7)}, {Rational(5, 3), Rational(1, 9)}};
  for (const auto& q : qs) {
    // dyadic amplitudes keep the conversion exact
    std::vector<FourierMode> modes{{{1, 0}, {0.5, 0.25}}, {{1, 2}, {-0.375, 0.125}}, {{-2, 1}, {0.25, 0.0}}};
    const TrigPotential v(2, 0.125, modes);
    RealVec qd{boost::rational_cast<double>(q[0]), boost::rational_cast<double>(q[1])};
    const auto exact = expansion_coefficients_exact(v, q, 4);
    const auto r = corrector_recursion(v, qd, 4);
    REQUIRE(exact.size() == 5);
    REQUIRE(exact[1] == BigRational(1, 8));
    for (int l = 0; l <= 4; ++l) {
      const double e = static_cast<double>(exact[l]);
      REQUIRE(std::abs(r.a[l] - e) <= 1e-12 * std::max(1.0, std::abs(e)));
    }
  }
}

TEST_CASE("Hermitian symmetry and supports of the correctors") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_potential(rng, 3, 3, 2);
    RealVec q = random_direction(rng, 3);
    if (check_nonresonant(v, q, 4) < 1e-2) {
      --trial;
      continue;
    }
    const auto r = corrector_recursion(v, q, 4);
    double scale = 0.0;
    for (double a : r.a) scale = std::max(scale, std::abs(a));
    REQUIRE(r.max_imaginary <= 1e-14 * std::max(1.0, scale));

    // signed sums of at most l modes
    std::set<IntVec> reach{IntVec(3, 0)};
    for (int l = 1; l <= 4; ++l) {
      std::set<IntVec> next = reach;
      for (const auto& k : reach) {
        for (const auto& m : v.modes()) {
          next.insert(add(k, m.k));
          next.insert(add(k, negate(m.k)));
        }
      }
      reach = std::move(next);
      const auto& c = r.correctors[l - 1];
      REQUIRE(c.hermitian_defect() <= 1e-14 * std::max(1.0, scale));
      for (const auto& [k, coef] : c.coeffs) REQUIRE(reach.count(k) == 1);
    }
  }
}

TEST_CASE("coefficients are homogeneous in Q") {
  std::mt19937_64 rng(26);
  const auto v = random_potential(rng, 2, 3, 2);
  const RealVec q{0.91, 0.37};
  const auto r1 = corrector_recursion(v, q, 4);
  for (double t : {0.5, 2.0, 3.7}) {
    const auto rt = corrector_recursion(v, {t * q[0], t * q[1]}, 4);
    REQUIRE(rt.a[2] == doctest::Approx(r1.a[2] * std::pow(t, -2)).epsilon(1e-12));
    REQUIRE(rt.a[3] == doctest::Approx(r1.a[3] * std::pow(t, -4)).epsilon(1e-12));
    REQUIRE(rt.a[4] == doctest::Approx(r1.a[4] * std::pow(t, -6)).epsilon(1e-12));
  }
}

TEST_CASE("cell residual is fifth order") {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_potential(rng, 2, 3, 2);
    RealVec q = random_direction(rng, 2);
    // asymptotic at eps = 1e-2 only with small denominators bounded away from 0
    if (check_nonresonant(v, q, 4) < 0.3 || std::hypot(q[0], q[1]) > 2.5) {
      --trial;
      continue;
    }
    const auto r = corrector_recursion(v, q, 4);
    std::vector<RealVec> pts;
    for (int s = 0; s < 64; ++s) pts.push_back(random_point(rng, 2));
    const double ratio = cell_residual(v, r, 1e-2, pts) / cell_residual(v, r, 5e-3, pts);
    REQUIRE(ratio >= 24.0);
    REQUIRE(ratio <= 40.0);
  }
}

TEST_CASE("sole_term") {
  const TrigPotential ortho(2, 0.0, {cosine({1, 0}), cosine({0, 1})});
  REQUIRE_THROWS_AS(sole_term(ortho, 0, 1, 1, 1, {1.0, 2.0}), std::invalid_argument);

  // |l1|^2 |l2|^2 (k1.k2)^2 |w|^2 / ((k1.Q)^2 (k2.Q)^2 (w.Q)^2) = (1/16)(1)(5) / (1 * 9 * 16)
  const TrigPotential v(2, 0.0, {cosine({1, 0}), cosine({1, 1})});
  REQUIRE(sole_term(v, 0, 1, 1, 1, {1.0, 2.0}) == doctest::Approx(5.0 / 2304.0).epsilon(1e-14));
  REQUIRE_THROWS_AS(sole_term(v, 0, 0, 1, 1, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("pole residue of a sole vector matches the closed form") {
  // This pins kSoleTermConstant: the residue is computed from the recursion
  // alone and compared against the closed form.
  std::mt19937_64 rng(28);
  int checked = 0;
  for (int attempt = 0; attempt < 500 && checked < 10; ++attempt) {
    const auto v = random_potential(rng, 2, 3, 2);
    const auto a = build_A_set(v);
    for (std::size_t j1 = 0; j1 < 3 && checked < 10; ++j1) {
      for (std::size_t j2 = j1 + 1; j2 < 3; ++j2) {
        const auto& k1 = v.modes()[j1].k;
        const auto& k2 = v.modes()[j2].k;
        if (dot(k1, k2) == 0) continue;
        const int beta = attempt % 2 ? 1 : -1;
        IntVec w = add(k1, beta == 1 ? k2 : negate(k2));
        if (a.multiplicity(w) != 1) continue;
        bool clean = true;
        for (const auto& m : v.modes()) clean = clean && !parallel(m.k, w);
        for (const auto& [u, mult] : a.counts()) {
          if (parallel(u, w) && u != w && u != negate(w)) clean = false;
        }
        if (!clean) continue;
        const RealVec base = project_off(random_direction(rng, 2), w);
        if (check_nonresonant(v, base, 1) < 0.2) continue;
        const double residue = a4_pole_residue(v, w, base);
        // closed form times (w.Q)^2, evaluated next to the hyperplane
        RealVec near(base);
        for (std::size_t i = 0; i < 2; ++i) near[i] += 1e-7 * static_cast<double>(w[i]) / norm2(w);
        const double dw = dot(w, near);
        const double closed = sole_term(v, j1, j2, 1, beta, near) * dw * dw;
        REQUIRE(std::abs(residue - closed) <= 1e-4 * std::abs(closed));
        REQUIRE(std::abs(residue - pole_oracle(v, w, base)) <= 1e-4 * std::abs(closed));
        ++checked;
        break;
      }
    }
  }
  REQUIRE(checked == 10);
}

TEST_CASE("coinciding pair vectors superpose coherently") {
  // w = (2,2) = k1 + k2 = k3 - k1, and 2w = k2 + k3 is singular too
  const TrigPotential v(2, 0.0,
                        {{{1, 0}, std::polar(0.4, 0.3)}, {{1, 2}, std::polar(0.3, 1.1)}, {{3, 2}, std::polar(0.5, -0.7)}});
  const IntVec w{2, 2};
  REQUIRE(build_A_set(v).multiplicity(w) == 2);
  const RealVec base = project_off({1.0, 0.3}, w);
  const double residue = a4_pole_residue(v, w, base);
  const double oracle = pole_oracle(v, w, base);
  REQUIRE(std::abs(residue - oracle) <= 1e-4 * std::abs(oracle));

  // not the incoherent sum of the two closed-form terms
  RealVec near(base);
  for (std::size_t i = 0; i < 2; ++i) near[i] += 1e-7 * static_cast<double>(w[i]) / norm2(w);
  const double dw = dot(w, near);
  const double incoherent = (sole_term(v, 0, 1, 1, 1, near) + sole_term(v, 0, 2, -1, 1, near)) * dw * dw;
  REQUIRE(std::abs(residue - incoherent) > 1e-3 * std::abs(oracle));
}

TEST_CASE("pole residue preconditions") {
  const TrigPotential one(2, 0.0, {cosine({1, 0})});
  REQUIRE_THROWS(a4_pole_residue(one, {2, 0}, RealVec{0.0, 1.0}));
  const TrigPotential two(2, 0.0, {cosine({1, 0}), cosine({1, 1})});
  REQUIRE_THROWS(a4_pole_residue(two, {2, 1}, std::vector<RealVec>{{1.0, 1.0}}));
}
