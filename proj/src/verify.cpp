#include "effham/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "effham/expansion.hpp"

namespace effham {

namespace {

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

RealVec random_direction(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  RealVec q(n);
  double s = 0.0;
  for (auto& x : q) {
    x = g(rng);
    s += x * x;
  }
  for (auto& x : q) x /= std::sqrt(s);
  return q;
}

}  // namespace

VerifyReport run_verify(const TrigPotential& v1, const TrigPotential& v2, const VerifyConfig& cfg) {
  VerifyReport r;
  r.verdict = decide(v1, v2);
  if (v1.dim() != v2.dim()) {
    r.consistent = r.verdict.tag == VerdictTag::OutOfScope;
    r.notes.push_back("dimensions differ; no numeric comparison possible");
    return r;
  }
  const std::size_t n = v1.dim();
  std::mt19937_64 rng(cfg.seed);

  r.max_first = max_on_torus(v1);
  r.max_second = max_on_torus(v2);
  const double max_gap = std::abs(r.max_first - r.max_second);

  // H-bar on a shared momentum set
  r.p.push_back(RealVec(n, 0.0));
  std::uniform_real_distribution<double> up(-cfg.p_max, cfg.p_max);
  for (int i = 0; i < cfg.p_samples; ++i) {
    RealVec p(n);
    for (auto& x : p) x = up(rng);
    r.p.push_back(std::move(p));
  }
  // expansion coefficients along random non-resonant directions
  for (int i = 0, tries = 0; i < cfg.q_samples && tries < 1000; ++tries) {
    const RealVec q = random_direction(rng, n);
    if (check_nonresonant(v1, q, 4) < 1e-3 || check_nonresonant(v2, q, 4) < 1e-3) continue;
    const auto e1 = corrector_recursion(v1, q, 4);
    const auto e2 = corrector_recursion(v2, q, 4);
    r.coefficients.push_back({q, e1.a[2], e2.a[2], e1.a[4], e2.a[4]});
    ++i;
  }

  bool coeffs_agree = true;
  for (const auto& c : r.coefficients) {
    coeffs_agree = coeffs_agree && rel_close(c.a2_first, c.a2_second, cfg.coeff_rel_tol) &&
                   rel_close(c.a4_first, c.a4_second, cfg.coeff_rel_tol);
  }
  const bool means_agree = rel_close(v1.mean(), v2.mean(), 1e-9);
  const bool maxima_agree = max_gap <= 1e-6 * std::max(1.0, std::abs(r.max_first));
  // H-bar is the costly part; skip it when the verdict is settled by cheaper evidence
  const bool decided_cheaply =
      r.verdict.tag == VerdictTag::NotEquivalent &&
      (r.verdict.witness == Witness::MeanMismatch || r.verdict.witness == Witness::PhaseConditionFailed ||
       !means_agree || !maxima_agree || !coeffs_agree);
  if (decided_cheaply) {
    r.notes.push_back("H-bar comparison not needed for this verdict");
  } else {
    long kmax = 1;
    for (const auto* v : {&v1, &v2}) {
      for (const auto& m : v->modes()) {
        for (auto c : m.k) kmax = std::max<long>(kmax, std::labs(c));
      }
    }
    const int base = n == 3 ? std::min(cfg.grid, cfg.grid_3d) : cfg.grid;
    const int cap = n == 3 ? cfg.max_grid_3d : cfg.max_grid;
    int grid = std::max<long>(base, cfg.points_per_wavelength * kmax);
    grid = std::min(grid + grid % 2, std::max(base, cap));
    if (n > 3) {
      r.notes.push_back("no grid solver above three dimensions; H-bar comparison skipped");
    } else if (grid < cfg.min_points_per_wavelength * kmax) {
      r.notes.push_back("frequency " + std::to_string(kmax) + " is not resolved by a " + std::to_string(grid) +
                        "-point grid; H-bar comparison skipped");
    } else {
      SolverConfig sc;
      sc.grid_points_per_dim = grid;
      sc.horizon_scale = cfg.horizon_scale;
      for (const auto& s : hbar_grid(v1, r.p, sc)) r.hbar_first.push_back(s.value);
      for (const auto& s : hbar_grid(v2, r.p, sc)) r.hbar_second.push_back(s.value);
      for (std::size_t i = 0; i < r.p.size(); ++i) {
        r.max_hbar_discrepancy =
            std::max(r.max_hbar_discrepancy, std::abs(r.hbar_first[i] - r.hbar_second[i]));
      }
      r.hbar_computed = true;
      r.grid = grid;
    }
  }
  const bool hbar_agrees = !r.hbar_computed || r.max_hbar_discrepancy <= cfg.hbar_tol;

  switch (r.verdict.tag) {
    case VerdictTag::TransformEquivalent:
    case VerdictTag::EffectivelyEqual:
      r.consistent = means_agree && maxima_agree && hbar_agrees && coeffs_agree;
      if (!maxima_agree) r.notes.push_back("torus maxima differ for an equivalent pair");
      if (!hbar_agrees) r.notes.push_back("H-bar samples differ beyond tolerance");
      if (!coeffs_agree) r.notes.push_back("expansion coefficients differ");
      break;
    case VerdictTag::NotEquivalent:
      if (r.verdict.witness == Witness::MeanMismatch) {
        r.consistent = !means_agree;
      } else if (r.verdict.witness == Witness::PhaseConditionFailed) {
        r.consistent = max_gap >= cfg.max_gap_tol;
        if (!r.consistent) r.notes.push_back("torus-max gap below tolerance for a phase failure");
      } else {
        r.consistent = !means_agree || !maxima_agree || !hbar_agrees || !coeffs_agree;
        if (!r.consistent) r.notes.push_back("no numeric evidence separates the pair");
      }
      break;
    case VerdictTag::OutOfScope:
      r.consistent = true;
      r.notes.push_back("out of scope: " + r.verdict.reason);
      break;
  }
  return r;
}

json report_to_json(const VerifyReport& r) {
  json samples = json::array();
  for (std::size_t i = 0; i < r.hbar_first.size(); ++i) {
    samples.push_back({{"p", r.p[i]}, {"first", r.hbar_first[i]}, {"second", r.hbar_second[i]}});
  }
  json coeffs = json::array();
  for (const auto& c : r.coefficients) {
    coeffs.push_back({{"Q", c.Q},
                      {"a2", {c.a2_first, c.a2_second}},
                      {"a4", {c.a4_first, c.a4_second}}});
  }
  return {{"schema", kSchemaVersion},
          {"verdict", verdict_to_json(r.verdict)},
          {"torus_max", {r.max_first, r.max_second}},
          {"hbar_samples", samples},
          {"grid", r.grid},
          {"max_hbar_discrepancy", r.hbar_computed ? json(r.max_hbar_discrepancy) : json(nullptr)},
          {"coefficients", coeffs},
          {"consistent", r.consistent},
          {"notes", r.notes}};
}

std::vector<std::pair<double, double>> run_mfunc(const MFunctionParams& params,
                                                 const std::vector<double>& ts) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(ts.size());
  for (double t : ts) rows.emplace_back(t, m_function(params, t));
  return rows;
}

}  // namespace effham
