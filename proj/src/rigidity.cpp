#include "effham/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/integer/common_factor.hpp>

namespace effham {

namespace {

IntVec scaled(const IntVec& v, std::int64_t s) {
  IntVec out(v);
  for (auto& x : out) x *= s;
  return out;
}

IntVec combine(const IntVec& a, int alpha, const IntVec& b, int beta) {
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
  return out;
}

std::int64_t lcm(std::int64_t a, std::int64_t b) { return boost::integer::lcm(a, b); }

// Coefficients beta with k = sum beta_i basis_i, or nothing if k is outside
// the span. The basis must be linearly independent.
std::optional<std::vector<Rational>> express(const std::vector<IntVec>& basis, const IntVec& k) {
  const std::size_t n = k.size();
  const std::size_t r = basis.size();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(r + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) m[i][j] = basis[j][i];
    m[i][r] = k[i];
  }
  std::size_t row = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t col = 0; col < r && row < n; ++col) {
    std::size_t piv = row;
    while (piv < n && m[piv][col].numerator() == 0) ++piv;
    if (piv == n) continue;
    std::swap(m[piv], m[row]);
    const Rational inv = Rational(1) / m[row][col];
    for (auto& e : m[row]) e *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || m[i][col].numerator() == 0) continue;
      const Rational f = m[i][col];
      for (std::size_t j = col; j <= r; ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < n; ++i) {
    if (m[i][r].numerator() != 0) return std::nullopt;
  }
  if (pivots.size() != r) throw std::logic_error("express: basis is not independent");
  std::vector<Rational> beta(r);
  for (std::size_t i = 0; i < r; ++i) beta[pivots[i]] = m[i][r];
  return beta;
}

double wrap_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y;
}

// distance of x to the nearest multiple of 2 pi
double circular_distance(double x) {
  const double y = wrap_2pi(x);
  return std::min(y, kTwoPi - y);
}

}  // namespace

// ---------------------------------------------------------------------------
// vector sets

void VectorSet::insert_pair(const IntVec& v) {
  if (is_zero(v)) return;
  ++counts_[v];
  ++counts_[negate(v)];
}

int VectorSet::multiplicity(const IntVec& v) const {
  const auto it = counts_.find(v);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<IntVec> VectorSet::elements() const {
  std::vector<IntVec> out;
  out.reserve(counts_.size());
  for (const auto& [v, c] : counts_) out.push_back(v);
  return out;
}

VectorSet build_pair_set(const std::vector<IntVec>& singles, const std::vector<IntVec>& generators) {
  if (singles.size() != generators.size()) {
    throw std::invalid_argument("build_pair_set: singles and generators differ in length");
  }
  VectorSet s;
  for (const auto& u : singles) s.insert_pair(u);
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      if (dot(singles[i], singles[j]) == 0) continue;
      s.insert_pair(combine(generators[i], 1, generators[j], 1));
      s.insert_pair(combine(generators[i], 1, generators[j], -1));
    }
  }
  return s;
}

namespace {
std::vector<IntVec> mode_vectors(const TrigPotential& v) {
  std::vector<IntVec> ks;
  for (const auto& m : v.modes()) ks.push_back(m.k);
  return ks;
}
}  // namespace

VectorSet build_A_set(const TrigPotential& v) {
  const auto ks = mode_vectors(v);
  return build_pair_set(ks, ks);
}

std::vector<IntVec> sole_vectors(const VectorSet& a, const std::vector<IntVec>& generators) {
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      for (int beta : {1, -1}) {
        const IntVec w = combine(generators[i], 1, generators[j], beta);
        if (a.multiplicity(w) == 1) {
          out.push_back(w);
          out.push_back(negate(w));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<IntVec> sole_vectors(const VectorSet& a, const TrigPotential& v) {
  return sole_vectors(a, mode_vectors(v));
}

bool prec(const std::vector<IntVec>& a, const std::vector<IntVec>& b) {
  for (const auto& u : a) {
    if (is_zero(u)) continue;
    const bool found = std::any_of(b.begin(), b.end(), [&](const IntVec& w) {
      return !is_zero(w) && parallel(u, w);
    });
    if (!found) return false;
  }
  return true;
}

bool prec(const VectorSet& a, const VectorSet& b) { return prec(a.elements(), b.elements()); }

bool lemma_geometry_check(const IntVec& u1, const IntVec& u2, const IntVec& u3,
                          const Rational& alpha2, const Rational& alpha3) {
  if (u1.size() != u2.size() || u1.size() != u3.size()) {
    throw DimensionMismatch("lemma_geometry_check: vectors differ in dimension");
  }
  if (alpha2.numerator() <= 0 || alpha3.numerator() <= 0) {
    throw std::invalid_argument("lemma_geometry_check: scalings must be positive");
  }
  const std::vector<IntVec> us{u1, u2, u3};
  for (std::size_t i = 0; i < 3; ++i) {
    if (is_zero(us[i])) throw std::invalid_argument("lemma_geometry_check: zero vector");
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (parallel(us[i], us[j])) {
        throw std::invalid_argument("lemma_geometry_check: vectors must be pairwise non-parallel");
      }
    }
  }
  // Scale S2 by the common denominator; parallelism is unaffected.
  const std::int64_t d = lcm(alpha2.denominator(), alpha3.denominator());
  const std::vector<IntVec> g2{scaled(u1, d), scaled(u2, alpha2.numerator() * (d / alpha2.denominator())),
                               scaled(u3, alpha3.numerator() * (d / alpha3.denominator()))};
  std::vector<IntVec> singles2;
  for (const auto& u : us) singles2.push_back(scaled(u, d));

  const VectorSet s1 = build_pair_set(us, us);
  const VectorSet s2 = build_pair_set(singles2, g2);
  return prec(sole_vectors(s1, us), s2.elements()) && prec(sole_vectors(s2, g2), s1.elements());
}

Rational lattice_halfperiod(const Rational& alpha1, const Rational& alpha2) {
  const std::int64_t d = lcm(alpha1.denominator(), alpha2.denominator());
  const std::int64_t n1 = alpha1.numerator() * (d / alpha1.denominator());
  const std::int64_t n2 = alpha2.numerator() * (d / alpha2.denominator());
  const std::int64_t g = std::gcd(d, std::gcd(std::abs(n1), std::abs(n2)));
  return Rational(g, d);
}

// ---------------------------------------------------------------------------
// M-function

double m_function(const MFunctionParams& p, double t) {
  if (!(p.r1 > 0.0 && p.r2 > 0.0 && p.r3 > 0.0)) {
    throw std::invalid_argument("m_function: amplitudes must be positive");
  }
  const double a1 = boost::rational_cast<double>(p.alpha1);
  const double a2 = boost::rational_cast<double>(p.alpha2);
  const double upper = p.r1 + p.r2 + p.r3;

  // F is 2 pi den_i periodic in theta_i.
  const auto cells = [](std::int64_t den) {
    return static_cast<int>(std::min<std::int64_t>(256 * den, 2048));
  };
  const int n1 = cells(p.alpha1.denominator());
  const int n2 = cells(p.alpha2.denominator());
  const double h1 = kTwoPi * static_cast<double>(p.alpha1.denominator()) / n1;
  const double h2 = kTwoPi * static_cast<double>(p.alpha2.denominator()) / n2;

  // cos(A_i + B_j) = cos A_i cos B_j - sin A_i sin B_j
  std::vector<double> c1(n1), ca(n1), sa(n1), c2(n2), cb(n2), sb(n2);
  for (int i = 0; i < n1; ++i) {
    const double th = i * h1;
    c1[i] = p.r1 * std::cos(th);
    ca[i] = p.r3 * std::cos(a1 * th + t);
    sa[i] = p.r3 * std::sin(a1 * th + t);
  }
  for (int j = 0; j < n2; ++j) {
    const double th = j * h2;
    c2[j] = p.r2 * std::cos(th);
    cb[j] = std::cos(a2 * th);
    sb[j] = std::sin(a2 * th);
  }
  std::vector<double> f(static_cast<std::size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i) {
    double* row = f.data() + static_cast<std::size_t>(i) * n2;
    for (int j = 0; j < n2; ++j) row[j] = c1[i] + c2[j] + ca[i] * cb[j] - sa[i] * sb[j];
  }
  const auto at = [&](int i, int j) {
    i = (i + n1) % n1;
    j = (j + n2) % n2;
    return f[static_cast<std::size_t>(i) * n2 + j];
  };

  // grid local maxima, best few refined
  std::vector<std::pair<double, std::pair<int, int>>> cand;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double v = at(i, j);
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di || dj) && at(i + di, j + dj) > v) {
            local = false;
            break;
          }
        }
      }
      if (local) cand.push_back({v, {i, j}});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (cand.size() > 6) cand.resize(6);

  const auto value = [&](double x, double y) {
    return p.r1 * std::cos(x) + p.r2 * std::cos(y) + p.r3 * std::cos(a1 * x + a2 * y + t);
  };
  double best = cand.empty() ? -upper : cand.front().first;
  for (const auto& [v0, ij] : cand) {
    double x = ij.first * h1, y = ij.second * h2, fx = v0;
    for (int it = 0; it < 60; ++it) {
      const double ph = a1 * x + a2 * y + t;
      const double s3 = p.r3 * std::sin(ph), c3 = p.r3 * std::cos(ph);
      const double gx = -p.r1 * std::sin(x) - a1 * s3;
      const double gy = -p.r2 * std::sin(y) - a2 * s3;
      if (std::hypot(gx, gy) < 1e-14) break;
      const double hxx = -p.r1 * std::cos(x) - a1 * a1 * c3;
      const double hyy = -p.r2 * std::cos(y) - a2 * a2 * c3;
      const double hxy = -a1 * a2 * c3;
      const double det = hxx * hyy - hxy * hxy;
      double dx = gx, dy = gy;
      if (hxx < 0.0 && det > 0.0) {  // negative definite: Newton
        dx = -(hyy * gx - hxy * gy) / det;
        dy = -(hxx * gy - hxy * gx) / det;
      }
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
        const double fn = value(x + step * dx, y + step * dy);
        if (fn >= fx) {
          x += step * dx;
          y += step * dy;
          moved = fn > fx || step * std::hypot(dx, dy) < 1e-15;
          fx = fn;
          break;
        }
      }
      if (!moved) break;
    }
    best = std::max(best, fx);
  }
  return std::min(best, upper);
}

// ---------------------------------------------------------------------------
// phase matching and translations

std::optional<PhaseMatch> phase_equivalent(double omega, double omega_t, const Rational& l_over_pi,
                                           double tol) {
  if (l_over_pi.numerator() <= 0) throw std::invalid_argument("phase_equivalent: l must be positive");
  const double w = wrap_2pi(omega);
  const double wt = wrap_2pi(omega_t);
  const double step = kTwoPi * boost::rational_cast<double>(l_over_pi);  // 2 l
  // With both phases in [0, 2 pi), exact solutions need |k| <= 2 pi / l.
  const long kmax = static_cast<long>(std::ceil(2.0 / boost::rational_cast<double>(l_over_pi))) + 1;
  for (int o : {1, -1}) {
    for (long a = 0; a <= kmax; ++a) {
      for (long k : {a, -a}) {
        const double rhs = o == 1 ? wt + k * step : k * step - wt;
        if (std::abs(w - rhs) <= tol) return PhaseMatch{k, o};
        if (a == 0) break;
      }
    }
  }
  // wrap-around near 0 / 2 pi
  for (int o : {1, -1}) {
    for (long a = 0; a <= kmax; ++a) {
      for (long k : {a, -a}) {
        const double rhs = o == 1 ? wt + k * step : k * step - wt;
        if (circular_distance(w - rhs) <= tol) return PhaseMatch{k, o};
        if (a == 0) break;
      }
    }
  }
  return std::nullopt;
}

std::optional<RealVec> solve_translation(const std::vector<IntVec>& modes,
                                         const std::vector<double>& d_omega, double tol) {
  if (modes.size() != d_omega.size()) {
    throw std::invalid_argument("solve_translation: modes and phases differ in length");
  }
  if (modes.empty()) return RealVec{};
  const std::size_t n = modes.front().size();
  for (const auto& k : modes) {
    if (k.size() != n) throw DimensionMismatch("solve_translation: modes differ in dimension");
  }

  // greedy maximal independent subset, dependent rows expressed in it
  std::vector<std::size_t> basis_idx;
  std::vector<IntVec> basis;
  std::vector<std::pair<std::size_t, std::vector<Rational>>> dependent;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (is_zero(modes[j])) {
      dependent.push_back({j, {}});
      continue;
    }
    auto beta = basis.empty() ? std::nullopt : express(basis, modes[j]);
    if (beta) {
      dependent.push_back({j, std::move(*beta)});
    } else {
      basis.push_back(modes[j]);
      basis_idx.push_back(j);
    }
  }
  for (auto& [j, beta] : dependent) beta.resize(basis.size(), Rational(0));

  std::int64_t period = 1;
  for (const auto& [j, beta] : dependent) {
    for (const auto& b : beta) period = lcm(period, b.denominator());
  }
  const std::size_t r = basis.size();
  double combos = 1.0;
  for (std::size_t i = 0; i < r; ++i) combos *= static_cast<double>(period);
  if (combos > 1e7) throw std::invalid_argument("solve_translation: dependency lattice too large");

  std::vector<double> delta(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) delta[j] = d_omega[j] / kTwoPi;

  const double ftol = tol / kTwoPi;
  const auto frac_distance = [](double x) { return std::abs(x - std::round(x)); };

  std::vector<std::int64_t> shift(r, 0);
  while (true) {
    bool ok = true;
    for (const auto& [j, beta] : dependent) {
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        s += boost::rational_cast<double>(beta[i]) * (delta[basis_idx[i]] + static_cast<double>(shift[i]));
      }
      if (frac_distance(s - delta[j]) > ftol) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    std::size_t pos = 0;
    while (pos < r && ++shift[pos] == period) shift[pos++] = 0;
    if (pos == r) return std::nullopt;
  }

  RealVec x0(n, 0.0);
  if (r > 0) {
    Eigen::MatrixXd k(r, n);
    Eigen::VectorXd rhs(r);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t c = 0; c < n; ++c) k(i, c) = static_cast<double>(basis[i][c]);
      rhs(i) = delta[basis_idx[i]] + static_cast<double>(shift[i]);
    }
    const Eigen::VectorXd y = (k * k.transpose()).ldlt().solve(rhs);
    const Eigen::VectorXd x = k.transpose() * y;
    for (std::size_t c = 0; c < n; ++c) x0[c] = x(c) - std::floor(x(c));
  }
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (circular_distance(kTwoPi * dot(modes[j], x0) - d_omega[j]) > tol * 10.0) return std::nullopt;
  }
  return x0;
}

// ---------------------------------------------------------------------------
// decision procedure

std::string to_string(VerdictTag tag) {
  switch (tag) {
    case VerdictTag::TransformEquivalent: return "TransformEquivalent";
    case VerdictTag::EffectivelyEqual: return "EffectivelyEqual";
    case VerdictTag::NotEquivalent: return "NotEquivalent";
    case VerdictTag::OutOfScope: return "OutOfScope";
  }
  return "?";
}

std::string to_string(Witness w) {
  switch (w) {
    case Witness::None: return "none";
    case Witness::MeanMismatch: return "mean-mismatch";
    case Witness::DirectionMismatch: return "direction-mismatch";
    case Witness::AmplitudeMismatch: return "amplitude-mismatch";
    case Witness::NoCommonScaling: return "no-common-scaling";
    case Witness::PhaseConditionFailed: return "phase-condition-failed";
  }
  return "?";
}

namespace {

constexpr double kValueTol = 1e-9;
constexpr double kPhaseTol = 1e-9;

Verdict not_equivalent(Witness w, std::string reason, std::vector<ModePairing> pairing = {}) {
  Verdict v;
  v.tag = VerdictTag::NotEquivalent;
  v.witness = w;
  v.reason = std::move(reason);
  v.pairing = std::move(pairing);
  return v;
}

const FourierMode* find_mode(const TrigPotential& v, const IntVec& k) {
  for (const auto& m : v.modes()) {
    if (m.k == k) return &m;
  }
  return nullptr;
}

// Same mean and, mode by mode (matched by frequency), the same amplitude.
bool same_potential(const TrigPotential& a, const TrigPotential& b, double tol) {
  if (a.mode_count() != b.mode_count() || std::abs(a.mean() - b.mean()) > tol) return false;
  for (const auto& m : a.modes()) {
    const FourierMode* o = find_mode(b, m.k);
    if (!o || std::abs(o->amplitude - m.amplitude) > tol * std::max(1.0, std::abs(m.amplitude))) {
      return false;
    }
  }
  return true;
}

// T with transform(v2, T) == v1, given that transform(v2, (c, 0, o)) has the
// frequencies of v1. Nothing if no translation matches the phases.
std::optional<Transform> fit_transform(const TrigPotential& v1, const TrigPotential& v2,
                                       const Rational& c, int o) {
  Transform t{c, RealVec(v1.dim(), 0.0), o};
  const TrigPotential w = transform(v2, t);
  std::vector<IntVec> ks;
  std::vector<double> dw;
  for (const auto& m : v1.modes()) {
    const FourierMode* mu = find_mode(w, m.k);
    if (!mu) return std::nullopt;
    ks.push_back(m.k);
    dw.push_back(std::arg(m.amplitude) - std::arg(mu->amplitude));
  }
  const auto y = solve_translation(ks, dw, kPhaseTol);
  if (!y) return std::nullopt;
  // v1(x) = w(x + y) = v2(o (x + y) / c)
  const double cd = boost::rational_cast<double>(c);
  for (std::size_t i = 0; i < y->size(); ++i) t.x0[i] = o * (*y)[i] / cd;
  if (!same_potential(transform(v2, t), v1, 1e-7)) return std::nullopt;
  return t;
}

double residual_phase(const TrigPotential& v, const std::vector<std::size_t>& order,
                      const Rational& a1, const Rational& a2) {
  const auto& ms = v.modes();
  const double w1 = std::arg(ms[order[0]].amplitude);
  const double w2 = std::arg(ms[order[1]].amplitude);
  const double w3 = std::arg(ms[order[2]].amplitude);
  return wrap_2pi(w3 - boost::rational_cast<double>(a1) * w1 - boost::rational_cast<double>(a2) * w2);
}

std::size_t index_of(const TrigPotential& v, const IntVec& k) {
  for (std::size_t i = 0; i < v.mode_count(); ++i) {
    if (v.modes()[i].k == k) return i;
  }
  throw std::logic_error("mode not found");
}

}  // namespace

Verdict decide(const TrigPotential& v1, const TrigPotential& v2) {
  if (v1.dim() != v2.dim()) {
    Verdict v;
    v.reason = "potentials live in different dimensions";
    return v;
  }
  if (v1.mode_count() > 3 || v2.mode_count() > 3) {
    Verdict v;
    v.reason = "more than three modes";
    return v;
  }
  if (std::abs(v1.mean() - v2.mean()) > kValueTol * std::max(1.0, std::abs(v1.mean()))) {
    return not_equivalent(Witness::MeanMismatch, "means differ, so the first coefficient differs");
  }
  if (v1.mode_count() != v2.mode_count()) {
    return not_equivalent(Witness::DirectionMismatch,
                          "mode counts differ, so the second coefficient has a different pole set");
  }

  // pair modes by direction
  const std::size_t m = v1.mode_count();
  std::vector<ModePairing> pairing;
  for (std::size_t i = 0; i < m; ++i) {
    const IntVec& k1 = v1.modes()[i].k;
    const IntVec d1 = primitive_direction(k1);
    std::size_t j = 0;
    while (j < m && primitive_direction(v2.modes()[j].k) != d1) ++j;
    if (j == m) {
      return not_equivalent(Witness::DirectionMismatch,
                            "no mode of the second potential is parallel to " + to_string(k1));
    }
    pairing.push_back({i, j, Rational(content(v2.modes()[j].k), content(k1))});
  }
  for (const auto& pr : pairing) {
    const double r1 = std::abs(v1.modes()[pr.first].amplitude);
    const double r2 = std::abs(v2.modes()[pr.second].amplitude);
    if (std::abs(r1 - r2) > kValueTol * std::max(1.0, r1)) {
      return not_equivalent(Witness::AmplitudeMismatch,
                            "amplitudes differ along " + to_string(v1.modes()[pr.first].k), pairing);
    }
  }

  Verdict out;
  out.pairing = pairing;
  const auto common_scaling = [&]() -> std::optional<Rational> {
    if (pairing.empty()) return Rational(1);
    for (const auto& pr : pairing) {
      if (pr.scaling != pairing.front().scaling) return std::nullopt;
    }
    return pairing.front().scaling;
  };
  const auto equivalent_with = [&](const Rational& c, std::string reason) {
    auto t = fit_transform(v1, v2, c, 1);
    if (!t) t = fit_transform(v1, v2, c, -1);
    if (t) {
      out.tag = VerdictTag::TransformEquivalent;
      out.transform = std::move(t);
    } else {
      out.tag = VerdictTag::EffectivelyEqual;
    }
    out.reason = std::move(reason);
    return out;
  };
  const auto effectively_equal = [&](std::string reason) {
    if (const auto c = common_scaling()) return equivalent_with(*c, std::move(reason));
    out.tag = VerdictTag::EffectivelyEqual;
    out.reason = std::move(reason);
    return out;
  };

  const auto& ms = v1.modes();
  const auto orth = [&](std::size_t a, std::size_t b) { return dot(ms[a].k, ms[b].k) == 0; };

  if (m <= 1) return effectively_equal(m == 0 ? "constant potentials" : "single mode");

  if (m == 2) {
    if (orth(0, 1)) return effectively_equal("two orthogonal modes: separable");
    const auto c = common_scaling();
    if (!c) return not_equivalent(Witness::NoCommonScaling, "two coupled modes scale differently", pairing);
    return equivalent_with(*c, "two coupled modes");
  }

  // m == 3
  const int orth_pairs = int(orth(0, 1)) + int(orth(0, 2)) + int(orth(1, 2));
  if (orth_pairs == 3) return effectively_equal("three mutually orthogonal modes: separable");
  if (orth_pairs == 2) {
    std::size_t iso = 0;
    while (!(orth(iso, (iso + 1) % 3) && orth(iso, (iso + 2) % 3))) ++iso;
    const auto& a = pairing[(iso + 1) % 3];
    const auto& b = pairing[(iso + 2) % 3];
    if (a.scaling != b.scaling) {
      return not_equivalent(Witness::NoCommonScaling, "the coupled pair scales differently", pairing);
    }
    return effectively_equal("one mode orthogonal to a coupled pair: separable");
  }
  const auto c = common_scaling();
  if (!c) return not_equivalent(Witness::NoCommonScaling, "coupled modes scale differently", pairing);

  const std::vector<IntVec> first_two{ms[0].k, ms[1].k};
  const auto alpha = express(first_two, ms[2].k);
  if (!alpha) return equivalent_with(*c, "three linearly independent modes");

  // planar: k3 = a1 k1 + a2 k2, residual phase decides up to the lattice 2 l Z
  const Rational a1 = (*alpha)[0], a2 = (*alpha)[1];
  const Rational l_over_pi = lattice_halfperiod(a1, a2);
  const TrigPotential w_plus = transform(v2, Transform{*c, RealVec(v1.dim(), 0.0), 1});
  const std::vector<std::size_t> id{0, 1, 2};
  const std::vector<std::size_t> wo{index_of(w_plus, ms[0].k), index_of(w_plus, ms[1].k),
                                    index_of(w_plus, ms[2].k)};
  const double theta1 = residual_phase(v1, id, a1, a2);
  const double theta_w = residual_phase(w_plus, wo, a1, a2);
  const auto match = phase_equivalent(theta1, theta_w, l_over_pi, 1e-8);
  if (!match) {
    return not_equivalent(Witness::PhaseConditionFailed,
                          "coplanar modes: residual phases differ modulo the phase lattice", pairing);
  }
  auto t = fit_transform(v1, v2, *c, match->orientation);
  if (!t) t = fit_transform(v1, v2, *c, -match->orientation);
  if (!t) {
    return not_equivalent(Witness::PhaseConditionFailed,
                          "coplanar modes: no translation realizes the phase match", pairing);
  }
  out.tag = VerdictTag::TransformEquivalent;
  out.transform = std::move(t);
  out.reason = "three coplanar coupled modes";
  return out;
}

}  // namespace effham
