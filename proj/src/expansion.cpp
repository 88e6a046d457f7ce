#include "effham/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace effham {

namespace {

template <class C>
using SeriesT = std::unordered_map<IntVec, C, IntVecHash>;

/// Minimal exact complex number over cpp_rational.
struct ExactComplex {
  BigRational re{0};
  BigRational im{0};

  ExactComplex& operator+=(const ExactComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  [[nodiscard]] bool is_zero() const { return re == 0 && im == 0; }
};

bool is_zero_coeff(const Complex& c) { return c == Complex{}; }
bool is_zero_coeff(const ExactComplex& c) { return c.is_zero(); }

Complex half_dot(std::int64_t d, Complex) { return {0.5 * static_cast<double>(d), 0.0}; }
ExactComplex half_dot(std::int64_t d, const ExactComplex&) {
  return {BigRational(d) / 2, BigRational(0)};
}

/// Core recursion shared by the floating and exact paths. `solve(k, g)`
/// returns the gradient-normalized corrector coefficient -g / (k.Q).
/// u[l][k] is defined by D v_l = sum_k k u_l(k) e^{i 2 pi k.x}.
template <class C>
std::vector<C> run_recursion(const std::vector<std::pair<IntVec, C>>& fourier, const C& mean,
                             int order, bool last_corrector,
                             const std::function<C(const IntVec&, const C&)>& solve,
                             std::vector<SeriesT<C>>& u) {
  std::vector<C> a(static_cast<std::size_t>(order) + 1);
  u.assign(static_cast<std::size_t>(order) + 1, {});
  for (int l = 1; l <= order; ++l) {
    SeriesT<C> g;
    if (l == 1) {
      for (const auto& [k, c] : fourier) g[k] += c;
    }
    for (int i = 1; i < l; ++i) {
      const auto& ui = u[static_cast<std::size_t>(i)];
      const auto& uj = u[static_cast<std::size_t>(l - i)];
      for (const auto& [k1, c1] : ui) {
        for (const auto& [k2, c2] : uj) {
          g[add(k1, k2)] += half_dot(dot(k1, k2), c1) * (c1 * c2);
        }
      }
    }
    const IntVec zero(fourier.empty() ? 0 : fourier.front().first.size(), 0);
    C al{};
    if (auto it = g.find(zero); it != g.end()) {
      al = it->second;
      g.erase(it);
    }
    if (l == 1) al += mean;
    a[static_cast<std::size_t>(l)] = al;
    if (l == order && !last_corrector) break;
    auto& ul = u[static_cast<std::size_t>(l)];
    for (const auto& [k, c] : g) {
      if (is_zero_coeff(c)) continue;
      ul.emplace(k, solve(k, c));
    }
  }
  return a;
}

std::vector<std::pair<IntVec, Complex>> fourier_pairs(const TrigPotential& v) {
  std::vector<std::pair<IntVec, Complex>> out;
  for (const auto& m : v.modes()) {
    out.emplace_back(m.k, m.amplitude);
    out.emplace_back(negate(m.k), std::conj(m.amplitude));
  }
  return out;
}

void check_args(const TrigPotential& v, std::size_t qdim, int order) {
  if (order < 1) throw std::invalid_argument("expansion order must be at least 1");
  if (qdim != v.dim()) {
    throw DimensionMismatch("Q has dimension " + std::to_string(qdim) + ", potential has " +
                            std::to_string(v.dim()));
  }
}

/// All nonzero sum_j c_j k_j with sum |c_j| <= order.
std::vector<IntVec> reachable_frequencies(const TrigPotential& v, int order) {
  const auto& modes = v.modes();
  std::vector<IntVec> out;
  IntVec acc(v.dim(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int budget) {
    if (j == modes.size()) {
      if (!is_zero(acc)) out.push_back(acc);
      return;
    }
    for (int c = -budget; c <= budget; ++c) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * modes[j].k[i];
      rec(j + 1, budget - std::abs(c));
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= c * modes[j].k[i];
    }
  };
  rec(0, order);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double neville_at_zero(const std::vector<double>& s, std::vector<double> f) {
  const std::size_t n = s.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      f[i] = (s[i + m] * f[i] - s[i] * f[i + 1]) / (s[i + m] - s[i]);
    }
  }
  return f[0];
}

bool is_pair_vector(const TrigPotential& v, const IntVec& w) {
  const auto& m = v.modes();
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      if (a == b) continue;
      for (int sa : {1, -1}) {
        for (int sb : {1, -1}) {
          IntVec s(w.size());
          for (std::size_t i = 0; i < w.size(); ++i) s[i] = sa * m[a].k[i] + sb * m[b].k[i];
          if (s == w) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

Complex FourierSeries::coeff(const IntVec& k) const {
  const auto it = coeffs.find(k);
  return it == coeffs.end() ? Complex{} : it->second;
}

double FourierSeries::value(const RealVec& x) const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs) {
    const double th = kTwoPi * dot(k, x);
    s += c.real() * std::cos(th) - c.imag() * std::sin(th);
  }
  return s;
}

RealVec FourierSeries::gradient(const RealVec& x) const {
  RealVec g(dim, 0.0);
  for (const auto& [k, c] : coeffs) {
    const double th = kTwoPi * dot(k, x);
    // d/dx Re(c e^{i th}) = Re(i 2 pi k c e^{i th})
    const double re = -kTwoPi * (c.real() * std::sin(th) + c.imag() * std::cos(th));
    for (std::size_t i = 0; i < dim; ++i) g[i] += static_cast<double>(k[i]) * re;
  }
  return g;
}

double FourierSeries::hermitian_defect() const {
  double d = 0.0;
  for (const auto& [k, c] : coeffs) d = std::max(d, std::abs(coeff(negate(k)) - std::conj(c)));
  return d;
}

RealVec ExpansionResult::corrector_gradient(const RealVec& x, double eps) const {
  RealVec g(Q.size(), 0.0);
  double p = 1.0;
  for (const auto& v : correctors) {
    p *= eps;
    const auto dv = v.gradient(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += p * dv[i];
  }
  return g;
}

double check_nonresonant(const TrigPotential& v, const RealVec& q, int order) {
  check_args(v, q.size(), order);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& k : reachable_frequencies(v, order)) best = std::min(best, std::abs(dot(k, q)));
  return best;
}

Rational check_nonresonant_exact(const TrigPotential& v, const std::vector<Rational>& q,
                                 int order) {
  check_args(v, q.size(), order);
  const auto freqs = reachable_frequencies(v, order);
  if (freqs.empty()) throw std::invalid_argument("constant potential has no frequencies");
  Rational best(-1);
  for (const auto& k : freqs) {
    Rational d(0);
    for (std::size_t i = 0; i < k.size(); ++i) d += Rational(k[i]) * q[i];
    d = boost::abs(d);
    if (best.numerator() < 0 || d < best) best = d;
  }
  return best;
}

ExpansionResult corrector_recursion(const TrigPotential& v, const RealVec& q, int order,
                                    double eta) {
  check_args(v, q.size(), order);
  if (std::all_of(q.begin(), q.end(), [](double c) { return c == 0.0; })) {
    throw std::invalid_argument("Q must be nonzero");
  }
  ExpansionResult res;
  res.Q = q;
  res.order = order;
  res.min_denominator = check_nonresonant(v, q, order);
  if (res.min_denominator < eta) {
    throw ResonantDirection("Q is resonant: min |k.Q| = " + std::to_string(res.min_denominator) +
                            " below threshold " + std::to_string(eta));
  }
  std::vector<SeriesT<Complex>> u;
  const std::function<Complex(const IntVec&, const Complex&)> solve =
      [&](const IntVec& k, const Complex& g) { return -g / dot(k, q); };
  const auto a = run_recursion<Complex>(fourier_pairs(v), Complex{v.mean(), 0.0}, order, true,
                                        solve, u);
  double q2 = 0.0;
  for (double c : q) q2 += c * c;
  res.a.push_back(0.5 * q2);
  for (int l = 1; l <= order; ++l) {
    const auto& al = a[static_cast<std::size_t>(l)];
    res.max_imaginary = std::max(res.max_imaginary, std::abs(al.imag()));
    res.a.push_back(al.real());
    FourierSeries fs;
    fs.dim = v.dim();
    const Complex inv_2pi_i{0.0, -1.0 / kTwoPi};
    for (const auto& [k, c] : u[static_cast<std::size_t>(l)]) fs.coeffs.emplace(k, c * inv_2pi_i);
    res.correctors.push_back(std::move(fs));
  }
  return res;
}

std::vector<BigRational> expansion_coefficients_exact(const TrigPotential& v,
                                                      const std::vector<Rational>& q, int order) {
  check_args(v, q.size(), order);
  auto exact = [](double d) { return BigRational(d); };  // dyadic, exact
  std::vector<std::pair<IntVec, ExactComplex>> fourier;
  for (const auto& [k, c] : fourier_pairs(v)) {
    fourier.emplace_back(k, ExactComplex{exact(c.real()), exact(c.imag())});
  }
  std::vector<BigRational> qx;
  for (const auto& c : q) qx.emplace_back(BigRational(c.numerator()) / c.denominator());
  const std::function<ExactComplex(const IntVec&, const ExactComplex&)> solve =
      [&](const IntVec& k, const ExactComplex& g) {
        BigRational d(0);
        for (std::size_t i = 0; i < k.size(); ++i) d += BigRational(k[i]) * qx[i];
        if (d == 0) throw ResonantDirection("frequency " + to_string(k) + " is orthogonal to Q");
        return ExactComplex{-g.re / d, -g.im / d};
      };
  std::vector<SeriesT<ExactComplex>> u;
  const auto a = run_recursion<ExactComplex>(fourier, ExactComplex{exact(v.mean()), 0}, order,
                                             false, solve, u);
  std::vector<BigRational> out;
  BigRational q2(0);
  for (const auto& c : qx) q2 += c * c;
  out.push_back(q2 / 2);
  for (int l = 1; l <= order; ++l) {
    const auto& al = a[static_cast<std::size_t>(l)];
    if (al.im != 0) throw std::logic_error("exact expansion coefficient has imaginary part");
    out.push_back(al.re);
  }
  return out;
}

double a2_closed_form(const TrigPotential& v, const RealVec& q) {
  check_args(v, q.size(), 1);
  double s = 0.0;
  for (const auto& m : v.modes()) {
    const double kq = dot(m.k, q);
    if (kq == 0.0) throw ResonantDirection("mode " + to_string(m.k) + " is orthogonal to Q");
    s += std::norm(m.amplitude) * norm2(m.k) / (kq * kq);
  }
  return s;
}

double sole_term(const TrigPotential& v, std::size_t j1, std::size_t j2, int alpha, int beta,
                 const RealVec& q) {
  check_args(v, q.size(), 1);
  if (j1 >= v.mode_count() || j2 >= v.mode_count()) throw std::out_of_range("mode index");
  if (j1 == j2) throw std::invalid_argument("sole_term needs two distinct modes");
  if ((alpha != 1 && alpha != -1) || (beta != 1 && beta != -1)) {
    throw std::invalid_argument("alpha and beta must be +1 or -1");
  }
  const auto& m1 = v.modes()[j1];
  const auto& m2 = v.modes()[j2];
  const auto kk = dot(m1.k, m2.k);
  if (kk == 0) {
    throw std::invalid_argument("modes " + to_string(m1.k) + " and " + to_string(m2.k) +
                                " are orthogonal");
  }
  IntVec w(m1.k.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha * m1.k[i] + beta * m2.k[i];
  const double d1 = dot(m1.k, q), d2 = dot(m2.k, q), dw = dot(w, q);
  if (d1 == 0.0 || d2 == 0.0 || dw == 0.0) throw ResonantDirection("zero denominator in sole term");
  const double kkd = static_cast<double>(kk);
  return kSoleTermConstant * std::norm(m1.amplitude) * std::norm(m2.amplitude) * kkd * kkd *
         norm2(w) / (d1 * d1 * d2 * d2 * dw * dw);
}

double a4_pole_residue(const TrigPotential& v, const IntVec& w, const std::vector<RealVec>& path) {
  if (path.size() < 3) throw std::invalid_argument("pole extrapolation needs at least 3 points");
  if (w.size() != v.dim() || is_zero(w)) throw std::invalid_argument("bad pole vector");
  if (!is_pair_vector(v, w)) {
    throw std::invalid_argument(to_string(w) + " is not a signed sum of two distinct modes");
  }
  // A mode parallel to w would put poles of order > 2 into a_4. Other
  // frequencies parallel to w go singular together with w and only add
  // double poles.
  for (const auto& m : v.modes()) {
    if (parallel(m.k, w)) {
      throw ResonantDirection("mode " + to_string(m.k) + " is parallel to the pole vector " +
                              to_string(w));
    }
  }
  // a_4 only sees denominators of v_1..v_3
  const auto freqs = reachable_frequencies(v, 3);
  std::vector<double> s, f;
  for (const auto& q : path) {
    check_args(v, q.size(), 4);
    double other = std::numeric_limits<double>::infinity();
    for (const auto& k : freqs) {
      if (parallel(k, w)) continue;
      other = std::min(other, std::abs(dot(k, q)));
    }
    if (other < kDefaultResonanceThreshold) {
      throw ResonantDirection("path is resonant for a frequency other than the pole vector");
    }
    const double sw = dot(w, q);
    if (sw == 0.0) throw ResonantDirection("path point lies on the pole hyperplane");
    std::vector<SeriesT<Complex>> u;
    const std::function<Complex(const IntVec&, const Complex&)> solve =
        [&](const IntVec& k, const Complex& g) { return -g / dot(k, q); };
    const auto a = run_recursion<Complex>(fourier_pairs(v), Complex{v.mean(), 0.0}, 4, false,
                                          solve, u);
    s.push_back(sw);
    f.push_back(sw * sw * a[4].real());
  }
  return neville_at_zero(s, f);
}

double a4_pole_residue(const TrigPotential& v, const IntVec& w, const RealVec& base) {
  if (base.size() != v.dim()) throw DimensionMismatch("base point dimension");
  const double wb = dot(w, base);
  const double ww = norm2(w);
  // project onto the hyperplane w.Q = 0
  RealVec q0(base);
  for (std::size_t i = 0; i < q0.size(); ++i) q0[i] -= wb / ww * static_cast<double>(w[i]);
  // step size: a quarter of the distance (in s) to the nearest other singularity
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& k : reachable_frequencies(v, 3)) {
    const double kw = static_cast<double>(dot(k, w));
    if (kw == 0.0 || parallel(k, w)) continue;
    radius = std::min(radius, std::abs(dot(k, q0)) * ww / std::abs(kw));
  }
  double s0 = std::isfinite(radius) ? 0.25 * radius : 0.1;
  s0 = std::min(s0, 0.1 * std::sqrt(ww));
  std::vector<RealVec> path;
  for (int i = 0; i < 8; ++i, s0 *= 0.5) {
    RealVec q(q0);
    for (std::size_t d = 0; d < q.size(); ++d) q[d] += s0 / ww * static_cast<double>(w[d]);
    path.push_back(std::move(q));
  }
  return a4_pole_residue(v, w, path);
}

double cell_residual(const TrigPotential& v, const ExpansionResult& r, double eps,
                     const std::vector<RealVec>& points) {
  double rhs = 0.0, p = 1.0;
  for (double al : r.a) {
    rhs += p * al;
    p *= eps;
  }
  double sup = 0.0;
  for (const auto& x : points) {
    const auto dphi = r.corrector_gradient(x, eps);
    double kin = 0.0;
    for (std::size_t i = 0; i < dphi.size(); ++i) {
      const double c = r.Q[i] + dphi[i];
      kin += c * c;
    }
    sup = std::max(sup, std::abs(0.5 * kin + eps * v.eval(x) - rhs));
  }
  return sup;
}

}  // namespace effham
