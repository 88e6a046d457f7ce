#include "effham/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace effham {

bool is_zero(const IntVec& k) {
  return std::all_of(k.begin(), k.end(), [](std::int64_t c) { return c == 0; });
}

IntVec negate(IntVec k) {
  for (auto& c : k) c = -c;
  return k;
}

IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

std::int64_t dot(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const IntVec& k, const RealVec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += static_cast<double>(k[i]) * x[i];
  return s;
}

double norm2(const IntVec& k) { return static_cast<double>(dot(k, k)); }

std::int64_t content(const IntVec& k) {
  std::int64_t g = 0;
  for (auto c : k) g = std::gcd(g, c < 0 ? -c : c);
  return g;
}

bool is_canonical(const IntVec& k) {
  for (auto it = k.rbegin(); it != k.rend(); ++it) {
    if (*it != 0) return *it > 0;
  }
  return false;
}

IntVec primitive_direction(const IntVec& k) {
  const auto g = content(k);
  if (g == 0) return k;
  IntVec p(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) p[i] = k[i] / g;
  return is_canonical(p) ? p : negate(std::move(p));
}

bool parallel(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size() || is_zero(a) || is_zero(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a[i] * b[j] != a[j] * b[i]) return false;
    }
  }
  return true;
}

std::string to_string(const IntVec& k) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ')';
  return os.str();
}

RealModeForm to_real_form(const FourierMode& m) {
  // lambda e^{i theta} + conj = 2|lambda| cos(theta + arg lambda)
  double omega = std::arg(m.amplitude);
  if (omega < 0.0) omega += kTwoPi;
  if (omega >= kTwoPi) omega -= kTwoPi;
  return {m.k, 2.0 * std::abs(m.amplitude), omega};
}

FourierMode from_real_form(const RealModeForm& f) {
  return {f.k, std::polar(0.5 * f.r, f.omega)};
}

Transform Transform::inverse() const {
  // y = o x / c + x0  <=>  x = o c (y - x0) = o y / (1/c) - o c x0
  Transform inv;
  inv.c = Rational(1) / c;
  inv.orientation = orientation;
  const double cd = boost::rational_cast<double>(c);
  inv.x0.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) inv.x0[i] = -orientation * cd * x0[i];
  return inv;
}

TrigPotential::TrigPotential(std::size_t dim, double mean, std::vector<FourierMode> modes)
    : dim_(dim), mean_(mean) {
  if (dim == 0) throw InvalidPotential("potential dimension must be at least 1");
  if (!std::isfinite(mean)) throw InvalidPotential("potential mean is not finite");
  modes_.reserve(modes.size());
  for (auto& m : modes) {
    if (m.k.size() != dim) {
      throw InvalidPotential("mode " + to_string(m.k) + " does not have dimension " +
                             std::to_string(dim));
    }
    if (is_zero(m.k)) throw InvalidPotential("zero mode vector");
    if (!std::isfinite(m.amplitude.real()) || !std::isfinite(m.amplitude.imag())) {
      throw InvalidPotential("mode " + to_string(m.k) + " has a non-finite amplitude");
    }
    if (m.amplitude == Complex{}) continue;
    if (!is_canonical(m.k)) {
      m.k = negate(std::move(m.k));
      m.amplitude = std::conj(m.amplitude);
    }
    for (const auto& prev : modes_) {
      if (parallel(prev.k, m.k)) {
        throw InvalidPotential("parallel modes " + to_string(prev.k) + " and " +
                               to_string(m.k));
      }
    }
    modes_.push_back(std::move(m));
  }
}

double TrigPotential::eval(const RealVec& x) const {
  if (x.size() != dim_) {
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) +
                            ", potential has " + std::to_string(dim_));
  }
  double s = mean_;
  for (const auto& m : modes_) {
    const double th = kTwoPi * dot(m.k, x);
    s += 2.0 * (m.amplitude.real() * std::cos(th) - m.amplitude.imag() * std::sin(th));
  }
  return s;
}

void TrigPotential::derivatives(const RealVec& x, RealVec& grad, RealVec& hess) const {
  const std::size_t n = dim_;
  grad.assign(n, 0.0);
  hess.assign(n * n, 0.0);
  for (const auto& m : modes_) {
    const double th = kTwoPi * dot(m.k, x);
    const double c = std::cos(th), s = std::sin(th);
    const double re = m.amplitude.real(), im = m.amplitude.imag();
    // f = 2(re cos th - im sin th)
    const double df = -2.0 * (re * s + im * c) * kTwoPi;
    const double d2f = -2.0 * (re * c - im * s) * kTwoPi * kTwoPi;
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] += df * static_cast<double>(m.k[i]);
      for (std::size_t j = 0; j < n; ++j) {
        hess[i * n + j] += d2f * static_cast<double>(m.k[i] * m.k[j]);
      }
    }
  }
}

std::int64_t TrigPotential::max_frequency() const {
  std::int64_t f = 0;
  for (const auto& m : modes_) {
    for (auto c : m.k) f = std::max(f, c < 0 ? -c : c);
  }
  return f;
}

double TrigPotential::amplitude_sum() const {
  double s = 0.0;
  for (const auto& m : modes_) s += 2.0 * std::abs(m.amplitude);
  return s;
}

TrigPotential canonicalize(const TrigPotential& v) {
  auto modes = v.modes();
  if (v.dim() == 2) {
    std::stable_sort(modes.begin(), modes.end(), [](const FourierMode& a, const FourierMode& b) {
      // both in the upper half plane (x2 > 0, or x2 == 0 and x1 > 0): compare by cross product
      const auto cross = a.k[0] * b.k[1] - a.k[1] * b.k[0];
      return cross > 0;
    });
  }
  return TrigPotential(v.dim(), v.mean(), std::move(modes));
}

TrigPotential transform(const TrigPotential& v, const Transform& t) {
  if (t.c.numerator() == 0) throw TransformRejected("scaling c must be nonzero");
  if (t.orientation != 1 && t.orientation != -1) {
    throw TransformRejected("orientation must be +1 or -1");
  }
  if (t.x0.size() != v.dim()) {
    throw DimensionMismatch("translation has dimension " + std::to_string(t.x0.size()) +
                            ", potential has " + std::to_string(v.dim()));
  }
  std::vector<FourierMode> out;
  out.reserve(v.mode_count());
  for (const auto& m : v.modes()) {
    // k / c = k * den / num must be integral
    IntVec k2(m.k.size());
    for (std::size_t i = 0; i < m.k.size(); ++i) {
      const std::int64_t scaled = m.k[i] * t.c.denominator();
      if (scaled % t.c.numerator() != 0) {
        throw TransformRejected("mode " + to_string(m.k) + " maps to a non-integral frequency");
      }
      k2[i] = t.orientation * scaled / t.c.numerator();
    }
    const double phase = kTwoPi * dot(m.k, t.x0);
    out.push_back({std::move(k2), m.amplitude * std::polar(1.0, phase)});
  }
  return TrigPotential(v.dim(), v.mean(), std::move(out));
}

namespace {

// Damped Newton ascent; falls back to a gradient step when the Hessian is
// not negative definite.
RealVec ascend(const TrigPotential& v, RealVec x) {
  const std::size_t n = v.dim();
  RealVec g, h;
  double fx = v.eval(x);
  for (int it = 0; it < 100; ++it) {
    v.derivatives(x, g, h);
    Eigen::Map<const Eigen::VectorXd> grad(g.data(), static_cast<Eigen::Index>(n));
    if (grad.norm() < 1e-14) break;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> hess(
        h.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd step;
    Eigen::LLT<Eigen::MatrixXd> llt(-hess);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      const double scale = std::max(1.0, hess.cwiseAbs().maxCoeff());
      step = grad / scale;
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      RealVec y(x);
      for (std::size_t i = 0; i < n; ++i) y[i] += t * step[static_cast<Eigen::Index>(i)];
      const double fy = v.eval(y);
      if (fy >= fx) {
        moved = fy > fx || t * step.norm() > 0;
        x = std::move(y);
        fx = fy;
        break;
      }
    }
    if (!moved || t * step.norm() < 1e-15) break;
  }
  return x;
}

}  // namespace

RealVec argmax_on_torus(const TrigPotential& v, int resolution) {
  const std::size_t n = v.dim();
  if (v.mode_count() == 0) return RealVec(n, 0.0);
  // at least 8 points per period of the fastest mode, capped for n >= 3
  std::int64_t res = std::max<std::int64_t>(resolution, 8 * v.max_frequency());
  const std::int64_t cap = n <= 2 ? 2048 : (n == 3 ? 96 : 32);
  res = std::min(res, std::max<std::int64_t>(cap, resolution));
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= static_cast<std::size_t>(res);

  constexpr std::size_t kCandidates = 12;
  std::vector<std::pair<double, std::size_t>> best;  // (value, flat index)
  RealVec x(n);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (std::size_t d = 0; d < n; ++d) {
      x[d] = static_cast<double>(r % static_cast<std::size_t>(res)) / static_cast<double>(res);
      r /= static_cast<std::size_t>(res);
    }
    const double f = v.eval(x);
    if (best.size() < kCandidates || f > best.back().first) {
      best.emplace_back(f, flat);
      std::sort(best.begin(), best.end(), std::greater<>());
      if (best.size() > kCandidates) best.pop_back();
    }
  }
  RealVec arg;
  double fbest = -std::numeric_limits<double>::infinity();
  for (const auto& [f, flat] : best) {
    std::size_t r = flat;
    for (std::size_t d = 0; d < n; ++d) {
      x[d] = static_cast<double>(r % static_cast<std::size_t>(res)) / static_cast<double>(res);
      r /= static_cast<std::size_t>(res);
    }
    RealVec y = ascend(v, x);
    const double fy = v.eval(y);
    if (fy > fbest) {
      fbest = fy;
      arg = std::move(y);
    }
  }
  for (auto& c : arg) c -= std::floor(c);
  return arg;
}

double max_on_torus(const TrigPotential& v, int resolution) {
  if (v.mode_count() == 0) return v.mean();
  return v.eval(argmax_on_torus(v, resolution));
}

bool approx_equal(const TrigPotential& a, const TrigPotential& b, double tol) {
  if (a.dim() != b.dim() || a.mode_count() != b.mode_count()) return false;
  if (std::abs(a.mean() - b.mean()) > tol) return false;
  for (const auto& ma : a.modes()) {
    const auto it = std::find_if(b.modes().begin(), b.modes().end(),
                                 [&](const FourierMode& mb) { return mb.k == ma.k; });
    if (it == b.modes().end()) return false;
    if (std::abs(it->amplitude - ma.amplitude) > tol) return false;
  }
  return true;
}

}  // namespace effham
