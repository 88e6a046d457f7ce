#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace effham {

using IntVec = std::vector<std::int64_t>;
using RealVec = std::vector<double>;
using Complex = std::complex<double>;
using Rational = boost::rational<std::int64_t>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Thrown when a potential violates the non-parallel mode assumption or is
/// otherwise malformed (zero mode vector, wrong dimension).
class InvalidPotential : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a scaling maps some mode to a non-integral frequency.
class TransformRejected : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Integer lattice helpers.

struct IntVecHash {
  std::size_t operator()(const IntVec& v) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto c : v) {
      h ^= std::hash<std::int64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

bool is_zero(const IntVec& k);
IntVec negate(IntVec k);
IntVec add(const IntVec& a, const IntVec& b);
std::int64_t dot(const IntVec& a, const IntVec& b);
double dot(const IntVec& k, const RealVec& x);
double norm2(const IntVec& k);  // |k|^2

/// gcd of the absolute values of the components; 0 for the zero vector.
std::int64_t content(const IntVec& k);

/// k divided by its content, with the sign chosen so that the result is in
/// canonical orientation.
IntVec primitive_direction(const IntVec& k);

/// True iff a and b are nonzero and linearly dependent (every 2x2 minor
/// vanishes). Opposite vectors count as parallel.
bool parallel(const IntVec& a, const IntVec& b);

/// True iff the highest-index nonzero component is positive.
bool is_canonical(const IntVec& k);

std::string to_string(const IntVec& k);

// ---------------------------------------------------------------------------

struct FourierMode {
  IntVec k;
  Complex amplitude;
};

/// Amplitude/phase view of one real summand: r cos(2 pi k.x + omega).
struct RealModeForm {
  IntVec k;
  double r = 0.0;
  double omega = 0.0;  // in [0, 2 pi)
};

RealModeForm to_real_form(const FourierMode& m);
FourierMode from_real_form(const RealModeForm& f);

/// x -> orientation * x / c + x0.
struct Transform {
  Rational c{1};
  RealVec x0;
  int orientation = 1;

  /// The transform T' with transform(transform(V, T), T') == V.
  [[nodiscard]] Transform inverse() const;
};

/// Periodic potential mean + sum_j (lambda_j e^{i 2 pi k_j.x} + c.c.).
///
/// Construction drops zero amplitudes, flips every mode into canonical
/// orientation (k -> -k, lambda -> conj lambda), and rejects zero or
/// pairwise-parallel mode vectors. Mode order is otherwise preserved so
/// callers can refer to modes by index.
class TrigPotential {
 public:
  TrigPotential() = default;
  TrigPotential(std::size_t dim, double mean, std::vector<FourierMode> modes = {});

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] const std::vector<FourierMode>& modes() const noexcept { return modes_; }
  [[nodiscard]] std::size_t mode_count() const noexcept { return modes_.size(); }

  [[nodiscard]] double eval(const RealVec& x) const;
  /// Gradient and Hessian (row-major n x n) at x.
  void derivatives(const RealVec& x, RealVec& grad, RealVec& hess) const;

  /// sup |k_i| over all modes and coordinates; 0 for a constant potential.
  [[nodiscard]] std::int64_t max_frequency() const;

  /// Sum of |r_j| plus the mean is an upper bound for the potential.
  [[nodiscard]] double amplitude_sum() const;

 private:
  std::size_t dim_ = 1;
  double mean_ = 0.0;
  std::vector<FourierMode> modes_;
};

/// Canonical representative: modes oriented as in the constructor and, for
/// dim 2, sorted counter-clockwise by angle in [0, pi).
TrigPotential canonicalize(const TrigPotential& v);

/// W(x) = V(orientation * x / c + x0).
TrigPotential transform(const TrigPotential& v, const Transform& t);

/// Grid maximum over the torus (resolution points per dimension, raised to
/// resolve the highest frequency) refined by damped Newton ascent.
double max_on_torus(const TrigPotential& v, int resolution = 64);

/// Maximizer of the same search.
RealVec argmax_on_torus(const TrigPotential& v, int resolution = 64);

/// Same modes in the same order, amplitudes within tol (absolute), means
/// within tol.
bool approx_equal(const TrigPotential& a, const TrigPotential& b, double tol);

}  // namespace effham
