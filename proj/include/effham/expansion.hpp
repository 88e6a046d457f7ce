#pragma once

#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "effham/potential.hpp"

namespace effham {

using BigRational = boost::multiprecision::cpp_rational;

/// Some frequency reached by the expansion is (nearly) orthogonal to Q.
class ResonantDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sparse real-valued trigonometric series sum_k c_k e^{i 2 pi k.x}, with
/// both k and -k stored (c_{-k} = conj c_k).
struct FourierSeries {
  std::size_t dim = 1;
  std::unordered_map<IntVec, Complex, IntVecHash> coeffs;

  [[nodiscard]] Complex coeff(const IntVec& k) const;
  [[nodiscard]] double value(const RealVec& x) const;
  [[nodiscard]] RealVec gradient(const RealVec& x) const;
  /// max over stored k of |c_{-k} - conj c_k|
  [[nodiscard]] double hermitian_defect() const;
};

/// Large-momentum expansion eps * Hbar(Q / sqrt(eps)) = sum_l a_l eps^l.
struct ExpansionResult {
  RealVec Q;
  int order = 0;
  std::vector<double> a;                   // a_0 .. a_order
  std::vector<FourierSeries> correctors;   // v_1 .. v_order
  double min_denominator = 0.0;
  /// largest |Im| seen while forming a_l (zero up to rounding)
  double max_imaginary = 0.0;

  /// sum_l eps^l D v_l (x)
  [[nodiscard]] RealVec corrector_gradient(const RealVec& x, double eps) const;
};

inline constexpr double kDefaultResonanceThreshold = 1e-8;

/// min |k.Q| over nonzero k that are signed sums of at most L mode vectors
/// (repetitions allowed). +infinity for a constant potential.
double check_nonresonant(const TrigPotential& v, const RealVec& q, int order);

/// Exact variant for rational Q.
Rational check_nonresonant_exact(const TrigPotential& v, const std::vector<Rational>& q, int order);

/// Order-by-order corrector recursion
///   Q.Dv_l + 1/2 sum_{i+j=l} Dv_i.Dv_j + [l=1] V = a_l
/// carried out on sparse Fourier supports.
ExpansionResult corrector_recursion(const TrigPotential& v, const RealVec& q, int order,
                                    double eta = kDefaultResonanceThreshold);

/// a_0..a_order in exact rational arithmetic. The double amplitudes and the
/// mean are converted exactly, so the result is the exact expansion of the
/// potential as stored.
std::vector<BigRational> expansion_coefficients_exact(const TrigPotential& v,
                                                      const std::vector<Rational>& q, int order);

/// sum_j |lambda_j|^2 |k_j|^2 / |k_j.Q|^2
double a2_closed_form(const TrigPotential& v, const RealVec& q);

/// Coefficient of the isolated double pole 1/|w.Q|^2 of a_4 contributed by
/// the pair vector w = alpha k_{j1} + beta k_{j2}:
///   C |lambda_{j1}|^2 |lambda_{j2}|^2 |k_{j1}.k_{j2}|^2 |w|^2
///     / (|k_{j1}.Q|^2 |k_{j2}.Q|^2 |w.Q|^2)
/// with C = kSoleTermConstant.
double sole_term(const TrigPotential& v, std::size_t j1, std::size_t j2, int alpha, int beta,
                 const RealVec& q);

/// Prefactor of sole_term. Fixed by matching the double-pole residue of the
/// recursion's a_4 (see tests/expansion_test.cpp, "pole residue").
inline constexpr double kSoleTermConstant = 1.0;

/// lim (w.Q)^2 a_4(Q) along the given path (w.Q -> 0), by polynomial
/// (Neville) extrapolation in s = w.Q. Requires at least three path points.
double a4_pole_residue(const TrigPotential& v, const IntVec& w, const std::vector<RealVec>& path);

/// Same, with the path Q(s) = base + s w/|w|^2 generated from a base point
/// on the hyperplane w.Q = 0.
double a4_pole_residue(const TrigPotential& v, const IntVec& w, const RealVec& base);

/// sup over the sample points of |1/2|Q + D phi|^2 + eps V - sum_l eps^l a_l|
/// with phi = sum_{l<=L} eps^l v_l.
double cell_residual(const TrigPotential& v, const ExpansionResult& r, double eps,
                     const std::vector<RealVec>& points);

}  // namespace effham
