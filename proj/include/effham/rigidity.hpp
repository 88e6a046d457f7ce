#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effham/potential.hpp"

namespace effham {

/// Multiset of nonzero integer vectors, closed under negation.
class VectorSet {
 public:
  /// Adds v and -v once each. Zero vectors are ignored.
  void insert_pair(const IntVec& v);

  [[nodiscard]] int multiplicity(const IntVec& v) const;
  [[nodiscard]] bool contains(const IntVec& v) const { return multiplicity(v) > 0; }
  [[nodiscard]] const std::map<IntVec, int>& counts() const noexcept { return counts_; }
  [[nodiscard]] std::size_t distinct() const noexcept { return counts_.size(); }
  [[nodiscard]] std::vector<IntVec> elements() const;

 private:
  std::map<IntVec, int> counts_;
};

/// {+-k_j} u {+-k_j +- k_l : j < l, k_j.k_l != 0}, counted with multiplicity.
VectorSet build_A_set(const TrigPotential& v);

/// Same construction with the single entries taken from `singles` and the
/// pair sums from `generators` (pair (i, j) kept iff singles_i.singles_j != 0).
VectorSet build_pair_set(const std::vector<IntVec>& singles,
                         const std::vector<IntVec>& generators);

/// Vectors alpha g_i + beta g_j (i != j, alpha, beta = +-1) that lie in A with
/// multiplicity exactly one. Sorted, negation-closed.
std::vector<IntVec> sole_vectors(const VectorSet& a, const std::vector<IntVec>& generators);
std::vector<IntVec> sole_vectors(const VectorSet& a, const TrigPotential& v);

/// A < B: every nonzero vector of A is parallel to some vector of B.
bool prec(const std::vector<IntVec>& a, const std::vector<IntVec>& b);
bool prec(const VectorSet& a, const VectorSet& b);

/// Double precedence condition for S1 = pair set of (u1,u2,u3) and S2 = pair
/// set with pair sums of (u1, a2 u2, a3 u3). True iff
/// sole(S1) < S2 and sole(S2) < S1.
bool lemma_geometry_check(const IntVec& u1, const IntVec& u2, const IntVec& u3,
                          const Rational& alpha2, const Rational& alpha3);

/// l / pi for l = min{|m pi + m1 a1 pi + m2 a2 pi| > 0}: with a_i = n_i / d in
/// lowest common denominator, returns gcd(d, n1, n2) / d.
Rational lattice_halfperiod(const Rational& alpha1, const Rational& alpha2);

struct MFunctionParams {
  double r1 = 1.0, r2 = 1.0, r3 = 1.0;
  Rational alpha1{1}, alpha2{1};

  /// l / pi
  [[nodiscard]] Rational half_period() const { return lattice_halfperiod(alpha1, alpha2); }
};

/// M(t) = max over angles of r1 cos th1 + r2 cos th2 + r3 cos(a1 th1 + a2 th2 + t).
double m_function(const MFunctionParams& params, double t);

struct PhaseMatch {
  long k = 0;
  int orientation = 1;
};

/// (k, +1) if omega = omega_t + 2 k l, else (k, -1) if omega = 2 k l - omega_t,
/// each within tol. Phases are first reduced to [0, 2 pi).
std::optional<PhaseMatch> phase_equivalent(double omega, double omega_t,
                                           const Rational& l_over_pi, double tol = 1e-9);

/// x0 with 2 pi k_j.x0 = d_omega_j (mod 2 pi) for every j, within tol, or
/// nothing if the congruences are inconsistent.
std::optional<RealVec> solve_translation(const std::vector<IntVec>& modes,
                                         const std::vector<double>& d_omega, double tol = 1e-9);

enum class VerdictTag { TransformEquivalent, EffectivelyEqual, NotEquivalent, OutOfScope };

enum class Witness {
  None,
  MeanMismatch,
  DirectionMismatch,
  AmplitudeMismatch,
  NoCommonScaling,
  PhaseConditionFailed,
};

/// Mode `first` of V1 is parallel to mode `second` of V2 with
/// k_2 = scaling * k_1 (scaling > 0, both canonical).
struct ModePairing {
  std::size_t first = 0;
  std::size_t second = 0;
  Rational scaling{1};
};

struct Verdict {
  VerdictTag tag = VerdictTag::OutOfScope;
  /// Set for TransformEquivalent: transform(V2, T) reproduces V1.
  std::optional<Transform> transform;
  std::vector<ModePairing> pairing;
  Witness witness = Witness::None;
  /// Which case of the classification applied, or why the decision stopped.
  std::string reason;

  [[nodiscard]] bool equivalent() const {
    return tag == VerdictTag::TransformEquivalent || tag == VerdictTag::EffectivelyEqual;
  }
};

std::string to_string(VerdictTag tag);
std::string to_string(Witness w);

/// Decides whether V1 and V2 (at most three modes each) have the same
/// effective Hamiltonian, and if so whether they are related by a rational
/// scaling, translation and reflection.
Verdict decide(const TrigPotential& v1, const TrigPotential& v2);

}  // namespace effham
