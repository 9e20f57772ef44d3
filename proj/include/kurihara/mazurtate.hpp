#pragma once

// Mazur-Tate elements over Q(mu_M), their ordinary stabilisation and
// Kurihara's combinations xi, xi~.

#include "kurihara/curve.hpp"
#include "kurihara/exactmath.hpp"
#include "kurihara/modsym.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace kurihara {

/// (Z/M)^* as a product of cyclic groups, with residue <-> index tables.
/// Factors are ordered by prime; the 2-part contributes <-1> x <5> when 8 | M.
class UnitGroup {
 public:
  explicit UnitGroup(u64 modulus);

  u64 modulus() const { return modulus_; }
  const AbelianGroup& group() const { return group_; }
  std::size_t size() const { return group_.size(); }
  /// Index of sigma_a; throws NotCoprime unless gcd(a, M) = 1.
  std::size_t index_of(i64 a) const;
  u64 residue(std::size_t index) const { return residues_[index]; }

 private:
  u64 modulus_;
  AbelianGroup group_;
  std::vector<u64> residues_;            // index -> residue
  std::vector<std::uint32_t> index_of_;  // residue -> index
};

std::shared_ptr<const UnitGroup> unit_group(u64 modulus);

/// Restriction Gal(Q(mu_M)/Q) -> Gal(Q(mu_M')/Q) for M' | M.
std::shared_ptr<const Surjection> restriction(u64 from, u64 to);

/// theta~ over Q(mu_M) reduced into Z/p^m: eval_plus(a, M) at sigma_a.
/// Throws DenominatorDivisibleByP naming the level.
ResidueGroupRing theta_mod(const EigenSymbol& symbol, u64 modulus, u64 p, int m);

/// Unit root of x^2 - a_p x + p in Z/p^m, Hensel-lifted from a_p mod p.
struct UnitRoot {
  u64 p;
  int m;
  Zpm alpha;
  Zpm beta;  // the other root, p / alpha
};
UnitRoot unit_root(const CurveData& e, u64 p, int m);

/// Everything is relative to a curve, its eigensymbol and a coefficient ring Z/p^m.
class MazurTate {
 public:
  MazurTate(const CurveData& e, const EigenSymbol& symbol, u64 p, int m);

  const CurveData& curve() const { return e_; }
  const EigenSymbol& symbol() const { return symbol_; }
  u64 p() const { return p_; }
  int m() const { return m_; }
  const UnitRoot& root() const { return root_; }
  Zpm zero() const { return Zpm::zero(p_, m_); }
  Zpm one() const { return Zpm::one(p_, m_); }

  /// theta~ over Q(mu_M): coefficient eval_plus(a, M) at sigma_a.
  RationalGroupRing theta_rational(u64 modulus) const;
  RationalGroupRing theta(u64 d, int n) const { return theta_rational(d * ipow(p_, n)); }
  /// Reduction mod p^m; throws DenominatorDivisibleByP naming the level.
  ResidueGroupRing theta_mod(u64 modulus) const { return kurihara::theta_mod(symbol_, modulus, p_, m_); }

  /// vartheta at level d p^n. For n = 0 this is
  /// (1 - alpha^-1 sigma_p)(1 - alpha^-1 sigma_p^-1) theta~_d.
  ResidueGroupRing vartheta(u64 d, int n) const;
  /// The twisting factor (1 - alpha^-1 sigma_p)(1 - alpha^-1 sigma_p^-1) at level d.
  ResidueGroupRing bottom_factor(u64 d) const;

  ResidueGroupRing xi(u64 d, int n) const;
  ResidueGroupRing xi_tilde(u64 d, int n) const;
  /// Number of divisor terms assembled by the last xi() call.
  std::size_t last_xi_terms() const { return last_terms_; }

  /// sigma_ell in Gal(Q(mu_{d p^n})/Q). When ell | d it is the element acting as
  /// Frobenius away from ell and trivially on mu_ell.
  std::size_t sigma(u64 ell, u64 d, int n) const;

  /// pi_{from, to} and nu_{from, to} on Z/p^m group rings.
  ResidueGroupRing project(const ResidueGroupRing& x, u64 from, u64 to) const;
  ResidueGroupRing lift(const ResidueGroupRing& x, u64 from, u64 to) const;

  /// c2 t^2 + c1 t + c0 evaluated at a group element, in Z/p^m[G].
  ResidueGroupRing polynomial_at(const std::array<Zpm, 3>& coeffs_leading_first, u64 modulus,
                                 std::size_t g) const;

 private:
  void check_level(u64 d) const;

  const CurveData& e_;
  const EigenSymbol& symbol_;
  u64 p_;
  int m_;
  UnitRoot root_;
  mutable std::size_t last_terms_ = 0;
};

}  // namespace kurihara
