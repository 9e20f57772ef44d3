#pragma once

// Elliptic curves over Q in long Weierstrass form, and everything the rest of
// the pipeline needs from reduction mod primes.

#include "kurihara/exactmath.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace kurihara {

class TraceCache;

class CurveData {
 public:
  /// Validates: nonzero discriminant, conductor primes divide the discriminant,
  /// and a supplied discriminant (if any) matches the recomputed one.
  CurveData(std::array<i64, 5> ainvs, u64 conductor, u64 tamagawa_product,
            std::string label = {}, std::optional<Integer> stated_discriminant = std::nullopt);

  /// JSON {"label", "ainvs", "conductor", "tamagawa_product", "mod_p_surjective",
  /// "optimal"?, "root_number"?, "discriminant"?}.
  static CurveData from_json(const std::string& text);
  static CurveData from_file(const std::string& path);

  const std::array<i64, 5>& ainvs() const { return a_; }
  i64 a1() const { return a_[0]; }
  i64 a2() const { return a_[1]; }
  i64 a3() const { return a_[2]; }
  i64 a4() const { return a_[3]; }
  i64 a6() const { return a_[4]; }
  i64 b2() const { return b2_; }
  i64 b4() const { return b4_; }
  i64 b6() const { return b6_; }
  i64 b8() const { return b8_; }
  const Integer& discriminant() const { return disc_; }
  u64 conductor() const { return conductor_; }
  u64 tamagawa_product() const { return tamagawa_; }
  const std::string& label() const { return label_; }
  bool is_good(u64 ell) const;

  const std::set<u64>& asserted_surjective() const { return surjective_; }
  bool optimal_asserted() const { return optimal_; }
  std::optional<int> root_number() const { return root_number_; }

  CurveData& assert_surjective(u64 p) {
    surjective_.insert(p);
    return *this;
  }
  CurveData& assert_optimal(bool v = true) {
    optimal_ = v;
    return *this;
  }
  CurveData& set_root_number(std::optional<int> w) {
    root_number_ = w;
    return *this;
  }

  /// a_ell for any prime: ell + 1 - #E(F_ell) at good primes, and
  /// ell - #(affine points of the reduction) at bad primes (model assumed minimal).
  /// Cached; safe for concurrent callers.
  i64 ap(u64 ell) const;

  /// Canonical JSON used for cache keys.
  std::string to_json() const;

 private:
  std::array<i64, 5> a_;
  i64 b2_, b4_, b6_, b8_;
  Integer disc_;
  u64 conductor_;
  u64 tamagawa_;
  std::string label_;
  std::set<u64> surjective_;
  bool optimal_ = false;
  std::optional<int> root_number_;
  std::shared_ptr<TraceCache> cache_;
};

/// Single-writer / multi-reader memo of a_ell values.
class TraceCache {
 public:
  std::optional<i64> find(u64 ell) const {
    std::shared_lock lock(mutex_);
    auto it = values_.find(ell);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  void store(u64 ell, i64 value) {
    std::unique_lock lock(mutex_);
    values_.emplace(ell, value);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<u64, i64> values_;
};

/// Affine point count of the reduction mod ell (any prime, including bad ones).
u64 affine_count(const CurveData& e, u64 ell);

/// #E(F_ell) including the point at infinity; throws BadPrime if ell | disc.
/// Character sums up to 10^6, baby-step giant-step above.
u64 count_points(const CurveData& e, u64 ell);

/// Baby-step giant-step order computation, exposed for cross-checking.
u64 count_points_bsgs(const CurveData& e, u64 ell, u64 seed = 1);

struct ApTable {
  std::map<u64, i64> good;
  std::set<u64> bad;
};
ApTable ap_table(const CurveData& e, u64 bound);

// --- points over F_ell -------------------------------------------------------

struct Point {
  u64 x = 0, y = 0;
  bool infinity = true;
  bool operator==(const Point&) const = default;
};

class ReducedCurve {
 public:
  ReducedCurve(const CurveData& e, u64 ell);

  u64 prime() const { return ell_; }
  bool contains(const Point& p) const;
  Point add(const Point& p, const Point& q) const;
  Point negate(const Point& p) const;
  Point multiply(const Point& p, u64 k) const;
  /// Uniform-ish random affine point (ell odd).
  Point random_point(std::mt19937_64& rng) const;
  /// 4x^3 + b2 x^2 + 2 b4 x + b6 evaluated mod ell.
  u64 rhs(u64 x) const;

 private:
  u64 ell_;
  u64 a1_, a2_, a3_, a4_, a6_, b2_, b4_, b6_;
};

/// Square root modulo an odd prime; nullopt for non-residues.
std::optional<u64> sqrt_mod(u64 a, u64 p);

// --- hypotheses ----------------------------------------------------------------

enum class SurjectivityVerdict { Asserted, HeuristicallyConfirmed, Unknown };
std::string to_string(SurjectivityVerdict v);

struct HypothesisReport {
  u64 p = 0;
  i64 ap = 0;
  u64 points_mod_p = 0;
  bool ordinary = false;           // (a)
  bool points_prime_to_p = false;  // (c1)
  bool tamagawa_prime_to_p = false;  // (c2)
  SurjectivityVerdict surjectivity = SurjectivityVerdict::Unknown;  // (b)
  bool heuristic_irreducible = false;
  bool heuristic_split_nonscalar = false;
  bool heuristic_full_determinant = false;

  bool passes() const {
    return ordinary && points_prime_to_p && tamagawa_prime_to_p &&
           surjectivity != SurjectivityVerdict::Unknown;
  }
  std::string to_json() const;
};

HypothesisReport check_hypotheses(const CurveData& e, u64 p);

/// Coefficients of P_ell(t) = t^2 - (a_ell / ell) t + 1 / ell, leading first:
/// {1, -a_ell / ell, 1 / ell}. Throws NonInvertibleEll when p | ell.
std::array<Zpm, 3> frobenius_poly(const CurveData& e, u64 ell, u64 p, int m);
std::array<Rational, 3> frobenius_poly(const CurveData& e, u64 ell);

// --- p-torsion of E(F_ell) ----------------------------------------------------

enum class TorsionShape { Trivial, Cyclic, FullRank2 };
std::string to_string(TorsionShape s);

struct TorsionStructure {
  TorsionShape shape = TorsionShape::Trivial;
  int valuation = 0;          // v_p(#E(F_ell))
  bool used_fallback = false;
};

/// Classifies the p-primary part of E(F_ell); randomized sampling seeded by
/// `seed`, with the division-polynomial test as fallback.
/// With `allow_fallback` false an undecided sample run reports Cyclic.
TorsionStructure p_torsion_structure(const CurveData& e, u64 ell, u64 p, u64 seed = 1,
                                     bool allow_fallback = true);

/// Deterministic test for E[p] being contained in E(F_ell).
bool full_p_torsion_rational(const CurveData& e, u64 ell, u64 p);

}  // namespace kurihara
