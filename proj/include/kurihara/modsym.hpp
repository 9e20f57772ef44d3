#pragma once

// Weight-2 modular symbols for Gamma_0(N), plus quotient only.
//
// Conventions: the Manin symbol (c:d) is g{0, oo} = {b/d, a/c} for any
// g = [a b; c d] in SL_2(Z) with that bottom row mod N. Right actions:
// (c:d)S = (d:-c), (c:d)T = (d:-c-d), star (c:d)* = (-c:d).

#include "kurihara/curve.hpp"
#include "kurihara/exactmath.hpp"
#include "kurihara/linalg.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kurihara {

class P1List {
 public:
  explicit P1List(u64 n);

  u64 level() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  const std::pair<u64, u64>& element(std::size_t i) const { return elements_[i]; }

  /// Canonical representative of (c:d); throws InvalidArgument unless gcd(c, d, N) = 1.
  std::pair<u64, u64> normalize(i64 c, i64 d) const;
  std::size_t index(i64 c, i64 d) const;

 private:
  u64 n_;
  std::vector<std::pair<u64, u64>> elements_;
  std::vector<std::uint32_t> dense_;  // c * N + d -> index, for small N
  std::map<std::pair<u64, u64>, std::size_t> sparse_;
};

/// Inequivalent cusps of Gamma_0(N) with a ~ -a identified.
class CuspClasses {
 public:
  explicit CuspClasses(u64 n) : n_(n) {}
  /// Class index of the cusp u/v (coprime; v = 0 means oo).
  std::size_t class_of(i64 u, i64 v);
  std::size_t count() const { return reps_.size(); }

 private:
  bool equivalent(i64 u1, i64 v1, i64 u2, i64 v2) const;
  u64 n_;
  std::vector<std::pair<i64, i64>> reps_;
  std::map<std::pair<u64, u64>, std::size_t> memo_;
};

/// Lift of a P1 element to a matrix in SL_2(Z); returns (a, b, c, d).
std::array<i64, 4> lift_to_sl2(u64 n, u64 c, u64 d);

/// Merel's family {[a b; c d] : ad - bc = q, a > b >= 0, d > c >= 0}.
const std::vector<std::array<i64, 4>>& heilbronn_matrices(u64 q);

class ManinSpace {
 public:
  using SparseVec = std::vector<std::pair<std::size_t, Rational>>;

  /// Only sign = +1 is supported.
  explicit ManinSpace(u64 level, int sign = 1);

  u64 level() const { return p1_->level(); }
  const std::shared_ptr<const P1List>& p1() const { return p1_; }
  /// Dimension of the plus quotient (cuspidal and Eisenstein).
  std::size_t dimension() const { return free_rep_.size(); }
  /// Quotient coordinates of the Manin symbol with the given P1 index.
  const SparseVec& coords(std::size_t i) const { return coords_[i]; }
  std::vector<Rational> dense_coords(std::size_t i) const;
  /// P1 index of a generator whose image is the f-th basis vector.
  std::size_t free_rep(std::size_t f) const { return free_rep_[f]; }

  std::size_t cusp_count() const { return boundary_.rows(); }
  const RationalMatrix& boundary() const { return boundary_; }
  /// Basis of the kernel of the boundary map, as column vectors in quotient coordinates.
  const std::vector<std::vector<Rational>>& cuspidal_basis() const { return cuspidal_; }
  std::size_t cuspidal_dimension() const { return cuspidal_.size(); }

  /// T_q on the whole plus quotient (column convention: column f is T_q e_f).
  RationalMatrix hecke_matrix(u64 q) const;

 private:
  std::shared_ptr<const P1List> p1_;
  std::vector<SparseVec> coords_;
  std::vector<std::size_t> free_rep_;
  RationalMatrix boundary_;
  std::vector<std::vector<Rational>> cuspidal_;
};

/// T_q restricted to the cuspidal plus subspace (in the cuspidal basis).
RationalMatrix hecke_operator(const ManinSpace& space, u64 q);

enum class CalibrationStatus { Uncalibrated, Calibrated };

/// The rational plus modular symbol of an elliptic curve, stored as its
/// integral values (content 1) on every Manin symbol.
class EigenSymbol {
 public:
  EigenSymbol(std::shared_ptr<const P1List> p1, std::vector<i64> values,
              std::vector<std::pair<u64, i64>> hecke_pairs, std::size_t basis_dim);

  u64 level() const { return p1_->level(); }
  const P1List& p1() const { return *p1_; }
  const std::vector<i64>& values() const { return values_; }
  const std::vector<std::pair<u64, i64>>& hecke_pairs() const { return hecke_pairs_; }
  std::size_t basis_dim() const { return basis_dim_; }

  /// Raw value on the path {oo, a/d}; a/d need not be reduced mod d and d may be 0 (gives 0).
  i64 path_value(i64 a, i64 d) const;
  /// Raw value of {alpha, beta} for cusps given as (num, den).
  i64 segment_value(std::pair<i64, i64> alpha, std::pair<i64, i64> beta) const;

  /// [a/d]^+ times the calibration unit when calibrated, raw otherwise.
  Rational eval_plus(i64 a, i64 d) const;
  i64 eval_raw(i64 a, i64 d) const;
  /// Mutation hook for negative tests: eval_raw(a, d) changes sign at a = +-1 mod d (d > 2).
  void set_sign_flip(bool on) { sign_flip_ = on; }

  CalibrationStatus calibration_status() const { return unit_ ? CalibrationStatus::Calibrated : CalibrationStatus::Uncalibrated; }
  const std::optional<Rational>& calibration_unit() const { return unit_; }
  void set_calibration(std::optional<Rational> unit) { unit_ = std::move(unit); }

  /// Eigenvalue of the Fricke involution on the symbol; the root number is its negative.
  int fricke_eigenvalue() const;

  std::string to_json() const;
  static EigenSymbol from_json(const std::string& text);

  /// Dimensions of the successive kernel intersections during extraction.
  std::vector<std::size_t> dimension_history;
  /// Homology eigenvector in quotient coordinates (empty when loaded from JSON).
  std::vector<Rational> homology_vector;

 private:
  std::shared_ptr<const P1List> p1_;
  std::vector<i64> values_;
  bool sign_flip_ = false;
  std::vector<std::pair<u64, i64>> hecke_pairs_;
  std::size_t basis_dim_;
  std::optional<Rational> unit_;
};

struct ExtractionOptions {
  u64 max_q = 100;
  int held_out = 3;
};

/// Intersects the a_q-eigenspaces of the transposed Hecke operators until one
/// line remains, then checks `held_out` further good primes.
EigenSymbol extract_eigensymbol(const ManinSpace& space, const CurveData& e,
                                const ExtractionOptions& opts = {});

// --- numerical calibration ------------------------------------------------------

/// L(E, 1) from the rapidly converging series (root number +1 assumed).
long double l_value_at_one(const CurveData& e);
/// Largest real root of 4x^3 + b2 x^2 + 2 b4 x + b6.
long double largest_real_root(const CurveData& e);
/// Integral of |dx / (2y + a1 x + a3)| over the identity component of E(R).
long double real_period_component(const CurveData& e);
/// Real Neron period: components of E(R) times the identity-component period.
long double real_period(const CurveData& e);
/// Best rational with denominator <= max_den within tol of x, if any.
std::optional<Rational> reconstruct_rational(long double x, long double tol = 1e-8L, u64 max_den = 10000);

struct CalibrationReport {
  long double l_value = 0;
  long double omega = 0;
  std::optional<Rational> ratio;  // L(E,1)/Omega reconstructed
  i64 raw = 0;                    // eval_raw(0, 1)
  std::optional<Rational> unit;
};

/// Fixes the unit u with u * raw[0] = L(E,1)/Omega when L(E,1) != 0.
/// Throws CalibrationFailure if the two sides disagree on vanishing or the
/// ratio is not recognisable as a rational.
CalibrationReport calibrate(EigenSymbol& symbol, const CurveData& e);

}  // namespace kurihara
