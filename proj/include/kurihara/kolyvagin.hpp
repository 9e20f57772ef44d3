#pragma once

// Kolyvagin primes, discrete logarithms and Kurihara numbers.

#include "kurihara/curve.hpp"
#include "kurihara/exactmath.hpp"
#include "kurihara/modsym.hpp"

#include <map>
#include <memory>
#include <unordered_map>

namespace kurihara {

/// Discrete logarithm to a fixed base in a cyclic subgroup of (Z/ell)^*.
/// Full table when the subgroup order is at most 2^16, baby-step giant-step above.
class DiscreteLog {
 public:
  /// `order` is the multiplicative order of `base` (ell - 1 for a primitive root).
  DiscreteLog(u64 ell, u64 base, u64 order);

  u64 ell() const { return ell_; }
  u64 base() const { return base_; }
  u64 order() const { return order_; }
  /// k in [0, order) with base^k = a mod ell. Throws NotAUnit if ell | a and
  /// InvalidArgument if a is outside the subgroup.
  u64 operator()(i64 a) const;

 private:
  u64 ell_, base_, order_;
  std::vector<std::uint32_t> table_;  // residue -> log, order_ when absent
  std::unordered_map<u64, u64> baby_;
  u64 giant_step_ = 0;  // base^{-m}
  u64 m_ = 0;
};

static constexpr u64 kDlogTableLimit = u64(1) << 16;

struct KolyvaginPrime {
  u64 ell = 0;
  u64 generator = 0;  // h_ell, a primitive root mod ell
  u64 p = 0;
  int p_valuation = 0;  // v_p(ell - 1)
  u64 points = 0;       // #E(F_ell)
  std::shared_ptr<const DiscreteLog> log;

  /// log_{h_ell}(a) in Z/(ell - 1).
  u64 dlog(i64 a) const { return (*log)(a); }
  /// #Gal(Q(ell)/Q) = p^{v_p(ell - 1)}.
  u64 p_part() const { return ipow(p, p_valuation); }
  /// The same prime with h_ell replaced by another primitive root.
  KolyvaginPrime with_generator(u64 h) const;
};

/// Builds the record for ell (no membership check); generator 0 picks the smallest primitive root.
KolyvaginPrime make_kolyvagin_prime(const CurveData& e, u64 ell, u64 p, u64 generator = 0);

/// ell not dividing N p, ell = 1 mod p^max(m, n+1), and E(F_ell)[p^m] cyclic of order p^m.
bool is_kolyvagin_prime(const CurveData& e, u64 ell, u64 p, int m = 1, int n = 0);

/// All Kolyvagin primes up to bound. Throws HypothesisViolation unless check_hypotheses passes.
/// workers = 0 uses the hardware concurrency.
std::vector<KolyvaginPrime> sieve(const CurveData& e, u64 p, int m, int n, u64 bound, unsigned workers = 0);

enum class Route { Direct, ViaEd, DerivativeOracle };
std::string_view to_string(Route r);

struct KuriharaNumber {
  u64 d = 1;
  std::vector<u64> factors;
  Zpm value;
  Route route = Route::Direct;
};

struct DerivativeResult {
  Zpm coefficient;        // coefficient of N_d in D_d theta~_d
  bool norm_multiple;     // D_d theta~_d is a scalar multiple of N_d
  bool leading_identity;  // norm_multiple and coefficient == (-1)^nu(d) sum a_sigma prod log_g(sigma)
};

/// Kurihara numbers of one eigensymbol at (p, m). Calibrated symbols contribute
/// their unit; uncalibrated ones use raw values.
class Kurihara {
 public:
  Kurihara(const EigenSymbol& symbol, u64 p, int m, const std::vector<KolyvaginPrime>& primes);

  u64 p() const { return p_; }
  int m() const { return m_; }
  const std::map<u64, KolyvaginPrime>& primes() const { return primes_; }
  /// Replace h_ell for the given primes (the others keep theirs).
  Kurihara with_generators(const std::map<u64, u64>& generators) const;

  /// Factorisation of d into known Kolyvagin primes; throws NotSquarefree / PrimeNotKolyvagin.
  std::vector<u64> factors_of(u64 d) const;
  /// e_d = #Gal(Q(mu_d)/Q(d)).
  u64 e_d(u64 d) const;

  KuriharaNumber direct(u64 d) const;
  KuriharaNumber via_ed(u64 d) const;
  DerivativeResult derivative_oracle(u64 d) const;

 private:
  Zpm theta_coefficient(i64 a, u64 d) const;

  const EigenSymbol* symbol_;
  u64 p_;
  int m_;
  u64 pm_;
  Zpm unit_;
  std::map<u64, KolyvaginPrime> primes_;
};

std::string row_json(const KuriharaNumber& k, bool routes_agree, const std::map<u64, KolyvaginPrime>& primes);

}  // namespace kurihara
