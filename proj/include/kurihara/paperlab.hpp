#pragma once

// Exhaustive finite checks: the F_3 coset-covering lemma and the group-ring
// identity suite over a (d, ell, n, m) grid.

#include "kurihara/kolyvagin.hpp"
#include "kurihara/mazurtate.hpp"

#include <array>
#include <optional>

namespace kurihara {

// --- coset covering over F_3 -----------------------------------------------------

/// G = F_3^k, four nonzero functionals phi_i and shifts g_i. The coset g ker(phi)
/// is {x : phi(x) = phi(g)}.
struct CosetInstance {
  int k = 0;
  std::array<std::vector<int>, 4> phi;
  std::array<std::vector<int>, 4> g;

  int span_dimension() const;
  /// True iff the four cosets cover G.
  bool covers() const;
  std::string to_json() const;
};

/// Number of elements of g ker(phi) in F_3^k.
u64 coset_size(int k, const std::vector<int>& phi, const std::vector<int>& g);

struct CosetVerdict {
  int max_dim = 0;
  bool reduced = true;
  u64 tuples = 0;     // functional tuples examined
  u64 instances = 0;  // (tuple, shift) pairs examined
  u64 counterexamples = 0;
  std::optional<CosetInstance> first_counterexample;
  std::string to_json() const;
};

/// Every 4-tuple of nonzero functionals on F_3^k (3 <= k <= max_dim) with span
/// dimension >= 3 and every shift tuple; no instance may cover G.
/// Reduced: tuples up to GL_k(F_3) and reordering, i.e. phi_1..phi_r the first r
/// coordinate functionals. Unreduced: all tuples (only practical for k = 3).
/// Shifts enter only through c_i = phi_i(g_i), so the 81 values c in F_3^4 are enumerated.
CosetVerdict verify_coset_lemma(int max_dim, bool reduced = true, unsigned workers = 0);

struct ReductionAgreement {
  u64 instances = 0;
  u64 disagreements = 0;
};
/// For every tuple on F_3^k with span >= min_span and every shift, compares the covering
/// verdict against the verdict of its reduced representative.
ReductionAgreement check_reduction_agreement(int k, int min_span);

/// The span-2 configuration phi_3 = phi_1 + phi_2, phi_4 = phi_1 - phi_2 on F_3^2 with
/// a shift tuple whose cosets cover G; nullopt if none exists.
std::optional<CosetInstance> remark_witness();

// --- identity suite ----------------------------------------------------------------

struct SuiteOptions {
  u64 dl_bound = 200;     // d * ell bound for norm and Euler relations
  int n_max = 1;
  int m_max = 2;
  u64 bottom_d_max = 200;  // bottom-factor identity and unit checks
  u64 route_d_max = 500;   // Kurihara-number routes, over products of sieved primes
  u64 sieve_bound = 500;
  int covariance_trials = 50;
  u64 covariance_d_max = 200000;  // d drawn from products of at most two sieved primes
  u64 seed = 1;
  bool inject_sign_flip = false;  // mutation test of the path sign convention
  unsigned workers = 0;
};

struct IdentityResult {
  std::string name;
  u64 instances = 0;
  u64 failures = 0;
  std::string first_failure;
};

struct SuiteReport {
  std::string curve;
  u64 p = 0;
  std::vector<IdentityResult> results;
  std::vector<std::string> warnings;

  bool passed() const;
  const IdentityResult& result(std::string_view name) const;
  /// Throws IdentityFailure naming the first failing (identity, instance).
  void require_pass() const;
  std::string to_json() const;
};

/// Identity names: "xi_tilde_norm", "vartheta_euler", "bottom_identity", "bottom_unit",
/// "leading_term", "nonvanishing_equivalence", "ed_identity", "generator_covariance".
SuiteReport run_identity_suite(const CurveData& e, const EigenSymbol& symbol, u64 p, const SuiteOptions& opts = {});

}  // namespace kurihara
