#pragma once

// Word-size integer helpers shared by every module.

#include <cstdint>
#include <utility>
#include <vector>

namespace kurihara {

using i64 = std::int64_t;
using u64 = std::uint64_t;

inline i64 floor_mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m);

i64 gcd(i64 a, i64 b);

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
struct Xgcd {
  i64 g, x, y;
};
Xgcd xgcd(i64 a, i64 b);

/// Inverse of a modulo m; throws Error(NotInvertible) when gcd(a, m) != 1.
i64 invmod(i64 a, i64 m);

bool is_prime(u64 n);

/// Distinct prime factors with multiplicity, ascending.
std::vector<std::pair<u64, int>> factor(u64 n);

bool is_squarefree(u64 n);

/// Primes <= bound, ascending.
std::vector<u64> primes_up_to(u64 bound);

int valuation(u64 n, u64 p);

u64 ipow(u64 base, int exp);

/// Smallest primitive root modulo the prime ell.
u64 primitive_root(u64 ell);

/// Legendre symbol (a/p) for odd prime p, in {-1, 0, 1}.
int legendre(i64 a, u64 p);

}  // namespace kurihara
