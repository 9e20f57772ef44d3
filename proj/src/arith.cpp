#include "kurihara/arith.hpp"

#include "kurihara/error.hpp"

#include <cmath>
#include <string>

namespace kurihara {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MismatchedGroup: return "MismatchedGroup";
    case ErrorKind::MismatchedRing: return "MismatchedRing";
    case ErrorKind::NotAQuotient: return "NotAQuotient";
    case ErrorKind::NotASurjection: return "NotASurjection";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::BadPrime: return "BadPrime";
    case ErrorKind::NonInvertibleEll: return "NonInvertibleEll";
    case ErrorKind::InvalidCurve: return "InvalidCurve";
    case ErrorKind::EigensymbolNotFound: return "EigensymbolNotFound";
    case ErrorKind::AmbiguousEigenspace: return "AmbiguousEigenspace";
    case ErrorKind::CalibrationFailure: return "CalibrationFailure";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::DenominatorDivisibleByP: return "DenominatorDivisibleByP";
    case ErrorKind::Supersingular: return "Supersingular";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::NotSquarefree: return "NotSquarefree";
    case ErrorKind::PrimeNotKolyvagin: return "PrimeNotKolyvagin";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::MissingRootNumber: return "MissingRootNumber";
    case ErrorKind::FrickeNotScalar: return "FrickeNotScalar";
    case ErrorKind::IdentityFailure: return "IdentityFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

i64 gcd(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Xgcd xgcd(i64 a, i64 b) {
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    i64 tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

i64 invmod(i64 a, i64 m) {
  auto [g, x, y] = xgcd(floor_mod(a, m), m);
  (void)y;
  if (g != 1) {
    throw Error(ErrorKind::NotInvertible,
                std::to_string(a) + " is not invertible modulo " + std::to_string(m));
  }
  return floor_mod(x, m);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  // Deterministic Miller-Rabin for 64-bit inputs.
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::pair<u64, int>> factor(u64 n) {
  std::vector<std::pair<u64, int>> out;
  for (u64 q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    int e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    out.emplace_back(q, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

bool is_squarefree(u64 n) {
  for (auto [q, e] : factor(n)) {
    if (e > 1) return false;
  }
  return n >= 1;
}

std::vector<u64> primes_up_to(u64 bound) {
  std::vector<u64> out;
  if (bound < 2) return out;
  std::vector<bool> composite(bound + 1, false);
  for (u64 i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

int valuation(u64 n, u64 p) {
  if (n == 0) return 1 << 20;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

u64 ipow(u64 base, int exp) {
  u64 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

u64 primitive_root(u64 ell) {
  if (ell == 2) return 1;
  auto fac = factor(ell - 1);
  for (u64 g = 2; g < ell; ++g) {
    bool ok = true;
    for (auto [q, e] : fac) {
      if (powmod(g, (ell - 1) / q, ell) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw Error(ErrorKind::InvalidArgument, "no primitive root modulo " + std::to_string(ell));
}

int legendre(i64 a, u64 p) {
  u64 r = powmod(static_cast<u64>(floor_mod(a, static_cast<i64>(p))), (p - 1) / 2, p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

}  // namespace kurihara
