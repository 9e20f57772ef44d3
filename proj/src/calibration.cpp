#include "kurihara/modsym.hpp"

#include <cmath>

namespace kurihara {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

long double cubic(const CurveData& e, long double x) {
  return ((4 * x + e.b2()) * x + 2 * e.b4()) * x + e.b6();
}

}  // namespace

long double l_value_at_one(const CurveData& e) {
  const long double sqrt_n = std::sqrt(static_cast<long double>(e.conductor()));
  // exp(-2 pi n / sqrt N) < 1e-30 beyond this point.
  const u64 limit = static_cast<u64>(std::ceil(11.1L * sqrt_n)) + 10;
  std::vector<long double> an(limit + 1, 0);
  std::vector<u64> spf(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i)
    if (spf[i] == 0)
      for (u64 j = i; j <= limit; j += i)
        if (spf[j] == 0) spf[j] = i;
  an[1] = 1;
  for (u64 m = 2; m <= limit; ++m) {
    const u64 p = spf[m];
    u64 pk = 1, rest = m;
    while (rest % p == 0) {
      rest /= p;
      pk *= p;
    }
    if (rest != 1) {
      an[m] = an[pk] * an[rest];
      continue;
    }
    const long double ap = static_cast<long double>(e.ap(p));
    if (pk == p) {
      an[m] = ap;
    } else if (e.is_good(p)) {
      an[m] = ap * an[pk / p] - static_cast<long double>(p) * an[pk / p / p];
    } else {
      an[m] = ap * an[pk / p];
    }
  }
  long double sum = 0;
  for (u64 m = 1; m <= limit; ++m) sum += an[m] / m * std::exp(-2 * kPi * m / sqrt_n);
  return 2 * sum;
}

long double largest_real_root(const CurveData& e) {
  const long double b2 = e.b2(), b4 = e.b4(), b6 = e.b6();
  const long double bound = 1 + std::max({std::fabs(b2) / 4, std::fabs(b4) / 2, std::fabs(b6) / 4});
  auto bisect = [&](long double lo, long double hi) {
    for (int i = 0; i < 400; ++i) {
      const long double mid = (lo + hi) / 2;
      if (cubic(e, mid) > 0) hi = mid;
      else lo = mid;
    }
    return (lo + hi) / 2;
  };
  // Critical points of F: 12x^2 + 2 b2 x + 2 b4.
  const long double disc = 4 * b2 * b2 - 96 * b4;
  if (disc <= 0) return bisect(-bound, bound);
  const long double r1 = (-2 * b2 - std::sqrt(disc)) / 24, r2 = (-2 * b2 + std::sqrt(disc)) / 24;
  if (cubic(e, r2) < 0) return bisect(r2, bound);
  return bisect(-bound, r1);
}

long double real_period_component(const CurveData& e) {
  const long double e1 = largest_real_root(e);
  const long double b2 = e.b2(), b4 = e.b4();
  // x = e1 + tan(theta)^2; F(x) = t^2 Q(t^2) with Q(s) = F(e1 + s)/s.
  const long double q1 = 12 * e1 + b2, q0 = 12 * e1 * e1 + 2 * b2 * e1 + 2 * b4;
  auto h = [&](long double th) -> long double {
    if (th >= kPi / 2) return 2;
    const long double t = std::tan(th), s = t * t, c = std::cos(th);
    return 4 / (c * c * std::sqrt((4 * s + q1) * s + q0));
  };
  const int steps = 200000;
  const long double width = kPi / 2 / steps;
  long double sum = h(0) + h(kPi / 2);
  for (int i = 1; i < steps; ++i) sum += (i % 2 ? 4 : 2) * h(i * width);
  return sum * width / 3;
}

long double real_period(const CurveData& e) {
  const int components = sgn(e.discriminant()) > 0 ? 2 : 1;
  return components * real_period_component(e);
}

std::optional<Rational> reconstruct_rational(long double x, long double tol, u64 max_den) {
  if (std::fabs(x) < tol) return Rational(0);
  // Continued-fraction convergents h/k.
  long double y = x;
  i64 h_prev = 1, h = static_cast<i64>(std::floor(y)), k_prev = 0, k = 1;
  for (int iter = 0; iter < 64; ++iter) {
    if (std::fabs(x - static_cast<long double>(h) / k) < tol) {
      Rational r(static_cast<long>(h), static_cast<long>(k));
      r.canonicalize();
      return r;
    }
    const long double frac = y - std::floor(y);
    if (frac < 1e-30L) break;
    y = 1 / frac;
    const i64 a = static_cast<i64>(std::floor(y));
    const i64 h_next = a * h + h_prev, k_next = a * k + k_prev;
    if (static_cast<u64>(k_next) > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

CalibrationReport calibrate(EigenSymbol& symbol, const CurveData& e) {
  CalibrationReport r;
  r.raw = symbol.eval_raw(0, 1);
  r.omega = real_period(e);
  const int w = -symbol.fricke_eigenvalue();
  r.l_value = w == 1 ? l_value_at_one(e) : 0.0L;
  const bool l_zero = std::fabs(r.l_value) < 1e-10L;
  if (l_zero != (r.raw == 0)) {
    throw Error(ErrorKind::CalibrationFailure, "L(E,1) = " + std::to_string(static_cast<double>(r.l_value)) +
                                                   " but the symbol at 0 is " + std::to_string(r.raw));
  }
  if (l_zero) {
    r.ratio = Rational(0);
    symbol.set_calibration(std::nullopt);
    return r;
  }
  r.ratio = reconstruct_rational(r.l_value / r.omega);
  if (!r.ratio) {
    throw Error(ErrorKind::CalibrationFailure,
                "L(E,1)/Omega = " + std::to_string(static_cast<double>(r.l_value / r.omega)) + " is not a small rational");
  }
  r.unit = *r.ratio / Rational(static_cast<long>(r.raw));
  symbol.set_calibration(r.unit);
  return r;
}

}  // namespace kurihara
