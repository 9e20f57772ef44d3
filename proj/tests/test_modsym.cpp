#include "doctest.h"

#include "kurihara/modsym.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace kurihara;

namespace {

CurveData curve_11a1() { return CurveData({0, -1, 1, -10, -20}, 11, 5, "11a1").assert_optimal(); }
CurveData curve_37a1() { return CurveData({0, 0, 1, -1, 0}, 37, 1, "37a1").assert_optimal(); }

u64 euler_phi(u64 n) {
  u64 r = n;
  for (auto [q, e] : factor(n)) {
    (void)e;
    r = r / q * (q - 1);
  }
  return r;
}

// Genus of X_0(N) from the classical index / elliptic point / cusp formula.
i64 genus_x0(u64 n) {
  long double mu = n;
  i64 nu2 = 1, nu3 = 1;
  for (auto [q, e] : factor(n)) {
    mu *= 1.0L + 1.0L / q;
    nu2 *= (q == 2) ? (e >= 2 ? 0 : 1) : (1 + legendre(-1, q));
    nu3 *= (q == 3) ? (e >= 2 ? 0 : 1) : (q == 2 ? 0 : 1 + legendre(-3, q));  // (-3|2) = -1
  }
  i64 cusps = 0;
  for (u64 d = 1; d <= n; ++d)
    if (n % d == 0) cusps += static_cast<i64>(euler_phi(std::gcd(d, n / d)));
  const long double g = 1 + mu / 12 - nu2 / 4.0L - nu3 / 3.0L - cusps / 2.0L;
  return std::llround(static_cast<double>(g));
}

// P1 orbits by brute force over all unit scalings.
std::size_t p1_orbits(u64 n) {
  std::set<std::set<std::pair<u64, u64>>> orbits;
  for (u64 c = 0; c < n; ++c)
    for (u64 d = 0; d < n; ++d) {
      if (std::gcd(std::gcd(c, d), n) != 1) continue;
      std::set<std::pair<u64, u64>> orbit;
      for (u64 s = 1; s < n; ++s)
        if (std::gcd(s, n) == 1) orbit.insert({c * s % n, d * s % n});
      orbits.insert(orbit);
    }
  return orbits.size();
}

long double agm(long double a, long double b) {
  for (int i = 0; i < 100; ++i) {
    const long double m = (a + b) / 2, g = std::sqrt(a * b);
    a = m;
    b = g;
  }
  return a;
}

}  // namespace

TEST_CASE("P1(Z/N) enumeration") {
  CHECK(P1List(1).size() == 1);
  CHECK(P1List(11).size() == 12);
  CHECK(P1List(12).size() == 24);
  CHECK(P1List(12).size() == p1_orbits(12));
  for (u64 n : {2ULL, 8ULL, 18ULL, 30ULL, 37ULL, 49ULL}) {
    P1List p1(n);
    CHECK(p1.size() == p1_orbits(n));
    for (std::size_t i = 0; i < p1.size(); ++i) {
      const auto [c, d] = p1.element(i);
      CHECK(p1.index(static_cast<i64>(c), static_cast<i64>(d)) == i);
      // Unit rescaling lands on the same index.
      for (u64 s = 1; s < n; ++s)
        if (std::gcd(s, n) == 1) CHECK(p1.index(static_cast<i64>(c * s), static_cast<i64>(d * s)) == i);
    }
  }
  CHECK_THROWS_AS(P1List(12).index(2, 4), Error);
  // Large levels use the sparse lookup.
  P1List big(1009);
  CHECK(big.size() == 1010);
  CHECK(big.index(5, 7) == big.index(10, 14));
}

TEST_CASE("cusp classes match the cusp count formula") {
  for (u64 n : {4ULL, 9ULL, 11ULL, 12ULL, 16ULL, 27ULL, 36ULL}) {
    // Count Gamma_0(N) cusp classes through the lifted Manin symbols' endpoints;
    // with +/- identified the number is at most the classical count.
    i64 classical = 0;
    for (u64 d = 1; d <= n; ++d)
      if (n % d == 0) classical += static_cast<i64>(euler_phi(std::gcd(d, n / d)));
    CuspClasses cc(n);
    P1List p1(n);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      auto m = lift_to_sl2(n, p1.element(i).first, p1.element(i).second);
      CHECK(m[0] * m[3] - m[1] * m[2] == 1);
      CHECK(floor_mod(m[2], static_cast<i64>(n)) == static_cast<i64>(p1.element(i).first));
      cc.class_of(m[0], m[2]);
      cc.class_of(m[1], m[3]);
    }
    CHECK(static_cast<i64>(cc.count()) <= classical);
    CHECK(cc.count() >= 2);
  }
  // Gamma_0(9): 1/3 and 2/3 are negatives of each other, so identified.
  CuspClasses c9(9);
  CHECK(c9.class_of(1, 3) == c9.class_of(2, 3));
  CHECK(c9.class_of(1, 3) != c9.class_of(0, 1));
  CHECK(c9.class_of(4, 3) == c9.class_of(1, 3));
}

TEST_CASE("Heilbronn family sizes") {
  // Each matrix has determinant q and satisfies the defining inequalities.
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 13ULL}) {
    for (const auto& h : heilbronn_matrices(q)) {
      CHECK(h[0] * h[3] - h[1] * h[2] == static_cast<i64>(q));
      CHECK(h[0] > h[1]);
      CHECK(h[1] >= 0);
      CHECK(h[3] > h[2]);
      CHECK(h[2] >= 0);
    }
  }
}

TEST_CASE("cuspidal plus dimension equals the genus") {
  CHECK(ManinSpace(11).cuspidal_dimension() == 1);
  CHECK(ManinSpace(37).cuspidal_dimension() == 2);
  for (u64 n : {1ULL, 2ULL, 11ULL, 23ULL, 30ULL, 37ULL, 43ULL, 57ULL, 64ULL, 99ULL, 121ULL}) {
    CHECK_MESSAGE(ManinSpace(n).cuspidal_dimension() == static_cast<std::size_t>(genus_x0(n)), "N = ", n);
  }
}

TEST_CASE("relations hold in the quotient") {
  for (u64 n : {11ULL, 37ULL, 30ULL}) {
    ManinSpace m(n);
    const auto& p1 = *m.p1();
    for (std::size_t i = 0; i < p1.size(); ++i) {
      const i64 c = static_cast<i64>(p1.element(i).first), d = static_cast<i64>(p1.element(i).second);
      auto x = m.dense_coords(i), xs = m.dense_coords(p1.index(d, -c));
      auto xt = m.dense_coords(p1.index(d, -c - d)), xtt = m.dense_coords(p1.index(-c - d, c));
      auto xstar = m.dense_coords(p1.index(-c, d));
      for (std::size_t k = 0; k < m.dimension(); ++k) {
        CHECK(x[k] + xs[k] == 0);
        CHECK(x[k] + xt[k] + xtt[k] == 0);
        CHECK(x[k] == xstar[k]);
      }
    }
  }
}

TEST_CASE("Hecke operators: commutativity, trace, zero") {
  ManinSpace m37(37);
  auto t2 = hecke_operator(m37, 2), t3 = hecke_operator(m37, 3);
  CHECK(t2 * t3 == t3 * t2);
  auto full2 = m37.hecke_matrix(2), full5 = m37.hecke_matrix(5);
  CHECK(full2 * full5 == full5 * full2);
  // 37a (a_2 = -2) and 37b (a_2 = 0): trace -2.
  CHECK(t2.trace() == -2);

  ManinSpace m11(11);
  auto e = curve_11a1();
  for (u64 q : primes_up_to(60)) {
    if (q == 11) continue;
    CHECK(hecke_operator(m11, q).trace() == e.ap(q));
  }
  auto t = hecke_operator(m11, 7);
  std::vector<Rational> zero(t.cols(), Rational(0));
  for (const auto& x : t.apply(zero)) CHECK(sgn(x) == 0);
  CHECK_THROWS_AS(hecke_operator(m11, 11), Error);
  // Eisenstein eigenvalue 1 + q on the full quotient.
  auto full = m11.hecke_matrix(3);
  CHECK(full.trace() == e.ap(3) + 4);
}

TEST_CASE("eigensymbol extraction for 11a1 and 37a1") {
  ManinSpace m11(11);
  auto s11 = extract_eigensymbol(m11, curve_11a1());
  CHECK(s11.dimension_history.front() == 1);

  ManinSpace m37(37);
  auto e37 = curve_37a1();
  auto s37 = extract_eigensymbol(m37, e37);
  REQUIRE(s37.dimension_history.size() >= 2);
  CHECK(s37.dimension_history[0] == 2);
  CHECK(s37.dimension_history[1] == 1);
  CHECK(s37.hecke_pairs().front() == std::pair<u64, i64>{2, -2});

  // Held-out eigen-identity at q = 13 and on ten further random primes.
  auto check_eigen = [&](const ManinSpace& m, const EigenSymbol& s, const CurveData& e, u64 q) {
    auto t = m.hecke_matrix(q);
    // The functional in quotient coordinates: values on free representatives.
    std::vector<Rational> phi(m.dimension());
    for (std::size_t f = 0; f < m.dimension(); ++f) phi[f] = s.values()[m.free_rep(f)];
    for (std::size_t j = 0; j < m.dimension(); ++j) {
      Rational acc = 0;
      for (std::size_t i = 0; i < m.dimension(); ++i) acc += phi[i] * t(i, j);
      CHECK(acc == Rational(static_cast<long>(e.ap(q))) * phi[j]);
    }
    std::vector<Rational> tv = t.apply(s.homology_vector);
    for (std::size_t i = 0; i < tv.size(); ++i)
      CHECK(tv[i] == Rational(static_cast<long>(e.ap(q))) * s.homology_vector[i]);
  };
  check_eigen(m37, s37, e37, 13);
  std::mt19937_64 rng(4);
  auto primes = primes_up_to(400);
  for (int i = 0; i < 10; ++i) {
    u64 q = primes[rng() % primes.size()];
    if (q == 37) continue;
    check_eigen(m37, s37, e37, q);
    if (q != 11) check_eigen(m11, s11, curve_11a1(), q);
  }

  for (const auto& b : m37.boundary().apply(s37.homology_vector)) CHECK(sgn(b) == 0);

  // The wrong curve for the level is rejected.
  CHECK_THROWS_AS(extract_eigensymbol(m37, curve_11a1()), Error);
  try {
    extract_eigensymbol(m11, CurveData({0, -1, 1, -10, -20}, 11, 5));
    FAIL("expected HypothesisViolation");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::HypothesisViolation);
  }
}

TEST_CASE("eval_plus symmetries") {
  for (u64 n : {11ULL, 37ULL}) {
    ManinSpace m(n);
    auto s = extract_eigensymbol(m, n == 11 ? curve_11a1() : curve_37a1());
    // Manin symbol values are reproduced by the path decomposition of {b/d, a/c}.
    for (std::size_t i = 0; i < s.p1().size(); ++i) {
      auto g = lift_to_sl2(n, s.p1().element(i).first, s.p1().element(i).second);
      CHECK(s.segment_value({g[1], g[3]}, {g[0], g[2]}) == s.values()[i]);
    }
    for (i64 d = 1; d <= 50; ++d) {
      for (i64 a = 0; a < d; ++a) {
        if (gcd(a, d) != 1) continue;
        const i64 v = s.eval_raw(a, d);
        CHECK(v == s.eval_raw(d - a, d));
        CHECK(v == s.eval_raw(a + d, d));
        CHECK(v == s.eval_raw(a - 3 * d, d));
      }
    }
    CHECK_THROWS_AS(s.eval_raw(2, 4), Error);
  }
}

TEST_CASE("Fricke sign") {
  ManinSpace m11(11), m37(37);
  CHECK(extract_eigensymbol(m11, curve_11a1()).fricke_eigenvalue() == -1);  // root number +1
  CHECK(extract_eigensymbol(m37, curve_37a1()).fricke_eigenvalue() == 1);   // root number -1
}

TEST_CASE("numerical periods and L-values") {
  // AGM oracle for a curve with three real 2-torsion x-coordinates.
  auto e = curve_37a1();
  // Roots of 4x^3 - 4x + 1 (b2 = 0, b4 = -2, b6 = 1).
  std::vector<long double> roots;
  for (int k = 0; k < 3; ++k) {
    // Trigonometric solution of t^3 + pt + q = 0 with p = -1, q = 1/4.
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double r = 2 * std::sqrt(1.0L / 3);
    const long double phi = std::acos(3 * 0.25L / (2 * -1.0L) * std::sqrt(3.0L)) / 3;
    roots.push_back(r * std::cos(phi - 2 * pi * k / 3));
  }
  std::sort(roots.rbegin(), roots.rend());
  for (auto x : roots) CHECK(std::fabs(4 * x * x * x - 4 * x + 1) < 1e-12L);
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double omega_agm = pi / agm(std::sqrt(roots[0] - roots[2]), std::sqrt(roots[0] - roots[1]));
  CHECK(std::fabs(largest_real_root(e) - roots[0]) < 1e-12L);
  CHECK(std::fabs(real_period_component(e) - omega_agm) < 1e-10L);
  CHECK(std::fabs(real_period(e) - 2 * omega_agm) < 1e-10L);

  auto e11 = curve_11a1();
  const long double ratio = l_value_at_one(e11) / real_period(e11);
  CHECK(std::fabs(ratio - 0.2L) < 1e-8L);
  CHECK(reconstruct_rational(ratio) == Rational(1, 5));
  CHECK(reconstruct_rational(0.3333333333333L) == Rational(1, 3));
  CHECK_FALSE(reconstruct_rational(3.14159265358979L).has_value());
}

TEST_CASE("calibration pins L(E,1)/Omega") {
  ManinSpace m11(11);
  auto s = extract_eigensymbol(m11, curve_11a1());
  auto r = calibrate(s, curve_11a1());
  CHECK(s.calibration_status() == CalibrationStatus::Calibrated);
  CHECK(r.ratio == Rational(1, 5));
  CHECK(s.eval_plus(0, 1) == Rational(1, 5));

  ManinSpace m37(37);
  auto s37 = extract_eigensymbol(m37, curve_37a1());
  auto r37 = calibrate(s37, curve_37a1());
  CHECK(r37.raw == 0);
  CHECK(s37.calibration_status() == CalibrationStatus::Uncalibrated);

  auto back = EigenSymbol::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(back.eval_plus(3, 7) == s.eval_plus(3, 7));
}
