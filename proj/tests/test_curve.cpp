#include "doctest.h"

#include "kurihara/curve.hpp"

#include <cmath>
#include <random>
#include <thread>

using namespace kurihara;

namespace {

CurveData curve_11a1() { return CurveData({0, -1, 1, -10, -20}, 11, 5, "11a1"); }
CurveData curve_37a1() { return CurveData({0, 0, 1, -1, 0}, 37, 1, "37a1"); }

// Direct enumeration of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_ell.
u64 naive_count(const CurveData& e, u64 ell) {
  const i64 l = static_cast<i64>(ell);
  const auto& a = e.ainvs();
  u64 n = 1;
  for (i64 x = 0; x < l; ++x)
    for (i64 y = 0; y < l; ++y) {
      i64 lhs = floor_mod(y * y + floor_mod(a[0] * x, l) * y + a[2] * y, l);
      i64 rhs = floor_mod(floor_mod(x * x, l) * x + floor_mod(a[1] * x, l) * x + a[3] * x + a[4], l);
      if (lhs == rhs) ++n;
    }
  return n;
}

}  // namespace

TEST_CASE("curve invariants and validation") {
  auto e = curve_11a1();
  CHECK(e.discriminant() == -161051);
  CHECK(curve_37a1().discriminant() == 37);
  CHECK_THROWS_AS(CurveData({0, 0, 0, 0, 0}, 1, 1), Error);
  CHECK_THROWS_AS(CurveData({0, -1, 1, -10, -20}, 11, 5, "", Integer(161051)), Error);
  try {
    CurveData({0, -1, 1, -10, -20}, 13, 5);
    FAIL("expected InvalidCurve");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::InvalidCurve);
  }
}

TEST_CASE("curve JSON input") {
  auto e = CurveData::from_json(
      R"({"label":"37a1","ainvs":[0,0,1,-1,0],"conductor":37,"tamagawa_product":1,"mod_p_surjective":[5]})");
  CHECK(e.label() == "37a1");
  CHECK(e.asserted_surjective().count(5) == 1);
  CHECK_FALSE(e.root_number().has_value());
  auto again = CurveData::from_json(e.to_json());
  CHECK(again.to_json() == e.to_json());
  CHECK_THROWS_AS(CurveData::from_json(R"({"ainvs":[0,0,1],"conductor":37,"tamagawa_product":1})"), Error);
}

TEST_CASE("point counts against hand and naive enumeration") {
  CHECK(count_points(curve_37a1(), 5) == 8);
  CHECK(curve_37a1().ap(5) == -2);
  CHECK(count_points(curve_11a1(), 7) == 10);
  CHECK(curve_11a1().ap(7) == -2);

  for (const auto& e : {curve_11a1(), curve_37a1()}) {
    for (u64 ell : primes_up_to(200)) {
      if (!e.is_good(ell)) continue;
      CHECK(count_points(e, ell) == naive_count(e, ell));
    }
  }
  try {
    count_points(curve_11a1(), 11);
    FAIL("expected BadPrime");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::BadPrime);
  }
}

TEST_CASE("ap_table and bad primes") {
  auto t = ap_table(curve_11a1(), 13);
  std::map<u64, i64> expected{{2, -2}, {3, -1}, {5, 1}, {7, -2}, {13, 4}};
  CHECK(t.good == expected);
  CHECK(t.bad == std::set<u64>{11});
  CHECK(curve_11a1().ap(11) == 1);   // split multiplicative
  CHECK(curve_37a1().ap(37) == -1);  // non-split multiplicative

  auto t2 = ap_table(CurveData({0, 0, 0, 1, 0}, 64, 1), 2);
  CHECK(t2.good.empty());
  CHECK(t2.bad == std::set<u64>{2});

  auto big = ap_table(curve_37a1(), 3000);
  for (auto [ell, a] : big.good) CHECK(static_cast<double>(a * a) <= 4.0 * static_cast<double>(ell));
}

TEST_CASE("trace cache tolerates concurrent readers") {
  auto e = curve_37a1();
  std::vector<std::thread> threads;
  std::vector<i64> sums(4, 0);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (u64 ell : primes_up_to(2000))
        if (e.is_good(ell)) sums[t] += e.ap(ell);
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) CHECK(sums[t] == sums[0]);
}

TEST_CASE("group order annihilates random points") {
  std::mt19937_64 rng(23);
  for (const auto& e : {curve_11a1(), curve_37a1()}) {
    for (u64 ell : {3ULL, 5ULL, 101ULL, 1009ULL, 65537ULL, 1000003ULL}) {
      if (!e.is_good(ell)) continue;
      ReducedCurve c(e, ell);
      const u64 n = count_points(e, ell);
      for (int i = 0; i < 20; ++i) {
        Point p = c.random_point(rng);
        CHECK(c.contains(p));
        CHECK(c.multiply(p, n).infinity);
      }
    }
  }
}

TEST_CASE("baby-step giant-step agrees with character sums") {
  for (const auto& e : {curve_11a1(), curve_37a1()}) {
    for (u64 ell : {10007ULL, 65537ULL, 99991ULL, 999983ULL}) {
      CHECK(count_points_bsgs(e, ell, 7) == affine_count(e, ell) + 1);
    }
  }
}

TEST_CASE("hypothesis checks") {
  auto e = curve_11a1().assert_surjective(7);
  auto r7 = check_hypotheses(e, 7);
  CHECK(r7.ordinary);
  CHECK(r7.ap == -2);
  CHECK(r7.points_mod_p == 10);
  CHECK(r7.points_prime_to_p);
  CHECK(r7.tamagawa_prime_to_p);
  CHECK(r7.surjectivity == SurjectivityVerdict::Asserted);
  CHECK(r7.passes());

  auto r5 = check_hypotheses(curve_11a1(), 5);
  CHECK_FALSE(r5.tamagawa_prime_to_p);
  CHECK_FALSE(r5.passes());
  // 11a1 has a rational 5-isogeny, so the scan never sees an irreducible sample.
  CHECK_FALSE(r5.heuristic_irreducible);
  CHECK(r5.surjectivity == SurjectivityVerdict::Unknown);

  auto r19 = check_hypotheses(curve_11a1(), 19);  // a_19 = 0
  CHECK(r19.ap == 0);
  CHECK_FALSE(r19.ordinary);
  CHECK_FALSE(r19.passes());

  // Without an assertion the scan should still confirm 37a1 at 5 and 7.
  CHECK(check_hypotheses(curve_37a1(), 5).surjectivity == SurjectivityVerdict::HeuristicallyConfirmed);
  CHECK(check_hypotheses(curve_37a1(), 7).surjectivity == SurjectivityVerdict::HeuristicallyConfirmed);
  CHECK_THROWS_AS(check_hypotheses(curve_37a1(), 37), Error);
}

TEST_CASE("Frobenius polynomial") {
  auto e = curve_37a1();
  // 11 = 1 mod 5: coefficients (1, -a, 1)
  auto c = frobenius_poly(e, 11, 5, 1);
  CHECK(c[0] == Zpm(1, 5, 1));
  CHECK(c[1] == Zpm(-e.ap(11), 5, 1));
  CHECK(c[2] == Zpm(1, 5, 1));
  for (u64 ell : {2ULL, 3ULL, 7ULL, 11ULL, 13ULL, 101ULL}) {
    auto q = frobenius_poly(e, ell, 5, 3);
    Zpm at_one = q[0] + q[1] + q[2];
    Zpm expected = Zpm(static_cast<i64>(count_points(e, ell)), 5, 3) * Zpm(static_cast<i64>(ell), 5, 3).inverse();
    CHECK(at_one == expected);
    auto r = frobenius_poly(e, ell);
    CHECK(r[0] + r[1] + r[2] == Rational(static_cast<long>(count_points(e, ell)), static_cast<long>(ell)));
  }
  try {
    frobenius_poly(e, 5, 5, 2);
    FAIL("expected NonInvertibleEll");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::NonInvertibleEll);
  }
}

TEST_CASE("p-torsion: trivial and cyclic by group order") {
  auto e = curve_37a1();
  for (u64 ell : primes_up_to(300)) {
    if (!e.is_good(ell) || ell == 5) continue;
    const u64 n = count_points(e, ell);
    auto t = p_torsion_structure(e, ell, 5);
    if (n % 5 != 0) CHECK(t.shape == TorsionShape::Trivial);
    else if (n % 25 != 0) CHECK(t.shape == TorsionShape::Cyclic);
  }
}

TEST_CASE("p-torsion sampling agrees with division-polynomial fallback") {
  std::mt19937_64 rng(41);
  int instances = 0, full = 0, decided_by_sampling = 0;
  while (instances < 50) {
    std::array<i64, 5> a{static_cast<i64>(rng() % 3), static_cast<i64>(rng() % 5) - 2,
                         static_cast<i64>(rng() % 2), static_cast<i64>(rng() % 21) - 10,
                         static_cast<i64>(rng() % 41) - 20};
    std::optional<CurveData> e;
    try {
      e.emplace(a, 1, 1);
    } catch (const Error&) {
      continue;
    }
    const u64 p = (rng() % 2) ? 3 : 5;
    const u64 ell = primes_up_to(3000)[rng() % 400 + 20];
    if (ell % p != 1 || !e->is_good(ell)) continue;
    if (count_points(*e, ell) % (p * p) != 0) continue;
    ++instances;
    const bool oracle = full_p_torsion_rational(*e, ell, p);
    auto sampled = p_torsion_structure(*e, ell, p, 99, false);
    auto combined = p_torsion_structure(*e, ell, p, 99, true);
    if (sampled.shape == TorsionShape::FullRank2) {
      ++decided_by_sampling;
      CHECK(oracle);
    }
    CHECK((combined.shape == TorsionShape::FullRank2) == oracle);
    CHECK(p_torsion_structure(*e, ell, p, 99, true).shape == combined.shape);
    full += oracle;
  }
  CHECK(full > 0);
  CHECK(decided_by_sampling > 0);
}
