#include "doctest.h"

#include "kurihara/exactmath.hpp"
#include "kurihara/linalg.hpp"

#include <random>

using namespace kurihara;

namespace {

ResidueGroupRing random_element(const AbelianGroup& g, std::mt19937_64& rng, u64 p, int m) {
  ResidueGroupRing x(g, Zpm::zero(p, m));
  std::uniform_int_distribution<i64> dist(0, static_cast<i64>(ipow(p, m)) - 1);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = Zpm(dist(rng), p, m);
  return x;
}

// Naive convolution through explicit tuples, independent of the flat-index
// addition used by the implementation.
ResidueGroupRing naive_product(const ResidueGroupRing& x, const ResidueGroupRing& y) {
  const auto& g = x.group();
  ResidueGroupRing r(g, x.zero_value());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      auto a = g.tuple(i), b = g.tuple(j);
      std::vector<u64> c(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) c[k] = (a[k] + b[k]) % g.orders()[k];
      r[g.index(c)] += x[i] * y[j];
    }
  }
  return r;
}

Surjection reduce_coordinates(const AbelianGroup& g, const AbelianGroup& h) {
  std::vector<std::size_t> image(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto t = g.tuple(i);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] %= h.orders()[k];
    image[i] = h.index(t);
  }
  return Surjection(g, h, image);
}

}  // namespace

TEST_CASE("rational canonical form and parsing") {
  Rational q = parse_rational("6/-4");
  CHECK(to_string(q) == "-3/2");
  CHECK(q.get_den() > 0);
  CHECK(to_string(parse_rational("10/5")) == "2");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("Z/p^m arithmetic and reduction of rationals") {
  Zpm a(3, 7, 2), b(-1, 7, 2);
  CHECK((a + b).value() == 2);
  CHECK((a * b).value() == 46);
  CHECK((a * a.inverse()).value() == 1);
  CHECK_THROWS_AS(Zpm(7, 7, 2).inverse(), Error);
  CHECK(reduce(Rational(1, 5), 7, 1).value() == 3);
  CHECK_THROWS_AS(reduce(Rational(1, 7), 7, 1), Error);
  CHECK_THROWS_AS(Zpm(1, 7, 1) + Zpm(1, 7, 2), Error);
}

TEST_CASE("group ring product: identity and hand-checked cyclic case") {
  AbelianGroup z3({3});
  RationalGroupRing x(z3, Rational(0));
  x[1] = 1;
  x[2] = 1;
  auto one = RationalGroupRing::monomial(z3, 0, Rational(1), Rational(0));
  CHECK(one * x == x);
  auto sigma = RationalGroupRing::monomial(z3, 1, Rational(1), Rational(0));
  RationalGroupRing expected(z3, Rational(0));
  expected[2] = 1;
  expected[0] = 1;
  CHECK(x * sigma == expected);
}

TEST_CASE("group ring product agrees with naive convolution over Z/7") {
  std::mt19937_64 rng(11);
  AbelianGroup g({6, 4});
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_element(g, rng, 7, 1);
    auto y = random_element(g, rng, 7, 1);
    CHECK(x * y == naive_product(x, y));
  }
}

TEST_CASE("group ring axioms on random triples") {
  std::mt19937_64 rng(5);
  AbelianGroup g({5, 3});
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_element(g, rng, 5, 2);
    auto y = random_element(g, rng, 5, 2);
    auto z = random_element(g, rng, 5, 2);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * (y + z) == x * y + x * z);
    CHECK(x * y == y * x);
  }
}

TEST_CASE("mismatched groups and rings are rejected") {
  ResidueGroupRing a(AbelianGroup({3}), Zpm::zero(5, 1));
  ResidueGroupRing b(AbelianGroup({4}), Zpm::zero(5, 1));
  ResidueGroupRing c(AbelianGroup({3}), Zpm::zero(5, 2));
  try {
    (void)(a * b);
    FAIL("expected MismatchedGroup");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MismatchedGroup);
  }
  try {
    (void)(a * c);
    FAIL("expected MismatchedRing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MismatchedRing);
  }
}

TEST_CASE("projection and norm maps") {
  std::mt19937_64 rng(3);
  struct Pair {
    AbelianGroup g, h;
  };
  std::vector<Pair> pairs = {{AbelianGroup({6, 4}), AbelianGroup({3, 2})},
                             {AbelianGroup({12}), AbelianGroup({4})},
                             {AbelianGroup({9, 2}), AbelianGroup({1, 1})}};
  for (const auto& [g, h] : pairs) {
    Surjection s = reduce_coordinates(g, h);
    const auto k = static_cast<i64>(s.kernel_size());

    auto one = ResidueGroupRing::monomial(h, 0, Zpm::one(7, 2), Zpm::zero(7, 2));
    auto lifted = norm_map(one, s);
    CHECK(lifted.support_size() == s.kernel_size());

    for (int trial = 0; trial < 100; ++trial) {
      auto x = random_element(h, rng, 7, 2);
      auto y = random_element(g, rng, 7, 2);
      CHECK(projection_map(norm_map(x, s), s) == x.scaled(Zpm(k, 7, 2)));
      CHECK(norm_map(x * projection_map(y, s), s) == norm_map(x, s) * y);
      auto aug = projection_map(y, reduce_coordinates(g, AbelianGroup(std::vector<u64>(g.rank(), 1))));
      CHECK(aug[0] == y.augmentation());
    }
    auto single = ResidueGroupRing::monomial(g, 5 % g.size(), Zpm(4, 7, 2), Zpm::zero(7, 2));
    auto image = projection_map(single, s);
    CHECK(image.support_size() == 1);
    CHECK(image[s(5 % g.size())] == Zpm(4, 7, 2));
  }
}

TEST_CASE("norm and projection reject elements on the wrong group") {
  AbelianGroup g({6}), h({3});
  Surjection s = reduce_coordinates(g, h);
  RationalGroupRing on_g(g, Rational(0)), on_h(h, Rational(0));
  try {
    (void)norm_map(on_g, s);
    FAIL("expected NotAQuotient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAQuotient);
  }
  try {
    (void)projection_map(on_h, s);
    FAIL("expected NotASurjection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotASurjection);
  }
  CHECK_THROWS_AS(Surjection(g, h, std::vector<std::size_t>(6, 0)), Error);
}

TEST_CASE("group ring inverse over Z/p^m") {
  AbelianGroup g({5});
  auto x = ResidueGroupRing::monomial(g, 0, Zpm::one(7, 2), Zpm::zero(7, 2));
  x[1] = Zpm(3, 7, 2);  // 1 + 3 sigma: -1/3 = 2 is not a 5th root of unity mod 7
  auto y = group_ring_inverse(x);
  CHECK(x * y == ResidueGroupRing::monomial(g, 0, Zpm::one(7, 2), Zpm::zero(7, 2)));

  ResidueGroupRing norm(g, Zpm::zero(7, 1));
  for (std::size_t i = 0; i < 5; ++i) norm[i] = Zpm::one(7, 1);
  CHECK_THROWS_AS(group_ring_inverse(norm), Error);
}

TEST_CASE("canonical JSON serialization round-trips bit-exactly") {
  std::mt19937_64 rng(9);
  AbelianGroup g({4, 3});
  for (int trial = 0; trial < 10; ++trial) {
    RationalGroupRing x(g, Rational(0));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (rng() % 3 == 0) x[i] = Rational(static_cast<long>(rng() % 19) - 9, static_cast<long>(rng() % 5) + 1);
      x[i].canonicalize();
    }
    const std::string text = to_json(x);
    auto back = rational_group_ring_from_json(text);
    CHECK(back == x);
    CHECK(to_json(back) == text);

    auto r = random_element(g, rng, 5, 2);
    CHECK(to_json(residue_group_ring_from_json(to_json(r), 5, 2)) == to_json(r));
  }
  RationalGroupRing x(AbelianGroup({3}), Rational(0));
  x[2] = Rational(-1, 2);
  CHECK(to_json(x) == R"({"group":[3],"coeffs":[[[2],"-1/2"]]})");
}

TEST_CASE("kernel_basis over the rationals") {
  RationalMatrix zero(3, 3, Rational(0));
  CHECK(kernel_basis(zero).size() == 3);
  RationalMatrix id(4, 4, Rational(0));
  for (int i = 0; i < 4; ++i) id(i, i) = 1;
  CHECK(kernel_basis(id).empty());

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    RationalMatrix m(6, 8, Rational(0));
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 8; ++c)
        m(r, c) = Rational(static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 3) + 1);
    // Force a dependency on some trials.
    if (trial % 2 == 0)
      for (std::size_t c = 0; c < 8; ++c) m(5, c) = m(0, c) + m(1, c);
    auto basis = kernel_basis(m);
    CHECK(rank(m) + basis.size() == 8);
    for (const auto& v : basis) {
      for (const auto& e : m.apply(v)) CHECK(sgn(e) == 0);
      Integer g = 0;
      for (const auto& e : v) {
        CHECK(e.get_den() == 1);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_num_mpz_t());
      }
      CHECK(g == 1);
    }
  }
}

TEST_CASE("kernel_basis over Z/p^m pivots on units") {
  ResidueMatrix m(2, 3, Zpm::zero(5, 2));
  m(0, 0) = Zpm(1, 5, 2);
  m(0, 1) = Zpm(2, 5, 2);
  m(1, 2) = Zpm(5, 5, 2);  // non-unit entry
  auto k = kernel_basis(m);
  CHECK(k.nonunit_columns == std::vector<std::size_t>{2});
  REQUIRE(k.basis.size() == 1);
  for (const auto& e : m.apply(k.basis[0])) CHECK(e.is_zero());
}
