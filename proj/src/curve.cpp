#include "kurihara/curve.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace kurihara {

namespace {

i64 to_i64(const Integer& v, const char* what) {
  if (!v.fits_slong_p()) throw Error(ErrorKind::InvalidCurve, std::string(what) + " does not fit in 64 bits");
  return v.get_si();
}

u64 red(i64 v, u64 ell) { return static_cast<u64>(floor_mod(v, static_cast<i64>(ell))); }

}  // namespace

CurveData::CurveData(std::array<i64, 5> ainvs, u64 conductor, u64 tamagawa_product,
                     std::string label, std::optional<Integer> stated_discriminant)
    : a_(ainvs),
      conductor_(conductor),
      tamagawa_(tamagawa_product),
      label_(std::move(label)),
      cache_(std::make_shared<TraceCache>()) {
  const Integer a1 = a_[0], a2 = a_[1], a3 = a_[2], a4 = a_[3], a6 = a_[4];
  const Integer b2 = a1 * a1 + 4 * a2;
  const Integer b4 = 2 * a4 + a1 * a3;
  const Integer b6 = a3 * a3 + 4 * a6;
  const Integer b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  disc_ = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
  b2_ = to_i64(b2, "b2");
  b4_ = to_i64(b4, "b4");
  b6_ = to_i64(b6, "b6");
  b8_ = to_i64(b8, "b8");

  if (disc_ == 0) throw Error(ErrorKind::InvalidCurve, "singular Weierstrass equation");
  if (stated_discriminant && *stated_discriminant != disc_) {
    throw Error(ErrorKind::InvalidCurve, "stated discriminant " + stated_discriminant->get_str() +
                                             " differs from computed " + disc_.get_str());
  }
  if (conductor_ == 0 || tamagawa_ == 0) {
    throw Error(ErrorKind::InvalidCurve, "conductor and Tamagawa product must be positive");
  }
  for (auto [q, e] : factor(conductor_)) {
    (void)e;
    if (!mpz_divisible_ui_p(disc_.get_mpz_t(), q)) {
      throw Error(ErrorKind::InvalidCurve,
                  "conductor prime " + std::to_string(q) + " does not divide the discriminant");
    }
  }
}

CurveData CurveData::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidArgument, std::string("curve JSON: ") + ex.what());
  }
  try {
    auto a = j.at("ainvs").get<std::vector<i64>>();
    if (a.size() != 5) throw Error(ErrorKind::InvalidCurve, "ainvs must have five entries");
    std::optional<Integer> disc;
    if (j.contains("discriminant")) {
      const auto& d = j["discriminant"];
      disc = d.is_string() ? Integer(d.get<std::string>()) : Integer(d.get<long>());
    }
    CurveData e({a[0], a[1], a[2], a[3], a[4]}, j.at("conductor").get<u64>(),
                j.at("tamagawa_product").get<u64>(), j.value("label", std::string()), disc);
    for (u64 p : j.value("mod_p_surjective", std::vector<u64>{})) e.assert_surjective(p);
    e.assert_optimal(j.value("optimal", false));
    if (j.contains("root_number") && !j["root_number"].is_null()) {
      int w = j["root_number"].get<int>();
      if (w != 1 && w != -1) throw Error(ErrorKind::InvalidCurve, "root number must be +1 or -1");
      e.set_root_number(w);
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidCurve, std::string("curve JSON: ") + ex.what());
  }
}

CurveData CurveData::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

bool CurveData::is_good(u64 ell) const { return !mpz_divisible_ui_p(disc_.get_mpz_t(), ell); }

i64 CurveData::ap(u64 ell) const {
  if (auto v = cache_->find(ell)) return *v;
  i64 value;
  if (is_good(ell)) {
    value = static_cast<i64>(ell + 1) - static_cast<i64>(count_points(*this, ell));
  } else {
    value = static_cast<i64>(ell) - static_cast<i64>(affine_count(*this, ell));
  }
  cache_->store(ell, value);
  return value;
}

std::string CurveData::to_json() const {
  nlohmann::json j;
  j["label"] = label_;
  j["ainvs"] = a_;
  j["conductor"] = conductor_;
  j["tamagawa_product"] = tamagawa_;
  j["mod_p_surjective"] = std::vector<u64>(surjective_.begin(), surjective_.end());
  j["optimal"] = optimal_;
  j["root_number"] = root_number_ ? nlohmann::json(*root_number_) : nlohmann::json();
  return j.dump();
}

// --- point counting ----------------------------------------------------------

u64 affine_count(const CurveData& e, u64 ell) {
  if (!is_prime(ell)) throw Error(ErrorKind::InvalidArgument, std::to_string(ell) + " is not prime");
  if (ell == 2) {
    u64 n = 0;
    const auto& a = e.ainvs();
    for (i64 x = 0; x < 2; ++x)
      for (i64 y = 0; y < 2; ++y) {
        i64 lhs = y * y + a[0] * x * y + a[2] * y;
        i64 rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
        if (floor_mod(lhs - rhs, 2) == 0) ++n;
      }
    return n;
  }
  // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 =: F(x)
  std::vector<signed char> chi(ell, -1);
  chi[0] = 0;
  for (u64 y = 1; y <= ell / 2; ++y) chi[mulmod(y, y, ell)] = 1;
  const u64 c3 = 4 % ell, c2 = red(e.b2(), ell), c1 = red(2 * e.b4(), ell), c0 = red(e.b6(), ell);
  i64 total = 0;
  for (u64 x = 0; x < ell; ++x) {
    u64 f = (mulmod((mulmod(c3, x, ell) + c2) % ell, x, ell) + c1) % ell;
    f = (mulmod(f, x, ell) + c0) % ell;
    total += 1 + chi[f];
  }
  return static_cast<u64>(total);
}

u64 count_points(const CurveData& e, u64 ell) {
  if (!is_prime(ell)) throw Error(ErrorKind::InvalidArgument, std::to_string(ell) + " is not prime");
  if (!e.is_good(ell)) throw Error(ErrorKind::BadPrime, std::to_string(ell) + " divides the discriminant");
  if (ell <= 1000000) return affine_count(e, ell) + 1;
  return count_points_bsgs(e, ell);
}

namespace {

struct PointHash {
  std::size_t operator()(const Point& p) const {
    return std::hash<u64>()(p.x * 0x9e3779b97f4a7c15ULL ^ p.y) ^ (p.infinity ? 1 : 0);
  }
};

}  // namespace

u64 count_points_bsgs(const CurveData& e, u64 ell, u64 seed) {
  if (!e.is_good(ell)) throw Error(ErrorKind::BadPrime, std::to_string(ell) + " divides the discriminant");
  if (ell < 5) return affine_count(e, ell) + 1;
  ReducedCurve c(e, ell);
  std::mt19937_64 rng(seed);
  const u64 r = static_cast<u64>(std::floor(2.0 * std::sqrt(static_cast<double>(ell)))) + 1;
  const u64 lo = ell + 1 > r ? ell + 1 - r : 0, hi = ell + 1 + r;
  const u64 width = hi - lo;
  const u64 s = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(width + 1))));

  std::vector<u64> candidates;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Point p = c.random_point(rng);
    if (!candidates.empty()) {
      std::vector<u64> keep;
      for (u64 m : candidates)
        if (c.multiply(p, m).infinity) keep.push_back(m);
      candidates = std::move(keep);
    } else {
      // Find one m in [lo, hi] with m P = 0, then all of them via ord(P).
      std::unordered_map<Point, u64, PointHash> baby;
      Point acc;  // infinity
      for (u64 j = 0; j < s; ++j) {
        baby.emplace(acc, j);
        acc = c.add(acc, p);
      }
      const Point giant = c.negate(acc);  // -sP
      Point target = c.negate(c.multiply(p, lo));
      u64 hit = 0;
      bool found = false;
      for (u64 i = 0; i <= s && !found; ++i) {
        auto it = baby.find(target);
        if (it != baby.end()) {
          hit = lo + i * s + it->second;
          found = true;
        }
        target = c.add(target, giant);
      }
      if (!found) throw Error(ErrorKind::IdentityFailure, "BSGS found no multiple of the point order");
      u64 order = hit;
      for (auto [q, k] : factor(hit)) {
        for (int t = 0; t < k && order % q == 0 && c.multiply(p, order / q).infinity; ++t) order /= q;
      }
      for (u64 m = lo + (hit - lo) % order; m <= hi; m += order) candidates.push_back(m);
    }
    if (candidates.size() == 1) return candidates[0];
  }
  // Exponent of the group is too small to pin the order; fall back to enumeration.
  return affine_count(e, ell) + 1;
}

ApTable ap_table(const CurveData& e, u64 bound) {
  ApTable t;
  for (u64 ell : primes_up_to(bound)) {
    if (e.is_good(ell)) {
      t.good[ell] = e.ap(ell);
    } else {
      t.bad.insert(ell);
    }
  }
  return t;
}

// --- points over F_ell ---------------------------------------------------------

std::optional<u64> sqrt_mod(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  u64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  u64 m = static_cast<u64>(s), c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0, t2 = t;
    while (t2 != 1) {
      t2 = mulmod(t2, t2, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

ReducedCurve::ReducedCurve(const CurveData& e, u64 ell) : ell_(ell) {
  if (!e.is_good(ell)) throw Error(ErrorKind::BadPrime, std::to_string(ell) + " divides the discriminant");
  a1_ = red(e.a1(), ell);
  a2_ = red(e.a2(), ell);
  a3_ = red(e.a3(), ell);
  a4_ = red(e.a4(), ell);
  a6_ = red(e.a6(), ell);
  b2_ = red(e.b2(), ell);
  b4_ = red(e.b4(), ell);
  b6_ = red(e.b6(), ell);
}

u64 ReducedCurve::rhs(u64 x) const {
  const u64 l = ell_;
  u64 f = (mulmod(4 % l, x, l) + b2_) % l;
  f = (mulmod(f, x, l) + mulmod(2, b4_, l)) % l;
  return (mulmod(f, x, l) + b6_) % l;
}

bool ReducedCurve::contains(const Point& p) const {
  if (p.infinity) return true;
  const u64 l = ell_;
  u64 lhs = (mulmod(p.y, p.y, l) + mulmod(mulmod(a1_, p.x, l), p.y, l) + mulmod(a3_, p.y, l)) % l;
  u64 x2 = mulmod(p.x, p.x, l);
  u64 r = (mulmod(x2, p.x, l) + mulmod(a2_, x2, l) + mulmod(a4_, p.x, l) + a6_) % l;
  return lhs == r;
}

Point ReducedCurve::negate(const Point& p) const {
  if (p.infinity) return p;
  const u64 l = ell_;
  u64 t = (p.y + mulmod(a1_, p.x, l) + a3_) % l;
  return {p.x, (l - t) % l, false};
}

Point ReducedCurve::add(const Point& p, const Point& q) const {
  if (p.infinity) return q;
  if (q.infinity) return p;
  const u64 l = ell_;
  const i64 L = static_cast<i64>(l);
  u64 lambda;
  if (p.x == q.x) {
    if (negate(q) == p) return Point{};
    u64 num = (mulmod(3, mulmod(p.x, p.x, l), l) + mulmod(2 * a2_ % l, p.x, l) + a4_ + l -
               mulmod(a1_, p.y, l)) % l;
    u64 den = (mulmod(2, p.y, l) + mulmod(a1_, p.x, l) + a3_) % l;
    lambda = mulmod(num, static_cast<u64>(invmod(static_cast<i64>(den), L)), l);
  } else {
    u64 num = (q.y + l - p.y) % l;
    u64 den = (q.x + l - p.x) % l;
    lambda = mulmod(num, static_cast<u64>(invmod(static_cast<i64>(den), L)), l);
  }
  u64 nu = (p.y + l - mulmod(lambda, p.x, l)) % l;
  u64 x3 = (mulmod(lambda, lambda, l) + mulmod(a1_, lambda, l) + 3 * l - a2_ - p.x - q.x) % l;
  u64 y3 = (3 * l - mulmod((lambda + a1_) % l, x3, l) - nu - a3_) % l;
  return {x3, y3, false};
}

Point ReducedCurve::multiply(const Point& p, u64 k) const {
  Point r, b = p;
  while (k) {
    if (k & 1) r = add(r, b);
    b = add(b, b);
    k >>= 1;
  }
  return r;
}

Point ReducedCurve::random_point(std::mt19937_64& rng) const {
  const u64 l = ell_;
  if (l == 2) {
    std::vector<Point> pts;
    for (u64 x = 0; x < 2; ++x)
      for (u64 y = 0; y < 2; ++y)
        if (contains({x, y, false})) pts.push_back({x, y, false});
    if (pts.empty()) return Point{};
    return pts[rng() % pts.size()];
  }
  std::uniform_int_distribution<u64> dist(0, l - 1);
  const u64 inv2 = (l + 1) / 2;
  for (;;) {
    const u64 x = dist(rng);
    auto s = sqrt_mod(rhs(x), l);
    if (!s) continue;
    u64 root = (rng() & 1) ? *s : (l - *s) % l;
    u64 y = mulmod((root + 2 * l - mulmod(a1_, x, l) - a3_) % l, inv2, l);
    return {x, y, false};
  }
}

// --- hypotheses ------------------------------------------------------------------

std::string to_string(SurjectivityVerdict v) {
  switch (v) {
    case SurjectivityVerdict::Asserted: return "asserted";
    case SurjectivityVerdict::HeuristicallyConfirmed: return "heuristically-confirmed";
    case SurjectivityVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

std::string HypothesisReport::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["a_p"] = ap;
  j["points_mod_p"] = points_mod_p;
  j["ordinary"] = ordinary;
  j["points_prime_to_p"] = points_prime_to_p;
  j["tamagawa_prime_to_p"] = tamagawa_prime_to_p;
  j["surjectivity"] = to_string(surjectivity);
  j["heuristic"] = {{"irreducible", heuristic_irreducible},
                    {"split_nonscalar", heuristic_split_nonscalar},
                    {"full_determinant", heuristic_full_determinant}};
  j["conductor_source"] = "supplied";
  j["tamagawa_source"] = "supplied";
  j["passes"] = passes();
  return j.dump();
}

HypothesisReport check_hypotheses(const CurveData& e, u64 p) {
  if (p < 3 || !is_prime(p)) throw Error(ErrorKind::InvalidArgument, "p must be a prime >= 3");
  if (!e.is_good(p)) throw Error(ErrorKind::BadPrime, std::to_string(p) + " divides the discriminant");
  HypothesisReport r;
  r.p = p;
  r.ap = e.ap(p);
  r.points_mod_p = static_cast<u64>(static_cast<i64>(p + 1) - r.ap);
  r.ordinary = e.conductor() % p != 0 && floor_mod(r.ap, static_cast<i64>(p)) != 0;
  r.points_prime_to_p = r.points_mod_p % p != 0;
  r.tamagawa_prime_to_p = e.tamagawa_product() % p != 0;

  std::set<u64> dets;
  for (u64 ell : primes_up_to(1000)) {
    if (ell == p || !e.is_good(ell)) continue;
    const u64 a = red(e.ap(ell), p), d = ell % p;
    dets.insert(d);
    const u64 disc = (mulmod(a, a, p) + p * 4 - mulmod(4, d, p)) % p;
    const int chi = legendre(static_cast<i64>(disc), p);
    if (chi == -1) {
      r.heuristic_irreducible = true;
    } else if (chi == 1) {
      const u64 s = *sqrt_mod(disc, p);
      const u64 inv2 = (p + 1) / 2;
      const u64 r1 = mulmod((a + s) % p, inv2, p), r2 = mulmod((a + p - s) % p, inv2, p);
      const u64 ratio = mulmod(r1, static_cast<u64>(invmod(static_cast<i64>(r2), static_cast<i64>(p))), p);
      if (ratio != 1 && ratio != p - 1) r.heuristic_split_nonscalar = true;
    }
  }
  r.heuristic_full_determinant = dets.size() == p - 1;

  if (e.asserted_surjective().count(p)) {
    r.surjectivity = SurjectivityVerdict::Asserted;
  } else if (r.heuristic_irreducible && r.heuristic_split_nonscalar && r.heuristic_full_determinant) {
    r.surjectivity = SurjectivityVerdict::HeuristicallyConfirmed;
  }
  return r;
}

std::array<Zpm, 3> frobenius_poly(const CurveData& e, u64 ell, u64 p, int m) {
  if (!e.is_good(ell)) throw Error(ErrorKind::BadPrime, std::to_string(ell) + " divides the discriminant");
  if (ell % p == 0) throw Error(ErrorKind::NonInvertibleEll, std::to_string(ell) + " is not a unit mod p");
  const Zpm inv = Zpm(static_cast<i64>(ell % ipow(p, m)), p, m).inverse();
  return {Zpm::one(p, m), -(Zpm(e.ap(ell), p, m) * inv), inv};
}

std::array<Rational, 3> frobenius_poly(const CurveData& e, u64 ell) {
  if (!e.is_good(ell)) throw Error(ErrorKind::BadPrime, std::to_string(ell) + " divides the discriminant");
  const Rational l(static_cast<unsigned long>(ell));
  return {Rational(1), -Rational(e.ap(ell)) / l, 1 / l};
}

// --- p-torsion ---------------------------------------------------------------------

namespace {

// Dense polynomials over F_ell, lowest degree first, no trailing zeros.
using Poly = std::vector<u64>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly sub(Poly a, const Poly& b, u64 l) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + l - b[i]) % l;
  trim(a);
  return a;
}

Poly mul(const Poly& a, const Poly& b, u64 l) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], l)) % l;
  }
  trim(r);
  return r;
}

Poly rem(Poly a, const Poly& m, u64 l) {
  const u64 inv = static_cast<u64>(invmod(static_cast<i64>(m.back()), static_cast<i64>(l)));
  while (a.size() >= m.size()) {
    const u64 f = mulmod(a.back(), inv, l);
    const std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + l - mulmod(f, m[i], l)) % l;
    trim(a);
  }
  return a;
}

Poly powmod_poly(Poly base, u64 exp, const Poly& m, u64 l) {
  Poly r{1};
  base = rem(base, m, l);
  while (exp) {
    if (exp & 1) r = rem(mul(r, base, l), m, l);
    base = rem(mul(base, base, l), m, l);
    exp >>= 1;
  }
  return r;
}

Poly gcd_poly(Poly a, Poly b, u64 l) {
  while (!b.empty()) {
    Poly t = rem(a, b, l);
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

// h_n = psi_n for odd n and psi_n / psi_2 for even n, all in F_ell[x].
class DivisionPolynomials {
 public:
  DivisionPolynomials(const CurveData& e, u64 l) : l_(l) {
    const u64 b2 = red(e.b2(), l), b4 = red(e.b4(), l), b6 = red(e.b6(), l), b8 = red(e.b8(), l);
    f_ = {b6, mulmod(2, b4, l), b2, 4 % l};
    trim(f_);
    f2_ = mul(f_, f_, l);
    memo_[0] = {};
    memo_[1] = {1};
    memo_[2] = {1};
    memo_[3] = {b8, mulmod(3, b6, l), mulmod(3, b4, l), b2, 3 % l};
    trim(memo_[3]);
    const u64 c1 = (mulmod(b2, b8, l) + l - mulmod(b4, b6, l)) % l;
    const u64 c0 = (mulmod(b4, b8, l) + l - mulmod(b6, b6, l)) % l;
    memo_[4] = {c0, c1, mulmod(10, b8, l), mulmod(10, b6, l), mulmod(5, b4, l), b2, 2 % l};
    trim(memo_[4]);
  }

  const Poly& f() const { return f_; }

  const Poly& h(u64 n) {
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
    const u64 l = l_;
    Poly out;
    if (n % 2 == 1) {
      const u64 k = (n - 1) / 2;
      Poly t1 = mul(h(k + 2), cube(h(k)), l);
      Poly t2 = mul(h(k - 1), cube(h(k + 1)), l);
      if (k % 2 == 0) t1 = mul(t1, f2_, l);
      else t2 = mul(t2, f2_, l);
      out = sub(t1, t2, l);
    } else {
      const u64 k = n / 2;
      Poly inner = sub(mul(h(k + 2), square(h(k - 1)), l), mul(h(k - 2), square(h(k + 1)), l), l);
      out = mul(h(k), inner, l);
    }
    return memo_[n] = std::move(out);
  }

 private:
  Poly square(const Poly& a) { return mul(a, a, l_); }
  Poly cube(const Poly& a) { return mul(square(a), a, l_); }

  u64 l_;
  Poly f_, f2_;
  std::map<u64, Poly> memo_;
};

}  // namespace

bool full_p_torsion_rational(const CurveData& e, u64 ell, u64 p) {
  if (!e.is_good(ell) || ell == p) throw Error(ErrorKind::BadPrime, "need ell not dividing p * disc");
  if (ell == 2) {
    // Tiny field: enumerate.
    ReducedCurve c(e, 2);
    u64 count = 0;
    for (u64 x = 0; x < 2; ++x)
      for (u64 y = 0; y < 2; ++y)
        if (c.contains({x, y, false}) && c.multiply({x, y, false}, p).infinity) ++count;
    return count + 1 == p * p;
  }
  DivisionPolynomials dp(e, ell);
  const Poly xpoly{0, 1};
  if (p == 2) {
    Poly g = gcd_poly(dp.f(), sub(powmod_poly(xpoly, ell, dp.f(), ell), xpoly, ell), ell);
    return g.size() == 4;
  }
  Poly psi = dp.h(p);
  const u64 inv = static_cast<u64>(invmod(static_cast<i64>(psi.back()), static_cast<i64>(ell)));
  for (auto& c : psi) c = mulmod(c, inv, ell);
  Poly g = gcd_poly(psi, sub(powmod_poly(xpoly, ell, psi, ell), xpoly, ell), ell);
  if (g.size() - 1 != (p * p - 1) / 2) return false;
  // Every root x0 must give rational y: F(x0) a square, i.e. F^((ell-1)/2) = 1 mod psi.
  return powmod_poly(dp.f(), (ell - 1) / 2, psi, ell) == Poly{1};
}

std::string to_string(TorsionShape s) {
  switch (s) {
    case TorsionShape::Trivial: return "trivial";
    case TorsionShape::Cyclic: return "cyclic";
    case TorsionShape::FullRank2: return "full";
  }
  return "trivial";
}

TorsionStructure p_torsion_structure(const CurveData& e, u64 ell, u64 p, u64 seed, bool allow_fallback) {
  if (!is_prime(p)) throw Error(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
  if (!e.is_good(ell) || ell == p) throw Error(ErrorKind::BadPrime, "need ell not dividing p * disc");
  const u64 n = count_points(e, ell);
  TorsionStructure t;
  t.valuation = valuation(n, p);
  if (t.valuation == 0) return t;
  t.shape = TorsionShape::Cyclic;
  if (t.valuation == 1) return t;

  ReducedCurve c(e, ell);
  std::mt19937_64 rng(seed);
  const u64 cofactor = n / ipow(p, t.valuation);
  std::vector<Point> found;
  for (int i = 0; i < 32; ++i) {
    Point q = c.multiply(c.random_point(rng), cofactor);
    if (q.infinity) continue;
    for (Point next = c.multiply(q, p); !next.infinity; next = c.multiply(q, p)) q = next;
    // q has order p now.
    if (found.empty()) {
      found.push_back(q);
      continue;
    }
    bool in_span = false;
    Point m;
    for (u64 k = 0; k < p && !in_span; ++k) {
      in_span = m == q;
      m = c.add(m, found[0]);
    }
    if (!in_span) {
      t.shape = TorsionShape::FullRank2;
      return t;
    }
  }
  if (allow_fallback) {
    t.used_fallback = true;
    if (full_p_torsion_rational(e, ell, p)) t.shape = TorsionShape::FullRank2;
  }
  return t;
}

}  // namespace kurihara
