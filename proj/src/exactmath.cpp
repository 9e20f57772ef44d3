#include "kurihara/exactmath.hpp"

#include "kurihara/linalg.hpp"

#include "json.hpp"

namespace kurihara {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0) throw Error(ErrorKind::InvalidArgument, "bad rational '" + s + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

Zpm::Zpm(i64 value, u64 prime, int exponent)
    : modulus_(ipow(prime, exponent)), prime_(prime), exponent_(exponent) {
  if (exponent < 1 || !is_prime(prime)) {
    throw Error(ErrorKind::InvalidArgument, "Z/p^m needs a prime p and m >= 1");
  }
  value_ = static_cast<u64>(floor_mod(value, static_cast<i64>(modulus_)));
}

void Zpm::check(const Zpm& o) const {
  if (modulus_ != o.modulus_) {
    throw Error(ErrorKind::MismatchedRing, "Z/" + std::to_string(modulus_) + " vs Z/" +
                                               std::to_string(o.modulus_));
  }
}

Zpm Zpm::operator+(const Zpm& o) const {
  check(o);
  Zpm r = *this;
  r.value_ = (value_ + o.value_) % modulus_;
  return r;
}

Zpm Zpm::operator-(const Zpm& o) const {
  check(o);
  Zpm r = *this;
  r.value_ = (value_ + modulus_ - o.value_) % modulus_;
  return r;
}

Zpm Zpm::operator*(const Zpm& o) const {
  check(o);
  Zpm r = *this;
  r.value_ = mulmod(value_, o.value_, modulus_);
  return r;
}

Zpm Zpm::operator-() const {
  Zpm r = *this;
  r.value_ = (modulus_ - value_) % modulus_;
  return r;
}

Zpm Zpm::inverse() const {
  if (!is_unit()) throw Error(ErrorKind::NotInvertible, std::to_string(value_) + " is not a unit");
  Zpm r = *this;
  r.value_ = static_cast<u64>(invmod(static_cast<i64>(value_), static_cast<i64>(modulus_)));
  return r;
}

Zpm reduce(const Rational& q, u64 prime, int exponent) {
  const u64 modulus = ipow(prime, exponent);
  Integer den = q.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), prime)) {
    throw Error(ErrorKind::DenominatorDivisibleByP,
                to_string(q) + " has denominator divisible by " + std::to_string(prime));
  }
  Integer num = q.get_num();
  u64 n = mpz_fdiv_ui(num.get_mpz_t(), modulus);
  u64 d = mpz_fdiv_ui(den.get_mpz_t(), modulus);
  Zpm zn(static_cast<i64>(n), prime, exponent);
  Zpm zd(static_cast<i64>(d), prime, exponent);
  return zn * zd.inverse();
}

std::string coeff_to_json(const Rational& q) { return "\"" + to_string(q) + "\""; }
std::string coeff_to_json(const Zpm& z) { return std::to_string(z.value()); }

AbelianGroup::AbelianGroup(std::vector<u64> orders) : orders_(std::move(orders)) {
  strides_.assign(orders_.size(), 1);
  size_ = 1;
  for (std::size_t i = orders_.size(); i-- > 0;) {
    if (orders_[i] == 0) throw Error(ErrorKind::InvalidArgument, "cyclic factor of order 0");
    strides_[i] = size_;
    size_ *= orders_[i];
  }
}

std::size_t AbelianGroup::index(std::span<const u64> tuple) const {
  if (tuple.size() != orders_.size()) throw Error(ErrorKind::MismatchedGroup, "tuple length");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) idx += (tuple[i] % orders_[i]) * strides_[i];
  return idx;
}

std::vector<u64> AbelianGroup::tuple(std::size_t index) const {
  std::vector<u64> t(orders_.size());
  for (std::size_t i = 0; i < orders_.size(); ++i) t[i] = (index / strides_[i]) % orders_[i];
  return t;
}

std::size_t AbelianGroup::add(std::size_t a, std::size_t b) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    u64 x = (a / strides_[i]) % orders_[i];
    u64 y = (b / strides_[i]) % orders_[i];
    idx += ((x + y) % orders_[i]) * strides_[i];
  }
  return idx;
}

std::size_t AbelianGroup::negate(std::size_t a) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    u64 x = (a / strides_[i]) % orders_[i];
    idx += ((orders_[i] - x) % orders_[i]) * strides_[i];
  }
  return idx;
}

Surjection::Surjection(AbelianGroup source, AbelianGroup target, std::vector<std::size_t> image)
    : source_(std::move(source)), target_(std::move(target)), image_(std::move(image)) {
  if (image_.size() != source_.size() || source_.size() % target_.size() != 0) {
    throw Error(ErrorKind::NotASurjection, "image table has the wrong shape");
  }
  std::vector<std::size_t> fiber(target_.size(), 0);
  for (std::size_t h : image_) {
    if (h >= target_.size()) throw Error(ErrorKind::NotASurjection, "image out of range");
    ++fiber[h];
  }
  const std::size_t k = source_.size() / target_.size();
  for (std::size_t c : fiber) {
    if (c != k) throw Error(ErrorKind::NotASurjection, "fibers are not of equal size");
  }
  if (image_[source_.identity()] != target_.identity()) {
    throw Error(ErrorKind::NotASurjection, "identity does not map to identity");
  }
  // Homomorphism check against the cyclic generators of the source.
  for (std::size_t i = 0; i < source_.rank(); ++i) {
    std::vector<u64> t(source_.rank(), 0);
    t[i] = 1;
    const std::size_t gen = source_.index(t);
    for (std::size_t g = 0; g < source_.size(); ++g) {
      if (image_[source_.add(g, gen)] != target_.add(image_[g], image_[gen])) {
        throw Error(ErrorKind::NotASurjection, "image table is not a homomorphism");
      }
    }
  }
}

ResidueGroupRing group_ring_inverse(const ResidueGroupRing& x) {
  const auto& g = x.group();
  const std::size_t n = g.size();
  const Zpm zero = x.zero_value();
  ResidueMatrix mult(n, n, zero);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t a = 0; a < n; ++a) mult(g.add(a, h), h) += x[a];
  ResidueMatrix inv = inverse(mult);
  ResidueGroupRing y(g, zero);
  for (std::size_t h = 0; h < n; ++h) y[h] = inv(h, g.identity());
  return y;
}

namespace {

template <typename T, typename Parse>
GroupRingElement<T> from_json_impl(const std::string& text, T zero, Parse parse) {
  auto j = nlohmann::json::parse(text);
  AbelianGroup g(j.at("group").get<std::vector<u64>>());
  GroupRingElement<T> x(g, zero);
  for (const auto& entry : j.at("coeffs")) {
    auto t = entry.at(0).get<std::vector<u64>>();
    x[g.index(t)] = parse(entry.at(1));
  }
  return x;
}

}  // namespace

RationalGroupRing rational_group_ring_from_json(const std::string& text) {
  return from_json_impl<Rational>(text, Rational(0), [](const nlohmann::json& v) {
    return v.is_string() ? parse_rational(v.get<std::string>()) : Rational(v.get<long>());
  });
}

ResidueGroupRing residue_group_ring_from_json(const std::string& text, u64 prime, int exponent) {
  return from_json_impl<Zpm>(text, Zpm::zero(prime, exponent), [&](const nlohmann::json& v) {
    return Zpm(v.get<i64>(), prime, exponent);
  });
}

}  // namespace kurihara
