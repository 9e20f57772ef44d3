#pragma once

// Exact arithmetic substrate: rationals, Z/p^m, finite abelian groups given as
// products of cyclic groups, and group rings over either coefficient ring.

#include "kurihara/arith.hpp"
#include "kurihara/error.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kurihara {

using Integer = mpz_class;
using Rational = mpq_class;

/// "num/den" (or "num" when den == 1).
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);

/// Element of Z/p^m with p prime. The modulus is carried by every element;
/// mixing moduli throws MismatchedRing.
class Zpm {
 public:
  Zpm() = default;
  Zpm(i64 value, u64 prime, int exponent);

  static Zpm zero(u64 prime, int exponent) { return Zpm(0, prime, exponent); }
  static Zpm one(u64 prime, int exponent) { return Zpm(1, prime, exponent); }

  u64 value() const { return value_; }
  u64 modulus() const { return modulus_; }
  u64 prime() const { return prime_; }
  int exponent() const { return exponent_; }

  bool is_zero() const { return value_ == 0; }
  bool is_unit() const { return value_ % prime_ != 0; }
  Zpm inverse() const;
  Zpm make(i64 v) const { return Zpm(v, prime_, exponent_); }

  Zpm operator+(const Zpm& o) const;
  Zpm operator-(const Zpm& o) const;
  Zpm operator*(const Zpm& o) const;
  Zpm operator-() const;
  Zpm& operator+=(const Zpm& o) { return *this = *this + o; }
  Zpm& operator-=(const Zpm& o) { return *this = *this - o; }
  Zpm& operator*=(const Zpm& o) { return *this = *this * o; }
  bool operator==(const Zpm& o) const { return modulus_ == o.modulus_ && value_ == o.value_; }

 private:
  void check(const Zpm& o) const;

  u64 value_ = 0;
  u64 modulus_ = 1;
  u64 prime_ = 1;
  int exponent_ = 0;
};

/// Reduce a rational with denominator prime to p into Z/p^m.
/// Throws DenominatorDivisibleByP otherwise.
Zpm reduce(const Rational& q, u64 prime, int exponent);

// Ring helpers so the group ring can be generic over both coefficient types.
inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(const Zpm& z) { return z.is_zero(); }
inline bool same_ring(const Rational&, const Rational&) { return true; }
inline bool same_ring(const Zpm& a, const Zpm& b) { return a.modulus() == b.modulus(); }
inline Rational from_int(const Rational&, i64 v) { return Rational(static_cast<long>(v)); }
inline Zpm from_int(const Zpm& like, i64 v) { return like.make(v); }
std::string coeff_to_json(const Rational& q);
std::string coeff_to_json(const Zpm& z);

/// Finite abelian group Z/n_1 x ... x Z/n_k. Elements are addressed either by
/// coordinate tuples or by a flat mixed-radix index.
class AbelianGroup {
 public:
  AbelianGroup() = default;
  explicit AbelianGroup(std::vector<u64> orders);

  const std::vector<u64>& orders() const { return orders_; }
  std::size_t size() const { return size_; }
  std::size_t rank() const { return orders_.size(); }

  std::size_t index(std::span<const u64> tuple) const;
  std::vector<u64> tuple(std::size_t index) const;
  std::size_t add(std::size_t a, std::size_t b) const;
  std::size_t negate(std::size_t a) const;
  std::size_t identity() const { return 0; }

  bool operator==(const AbelianGroup& o) const { return orders_ == o.orders_; }

 private:
  std::vector<u64> orders_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// A homomorphism G -> H recorded as an image table. Construction verifies
/// that it is a surjective homomorphism with fibers of equal size.
class Surjection {
 public:
  Surjection(AbelianGroup source, AbelianGroup target, std::vector<std::size_t> image);

  const AbelianGroup& source() const { return source_; }
  const AbelianGroup& target() const { return target_; }
  std::size_t operator()(std::size_t g) const { return image_[g]; }
  std::size_t kernel_size() const { return source_.size() / target_.size(); }

 private:
  AbelianGroup source_;
  AbelianGroup target_;
  std::vector<std::size_t> image_;
};

template <typename T>
class GroupRingElement {
 public:
  GroupRingElement(AbelianGroup group, T zero)
      : group_(std::move(group)), zero_(zero), coeffs_(group_.size(), zero) {}

  static GroupRingElement monomial(const AbelianGroup& g, std::size_t index, T coeff, T zero) {
    GroupRingElement x(g, zero);
    x.coeffs_[index] = coeff;
    return x;
  }

  const AbelianGroup& group() const { return group_; }
  const T& zero_value() const { return zero_; }
  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  T& operator[](std::size_t i) { return coeffs_[i]; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<T>& coefficients() const { return coeffs_; }

  bool is_zero() const {
    for (const auto& c : coeffs_) {
      if (!kurihara::is_zero(c)) return false;
    }
    return true;
  }

  std::size_t support_size() const {
    std::size_t n = 0;
    for (const auto& c : coeffs_) n += kurihara::is_zero(c) ? 0 : 1;
    return n;
  }

  T augmentation() const {
    T s = zero_;
    for (const auto& c : coeffs_) s += c;
    return s;
  }

  GroupRingElement& operator+=(const GroupRingElement& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  GroupRingElement& operator-=(const GroupRingElement& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  GroupRingElement operator+(const GroupRingElement& o) const {
    GroupRingElement r = *this;
    return r += o;
  }
  GroupRingElement operator-(const GroupRingElement& o) const {
    GroupRingElement r = *this;
    return r -= o;
  }
  GroupRingElement scaled(const T& s) const {
    GroupRingElement r = *this;
    for (auto& c : r.coeffs_) c *= s;
    return r;
  }

  /// Convolution product; cost is O(|supp x| * |G|).
  GroupRingElement operator*(const GroupRingElement& o) const {
    check(o);
    GroupRingElement r(group_, zero_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (kurihara::is_zero(coeffs_[i])) continue;
      for (std::size_t j = 0; j < o.coeffs_.size(); ++j) {
        if (kurihara::is_zero(o.coeffs_[j])) continue;
        r.coeffs_[group_.add(i, j)] += coeffs_[i] * o.coeffs_[j];
      }
    }
    return r;
  }

  /// Multiply by the group element g (translation of coefficients).
  GroupRingElement translated(std::size_t g) const {
    GroupRingElement r(group_, zero_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[group_.add(i, g)] = coeffs_[i];
    return r;
  }

  bool operator==(const GroupRingElement& o) const {
    return group_ == o.group_ && coeffs_ == o.coeffs_;
  }

  void check(const GroupRingElement& o) const {
    if (!(group_ == o.group_)) throw Error(ErrorKind::MismatchedGroup, "group ring operands differ");
    if (!same_ring(zero_, o.zero_)) throw Error(ErrorKind::MismatchedRing, "coefficient rings differ");
  }

 private:
  AbelianGroup group_;
  T zero_;
  std::vector<T> coeffs_;
};

using RationalGroupRing = GroupRingElement<Rational>;
using ResidueGroupRing = GroupRingElement<Zpm>;

/// Pushforward along a surjection: coefficient of h is the fiber sum.
template <typename T>
GroupRingElement<T> projection_map(const GroupRingElement<T>& x, const Surjection& s) {
  if (!(x.group() == s.source())) {
    throw Error(ErrorKind::NotASurjection, "element does not live on the surjection's source");
  }
  GroupRingElement<T> r(s.target(), x.zero_value());
  for (std::size_t g = 0; g < x.size(); ++g) r[s(g)] += x[g];
  return r;
}

/// Norm lift from a quotient H = G / K to G: sum over the kernel of any lift,
/// i.e. the coefficient of g is the coefficient of its image.
template <typename T>
GroupRingElement<T> norm_map(const GroupRingElement<T>& x, const Surjection& s) {
  if (!(x.group() == s.target())) {
    throw Error(ErrorKind::NotAQuotient, "element does not live on the declared quotient");
  }
  GroupRingElement<T> r(s.source(), x.zero_value());
  for (std::size_t g = 0; g < r.size(); ++g) r[g] = x[s(g)];
  return r;
}

/// Inverse in Z/p^m[G] by solving x * y = 1 as a |G| x |G| linear system.
/// Throws NotInvertible when x is not a unit.
ResidueGroupRing group_ring_inverse(const ResidueGroupRing& x);

/// Canonical JSON: {"group": [...], "coeffs": [[tuple, value], ...]} with only
/// nonzero coefficients, keys in lexicographic tuple order.
template <typename T>
std::string to_json(const GroupRingElement<T>& x) {
  std::string out = "{\"group\":[";
  const auto& orders = x.group().orders();
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(orders[i]);
  }
  out += "],\"coeffs\":[";
  bool first = true;
  // Flat index order is lexicographic in tuples (last coordinate fastest).
  for (std::size_t g = 0; g < x.size(); ++g) {
    if (is_zero(x[g])) continue;
    if (!first) out += ",";
    first = false;
    out += "[[";
    auto t = x.group().tuple(g);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(t[i]);
    }
    out += "]," + coeff_to_json(x[g]) + "]";
  }
  out += "]}";
  return out;
}

RationalGroupRing rational_group_ring_from_json(const std::string& text);
ResidueGroupRing residue_group_ring_from_json(const std::string& text, u64 prime, int exponent);

}  // namespace kurihara
