#include "kurihara/mazurtate.hpp"

namespace kurihara {

namespace {

constexpr u64 kMaxModulus = 20000000;

struct CyclicFactor {
  u64 prime_power;  // modulus of the CRT component
  u64 generator;
  u64 order;
};

u64 primitive_root_prime_power(u64 q, int k) {
  u64 g = primitive_root(q);
  if (k >= 2 && powmod(g, q - 1, q * q) == 1) g += q;
  return g;
}

}  // namespace

UnitGroup::UnitGroup(u64 modulus) : modulus_(modulus) {
  if (modulus == 0 || modulus > kMaxModulus) {
    throw Error(ErrorKind::InvalidArgument, "unit group modulus out of range: " + std::to_string(modulus));
  }
  std::vector<CyclicFactor> factors;
  std::vector<u64> component_moduli;
  for (auto [q, k] : factor(modulus)) {
    const u64 qk = ipow(q, k);
    component_moduli.push_back(qk);
    if (q == 2) {
      if (k == 1) continue;  // (Z/2)^* is trivial but still a CRT component
      factors.push_back({qk, qk - 1, 2});
      if (k >= 3) factors.push_back({qk, 5, qk / 4});
    } else {
      factors.push_back({qk, primitive_root_prime_power(q, k), qk / q * (q - 1)});
    }
  }
  std::vector<u64> orders;
  for (const auto& f : factors) orders.push_back(f.order);
  group_ = AbelianGroup(orders);

  // CRT idempotents for each prime-power component.
  std::vector<u64> idempotent;
  for (u64 qk : component_moduli) {
    const u64 rest = modulus / qk;
    const u64 inv = static_cast<u64>(invmod(static_cast<i64>(rest % qk), static_cast<i64>(qk)));
    idempotent.push_back(mulmod(rest, inv, modulus));
  }

  residues_.resize(group_.size());
  index_of_.assign(modulus, std::uint32_t(-1));
  for (std::size_t i = 0; i < group_.size(); ++i) {
    const auto t = group_.tuple(i);
    u64 r = 0;
    std::size_t fi = 0;
    for (std::size_t c = 0; c < component_moduli.size(); ++c) {
      const u64 qk = component_moduli[c];
      u64 comp = 1 % qk;
      while (fi < factors.size() && factors[fi].prime_power == qk) {
        comp = mulmod(comp, powmod(factors[fi].generator, t[fi], qk), qk);
        ++fi;
      }
      r = (r + mulmod(comp, idempotent[c], modulus)) % modulus;
    }
    residues_[i] = r;
    index_of_[r] = static_cast<std::uint32_t>(i);
  }
}

std::size_t UnitGroup::index_of(i64 a) const {
  const u64 r = static_cast<u64>(floor_mod(a, static_cast<i64>(modulus_)));
  const std::uint32_t i = index_of_[r];
  if (i == std::uint32_t(-1)) {
    throw Error(ErrorKind::NotCoprime, std::to_string(a) + " is not a unit mod " + std::to_string(modulus_));
  }
  return i;
}

std::shared_ptr<const UnitGroup> unit_group(u64 modulus) {
  static std::mutex mutex;
  static std::map<u64, std::shared_ptr<const UnitGroup>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(modulus);
    if (it != cache.end()) return it->second;
  }
  auto g = std::make_shared<const UnitGroup>(modulus);
  std::lock_guard lock(mutex);
  return cache.emplace(modulus, g).first->second;
}

std::shared_ptr<const Surjection> restriction(u64 from, u64 to) {
  if (to == 0 || from % to != 0) {
    throw Error(ErrorKind::NotASurjection, std::to_string(to) + " does not divide " + std::to_string(from));
  }
  static std::mutex mutex;
  static std::map<std::pair<u64, u64>, std::shared_ptr<const Surjection>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({from, to});
    if (it != cache.end()) return it->second;
  }
  auto g = unit_group(from), h = unit_group(to);
  std::vector<std::size_t> image(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) image[i] = h->index_of(static_cast<i64>(g->residue(i) % to));
  auto s = std::make_shared<const Surjection>(g->group(), h->group(), std::move(image));
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(from, to), s).first->second;
}

UnitRoot unit_root(const CurveData& e, u64 p, int m) {
  const i64 ap = e.ap(p);
  if (floor_mod(ap, static_cast<i64>(p)) == 0) {
    throw Error(ErrorKind::Supersingular, "a_" + std::to_string(p) + " = " + std::to_string(ap) + " is divisible by p");
  }
  const Zpm a(ap, p, m), pp(static_cast<i64>(p), p, m);
  Zpm x = a;
  for (int i = 0; i < m + 1; ++i) {
    const Zpm f = x * x - a * x + pp;
    const Zpm df = x + x - a;
    x = x - f * df.inverse();
  }
  return {p, m, x, a - x};
}

MazurTate::MazurTate(const CurveData& e, const EigenSymbol& symbol, u64 p, int m)
    : e_(e), symbol_(symbol), p_(p), m_(m), root_(unit_root(e, p, m)) {
  if (p < 3 || !is_prime(p)) throw Error(ErrorKind::InvalidArgument, "p must be an odd prime");
  if (!e.is_good(p)) throw Error(ErrorKind::BadPrime, std::to_string(p) + " divides the discriminant");
}

RationalGroupRing MazurTate::theta_rational(u64 modulus) const {
  auto g = unit_group(modulus);
  RationalGroupRing x(g->group(), Rational(0));
  for (std::size_t i = 0; i < g->size(); ++i) x[i] = symbol_.eval_plus(static_cast<i64>(g->residue(i)), static_cast<i64>(modulus));
  return x;
}

ResidueGroupRing theta_mod(const EigenSymbol& symbol, u64 modulus, u64 p, int m) {
  auto g = unit_group(modulus);
  Zpm unit = Zpm::one(p, m);
  if (auto u = symbol.calibration_unit()) {
    try {
      unit = reduce(*u, p, m);
    } catch (const Error&) {
      throw Error(ErrorKind::DenominatorDivisibleByP,
                  "theta~ at level " + std::to_string(modulus) + ": calibration unit " + to_string(*u) +
                      " is not p-integral");
    }
  }
  ResidueGroupRing x(g->group(), Zpm::zero(p, m));
  for (std::size_t i = 0; i < g->size(); ++i) {
    x[i] = Zpm(symbol.eval_raw(static_cast<i64>(g->residue(i)), static_cast<i64>(modulus)), p, m) * unit;
  }
  return x;
}

void MazurTate::check_level(u64 d) const {
  if (d == 0 || d % p_ == 0) throw Error(ErrorKind::InvalidArgument, "d must be positive and prime to p");
}

ResidueGroupRing MazurTate::project(const ResidueGroupRing& x, u64 from, u64 to) const {
  return projection_map(x, *restriction(from, to));
}

ResidueGroupRing MazurTate::lift(const ResidueGroupRing& x, u64 from, u64 to) const {
  return norm_map(x, *restriction(from, to));
}

ResidueGroupRing MazurTate::bottom_factor(u64 d) const {
  check_level(d);
  auto g = unit_group(d);
  const std::size_t s = g->index_of(static_cast<i64>(p_ % d));
  const Zpm ainv = root_.alpha.inverse();
  auto f1 = ResidueGroupRing::monomial(g->group(), 0, one(), zero());
  f1[s] -= ainv;
  auto f2 = ResidueGroupRing::monomial(g->group(), 0, one(), zero());
  f2[g->group().negate(s)] -= ainv;
  return f1 * f2;
}

ResidueGroupRing MazurTate::vartheta(u64 d, int n) const {
  check_level(d);
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
  if (n == 0) return bottom_factor(d) * theta_mod(d);
  const u64 level = d * ipow(p_, n), below = level / p_;
  const Zpm ainv = root_.alpha.inverse();
  ResidueGroupRing t = theta_mod(level) - lift(theta_mod(below), level, below).scaled(ainv);
  Zpm scale = one();
  for (int i = 0; i < n; ++i) scale *= ainv;
  return t.scaled(scale);
}

std::size_t MazurTate::sigma(u64 ell, u64 d, int n) const {
  const u64 level = d * ipow(p_, n);
  auto g = unit_group(level);
  if (d % ell != 0) return g->index_of(static_cast<i64>(ell % level));
  const u64 rest = level / ell;
  // b = ell mod rest, b = 1 mod ell.
  const i64 inv = invmod(static_cast<i64>(rest % ell), static_cast<i64>(ell));
  const i64 t = floor_mod(1 - static_cast<i64>(ell % rest), static_cast<i64>(ell));
  const u64 b = (ell % rest + rest * static_cast<u64>(floor_mod(t * inv, static_cast<i64>(ell)))) % level;
  return g->index_of(static_cast<i64>(b));
}

ResidueGroupRing MazurTate::xi(u64 d, int n) const {
  check_level(d);
  if (!is_squarefree(d)) throw Error(ErrorKind::NotSquarefree, std::to_string(d) + " is not squarefree");
  std::vector<u64> ells;
  for (auto [q, k] : factor(d)) {
    (void)k;
    ells.push_back(q);
  }
  const u64 pn = ipow(p_, n), level = d * pn;
  ResidueGroupRing total(unit_group(level)->group(), zero());
  std::size_t terms = 0;
  for (u64 mask = 0; mask < (u64(1) << ells.size()); ++mask) {
    u64 e = 1;
    for (std::size_t i = 0; i < ells.size(); ++i)
      if (mask >> i & 1) e *= ells[i];
    ResidueGroupRing a = vartheta(e, n);
    const auto& g = unit_group(e * pn)->group();
    for (std::size_t i = 0; i < ells.size(); ++i) {
      if (mask >> i & 1) continue;
      a = a.translated(g.negate(sigma(ells[i], e, n))).scaled(-one());
    }
    total += lift(a, level, e * pn);
    ++terms;
  }
  last_terms_ = terms;
  return total;
}

ResidueGroupRing MazurTate::xi_tilde(u64 d, int n) const {
  ResidueGroupRing x = xi(d, n);
  const auto& g = unit_group(d * ipow(p_, n))->group();
  for (auto [ell, k] : factor(d)) {
    (void)k;
    if (ell % p_ == 0) throw Error(ErrorKind::NonInvertibleEll, std::to_string(ell) + " is not a unit mod p");
    const Zpm c = (-Zpm(static_cast<i64>(ell), p_, m_)).inverse();
    x = x.translated(g.negate(sigma(ell, d, n))).scaled(c);
  }
  return x;
}

ResidueGroupRing MazurTate::polynomial_at(const std::array<Zpm, 3>& c, u64 modulus, std::size_t g) const {
  const auto& grp = unit_group(modulus)->group();
  ResidueGroupRing x(grp, zero());
  x[grp.add(g, g)] += c[0];
  x[g] += c[1];
  x[0] += c[2];
  return x;
}

}  // namespace kurihara
