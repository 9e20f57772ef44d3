#include "kurihara/kolyvagin.hpp"

#include "kurihara/mazurtate.hpp"
#include "kurihara/parallel.hpp"

#include "json.hpp"

#include <cmath>

namespace kurihara {

DiscreteLog::DiscreteLog(u64 ell, u64 base, u64 order) : ell_(ell), base_(base % ell), order_(order) {
  if (order == 0 || powmod(base_, order, ell) != 1) {
    throw Error(ErrorKind::InvalidArgument, std::to_string(base) + " does not have order dividing " +
                                                std::to_string(order) + " mod " + std::to_string(ell));
  }
  if (ell <= kDlogTableLimit) {
    table_.assign(ell, static_cast<std::uint32_t>(order));
    u64 x = 1;
    for (u64 k = 0; k < order; ++k) {
      table_[x] = static_cast<std::uint32_t>(k);
      x = mulmod(x, base_, ell);
    }
    return;
  }
  m_ = static_cast<u64>(std::ceil(std::sqrt(static_cast<long double>(order))));
  baby_.reserve(m_);
  u64 x = 1;
  for (u64 j = 0; j < m_; ++j) {
    baby_.emplace(x, j);
    x = mulmod(x, base_, ell);
  }
  giant_step_ = powmod(static_cast<u64>(invmod(static_cast<i64>(base_), static_cast<i64>(ell))), m_, ell);
}

u64 DiscreteLog::operator()(i64 a) const {
  const u64 r = static_cast<u64>(floor_mod(a, static_cast<i64>(ell_)));
  if (r == 0) throw Error(ErrorKind::NotAUnit, std::to_string(a) + " is divisible by " + std::to_string(ell_));
  if (!table_.empty()) {
    if (table_[r] == order_) {
      throw Error(ErrorKind::InvalidArgument, std::to_string(a) + " is not a power of " + std::to_string(base_));
    }
    return table_[r];
  }
  u64 gamma = r;
  for (u64 i = 0; i <= m_; ++i) {
    auto it = baby_.find(gamma);
    if (it != baby_.end()) {
      const u64 k = i * m_ + it->second;
      if (k < order_) return k;
    }
    gamma = mulmod(gamma, giant_step_, ell_);
  }
  throw Error(ErrorKind::InvalidArgument, std::to_string(a) + " is not a power of " + std::to_string(base_));
}

namespace {

bool is_primitive_root(u64 h, u64 ell) {
  if (h % ell == 0) return false;
  for (auto [q, k] : factor(ell - 1)) {
    (void)k;
    if (powmod(h, (ell - 1) / q, ell) == 1) return false;
  }
  return true;
}

}  // namespace

KolyvaginPrime KolyvaginPrime::with_generator(u64 h) const {
  if (!is_primitive_root(h % ell, ell)) {
    throw Error(ErrorKind::InvalidArgument, std::to_string(h) + " is not a primitive root mod " + std::to_string(ell));
  }
  KolyvaginPrime r = *this;
  r.generator = h % ell;
  r.log = std::make_shared<const DiscreteLog>(ell, r.generator, ell - 1);
  return r;
}

KolyvaginPrime make_kolyvagin_prime(const CurveData& e, u64 ell, u64 p, u64 generator) {
  if (!is_prime(ell)) throw Error(ErrorKind::InvalidArgument, std::to_string(ell) + " is not prime");
  KolyvaginPrime k;
  k.ell = ell;
  k.p = p;
  k.p_valuation = valuation(ell - 1, p);
  k.points = static_cast<u64>(static_cast<i64>(ell) + 1 - e.ap(ell));
  return k.with_generator(generator == 0 ? primitive_root(ell) : generator);
}

bool is_kolyvagin_prime(const CurveData& e, u64 ell, u64 p, int m, int n) {
  if (!is_prime(ell) || ell == p || e.conductor() % ell == 0 || !e.is_good(ell)) return false;
  if ((ell - 1) % ipow(p, std::max(m, n + 1)) != 0) return false;
  const u64 points = static_cast<u64>(static_cast<i64>(ell) + 1 - e.ap(ell));
  if (valuation(points, p) < m) return false;
  return p_torsion_structure(e, ell, p).shape != TorsionShape::FullRank2;
}

std::vector<KolyvaginPrime> sieve(const CurveData& e, u64 p, int m, int n, u64 bound, unsigned workers) {
  const auto report = check_hypotheses(e, p);
  if (!report.passes()) {
    throw Error(ErrorKind::HypothesisViolation, "hypotheses fail for " + e.label() + " at p = " + std::to_string(p));
  }
  if (m < 1 || n < 0) throw Error(ErrorKind::InvalidArgument, "need m >= 1 and n >= 0");
  const u64 step = ipow(p, std::max(m, n + 1));
  std::vector<u64> candidates;
  for (u64 ell = step + 1; ell <= bound; ell += step)
    if (is_prime(ell)) candidates.push_back(ell);
  std::vector<char> keep(candidates.size(), 0);
  parallel_for(candidates.size(), workers, [&](std::size_t i) { keep[i] = is_kolyvagin_prime(e, candidates[i], p, m, n); });
  std::vector<KolyvaginPrime> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) out.push_back(make_kolyvagin_prime(e, candidates[i], p));
  return out;
}

std::string_view to_string(Route r) {
  switch (r) {
    case Route::Direct: return "direct";
    case Route::ViaEd: return "via_ed";
    case Route::DerivativeOracle: return "derivative_oracle";
  }
  return "?";
}

Kurihara::Kurihara(const EigenSymbol& symbol, u64 p, int m, const std::vector<KolyvaginPrime>& primes)
    : symbol_(&symbol), p_(p), m_(m), pm_(ipow(p, m)), unit_(Zpm::one(p, m)) {
  if (auto u = symbol.calibration_unit()) {
    try {
      unit_ = reduce(*u, p, m);
    } catch (const Error&) {
      throw Error(ErrorKind::DenominatorDivisibleByP, "calibration unit " + to_string(*u) + " is not p-integral");
    }
  }
  for (const auto& k : primes) {
    if (k.p != p) throw Error(ErrorKind::InvalidArgument, "Kolyvagin prime built for a different p");
    primes_.emplace(k.ell, k);
  }
}

Kurihara Kurihara::with_generators(const std::map<u64, u64>& generators) const {
  Kurihara r = *this;
  for (auto [ell, h] : generators) {
    auto it = r.primes_.find(ell);
    if (it == r.primes_.end()) throw Error(ErrorKind::PrimeNotKolyvagin, std::to_string(ell) + " is not in the sieve");
    it->second = it->second.with_generator(h);
  }
  return r;
}

std::vector<u64> Kurihara::factors_of(u64 d) const {
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "d must be positive");
  if (!is_squarefree(d)) throw Error(ErrorKind::NotSquarefree, std::to_string(d) + " is not squarefree");
  std::vector<u64> out;
  for (auto [ell, k] : factor(d)) {
    (void)k;
    auto it = primes_.find(ell);
    if (it == primes_.end() || (ell - 1) % pm_ != 0) {
      throw Error(ErrorKind::PrimeNotKolyvagin, std::to_string(ell) + " is not a Kolyvagin prime for this run");
    }
    out.push_back(ell);
  }
  return out;
}

u64 Kurihara::e_d(u64 d) const {
  u64 r = 1;
  for (u64 ell : factors_of(d)) r *= (ell - 1) / primes_.at(ell).p_part();
  return r;
}

Zpm Kurihara::theta_coefficient(i64 a, u64 d) const {
  return Zpm(symbol_->eval_raw(a, static_cast<i64>(d)), p_, m_) * unit_;
}

KuriharaNumber Kurihara::direct(u64 d) const {
  const auto ells = factors_of(d);
  Zpm sum = Zpm::zero(p_, m_);
  for (u64 a = 1; a <= d; ++a) {
    if (std::gcd(a, d) != 1) continue;
    Zpm term = theta_coefficient(static_cast<i64>(a), d);
    for (u64 ell : ells) {
      if (term.is_zero()) break;
      term *= Zpm(static_cast<i64>(primes_.at(ell).dlog(static_cast<i64>(a)) % pm_), p_, m_);
    }
    sum += term;
  }
  return {d, ells, sum, Route::Direct};
}

KuriharaNumber Kurihara::via_ed(u64 d) const {
  const auto ells = factors_of(d);
  const u64 ed = e_d(d);
  auto units = unit_group(d);
  const ResidueGroupRing theta = theta_mod(*symbol_, d, p_, m_);

  // Gal(Q(d)/Q) realised as the p-Sylow subgroups, sigma_a -> sigma_a^{e_d}, with
  // coordinates log_{g_ell} for g_ell = h_ell^{e_d}.
  std::vector<u64> orders;
  std::vector<DiscreteLog> sylow_logs;
  for (u64 ell : ells) {
    const auto& k = primes_.at(ell);
    orders.push_back(k.p_part());
    sylow_logs.emplace_back(ell, powmod(k.generator, ed, ell), k.p_part());
  }
  const AbelianGroup quotient(orders);
  std::vector<std::size_t> image(units->size());
  std::vector<u64> coords(ells.size());
  for (std::size_t i = 0; i < units->size(); ++i) {
    const u64 a = units->residue(i);
    for (std::size_t j = 0; j < ells.size(); ++j) coords[j] = sylow_logs[j](static_cast<i64>(powmod(a % ells[j], ed, ells[j])));
    image[i] = quotient.index(coords);
  }
  const ResidueGroupRing projected = projection_map(theta, Surjection(units->group(), quotient, std::move(image)));

  // log_{h_ell}(g_ell^j) = e_d j, so the sum below is e_d^{nu(d)} delta~_d.
  Zpm sum = Zpm::zero(p_, m_);
  for (std::size_t s = 0; s < quotient.size(); ++s) {
    if (projected[s].is_zero()) continue;
    const auto t = quotient.tuple(s);
    Zpm term = projected[s];
    for (std::size_t j = 0; j < ells.size(); ++j) term *= Zpm(static_cast<i64>(mulmod(ed, t[j], pm_)), p_, m_);
    sum += term;
  }
  Zpm ed_pow = Zpm::one(p_, m_);
  for (std::size_t j = 0; j < ells.size(); ++j) ed_pow *= Zpm(static_cast<i64>(ed % pm_), p_, m_);
  return {d, ells, sum * ed_pow.inverse(), Route::ViaEd};
}

DerivativeResult Kurihara::derivative_oracle(u64 d) const {
  const auto ells = factors_of(d);
  const u64 ed = e_d(d);
  auto units = unit_group(d);
  const ResidueGroupRing theta = theta_mod(*symbol_, d, p_, m_);

  // Natural quotient (Z/ell)^* -> Z/p^v sending h_ell to 1; g_ell is then e_d.
  std::vector<u64> orders;
  for (u64 ell : ells) orders.push_back(primes_.at(ell).p_part());
  const AbelianGroup quotient(orders);
  std::vector<std::size_t> image(units->size());
  std::vector<u64> coords(ells.size());
  for (std::size_t i = 0; i < units->size(); ++i) {
    for (std::size_t j = 0; j < ells.size(); ++j)
      coords[j] = primes_.at(ells[j]).dlog(static_cast<i64>(units->residue(i))) % orders[j];
    image[i] = quotient.index(coords);
  }
  ResidueGroupRing x = projection_map(theta, Surjection(units->group(), quotient, std::move(image)));
  const ResidueGroupRing projected = x;

  const Zpm zero = Zpm::zero(p_, m_);
  for (std::size_t j = 0; j < ells.size(); ++j) {
    ResidueGroupRing dl(quotient, zero);
    std::vector<u64> t(ells.size(), 0);
    for (u64 i = 0; i < orders[j]; ++i) {
      t[j] = mulmod(i, ed, orders[j]);
      dl[quotient.index(t)] += Zpm(static_cast<i64>(i % pm_), p_, m_);
    }
    x = dl * x;
  }

  DerivativeResult r;
  r.coefficient = x[0];
  r.norm_multiple = true;
  for (std::size_t s = 0; s < x.size(); ++s) r.norm_multiple = r.norm_multiple && x[s] == x[0];

  Zpm rhs = zero;
  for (std::size_t s = 0; s < quotient.size(); ++s) {
    if (projected[s].is_zero()) continue;
    const auto t = quotient.tuple(s);
    Zpm term = projected[s];
    for (std::size_t j = 0; j < ells.size(); ++j) {
      const u64 log_g = mulmod(t[j], static_cast<u64>(invmod(static_cast<i64>(ed % orders[j]), static_cast<i64>(orders[j]))), orders[j]);
      term *= Zpm(static_cast<i64>(log_g % pm_), p_, m_);
    }
    rhs += term;
  }
  if (ells.size() % 2 == 1) rhs = -rhs;
  r.leading_identity = r.norm_multiple && r.coefficient == rhs;
  return r;
}

std::string row_json(const KuriharaNumber& k, bool routes_agree, const std::map<u64, KolyvaginPrime>& primes) {
  nlohmann::ordered_json j;
  j["d"] = k.d;
  j["factors"] = k.factors;
  j["delta"] = k.value.value();
  j["routes_agree"] = routes_agree;
  nlohmann::ordered_json g = nlohmann::ordered_json::object();
  for (u64 ell : k.factors) g[std::to_string(ell)] = primes.at(ell).generator;
  j["generators"] = g;
  return j.dump();
}

}  // namespace kurihara
