// Acceptance gate: one PASS/FAIL line per criterion.
// Usage: acceptance <data dir> <kurihara binary>

#include "kurihara/kolyvagin.hpp"
#include "kurihara/mazurtate.hpp"
#include "kurihara/paperlab.hpp"
#include "kurihara/search.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace kurihara;

namespace {

// Pinned tolerances and budgets.
constexpr long double kLValueTol = 1e-8L;
constexpr double kBudgetA = 10, kBudgetB = 60, kBudgetNorm = 600, kBudgetCoset = 300;

std::string g_data, g_cli;

struct Loaded {
  CurveData e;
  EigenSymbol symbol;
  CalibrationReport calibration;
};

Loaded load(const std::string& label) {
  CurveData e = CurveData::from_file(g_data + "/curves/" + label + ".json");
  ManinSpace space(e.conductor());
  EigenSymbol s = extract_eigensymbol(space, e);
  auto cal = calibrate(s, e);
  return {std::move(e), std::move(s), cal};
}

const Loaded& c11() {
  static const Loaded l = load("11a1");
  return l;
}
const Loaded& c37() {
  static const Loaded l = load("37a1");
  return l;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int run_cli(const std::string& args) {
  const int status = std::system((g_cli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string join(const std::vector<u64>& v) {
  std::string s;
  for (u64 x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return "{" + s + "}";
}

// All squarefree products of `ells` that are <= bound (1 included).
std::vector<u64> products(const std::vector<u64>& ells, u64 bound) {
  std::vector<u64> out{1};
  for (u64 ell : ells) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i)
      if (out[i] <= bound / ell) out.push_back(out[i] * ell);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- criteria --------------------------------------------------------------------

void golden_a(Outcome& o) {
  const auto& c = c11();
  const auto h = check_hypotheses(c.e, 7);
  o.require(h.ordinary && h.points_prime_to_p && h.tamagawa_prime_to_p && h.surjectivity != SurjectivityVerdict::Unknown,
            "hypotheses (a)-(c)");
  const long double ratio = c.calibration.l_value / c.calibration.omega;
  const long double err = std::fabs(ratio - 0.2L);
  o.require(err < kLValueTol, "L(E,1)/Omega = 1/5 to 1e-8");
  o.require(reconstruct_rational(ratio) == Rational(1, 5), "rational reconstruction 1/5");
  auto r = find_delta_minimal(c.e, c.symbol, 7, SearchOptions{});
  selmer_report(r);
  const Zpm delta1 = r.find(1)->value;
  o.require(!delta1.is_zero() && delta1.value() == 3, "delta_1 = 3 in F_7");
  o.require(r.delta_minimal == std::vector<u64>{1}, "delta-minimal {1}");
  o.require(r.selmer_dim == 0, "selmer_dim 0");
  const int w = root_number_fricke(c.symbol);
  o.require(w == 1 && parity_check(r, w) == Parity::Pass, "parity with w = +1");
  o.detail << "delta_1 = " << delta1.value() << " (unit " << to_string(*c.symbol.calibration_unit()) << ")"
           << ", L/Omega err " << static_cast<double>(err) << ", delta-minimal " << join(r.delta_minimal)
           << ", selmer_dim " << r.selmer_dim.value_or(-1) << ", w " << w;
}

void golden_b(Outcome& o) {
  const auto& c = c37();
  o.require(c.symbol.eval_raw(0, 1) == 0, "delta_1 = 0 exactly");
  SearchOptions opts;
  opts.prime_bound = 300;
  auto r = find_delta_minimal(c.e, c.symbol, 5, opts);
  selmer_report(r);
  o.require(r.find(1)->value.is_zero(), "delta_1 = 0 in F_5");
  bool nu1 = !r.delta_minimal.empty();
  for (u64 d : r.delta_minimal) nu1 = nu1 && r.find(d)->factors.size() == 1;
  o.require(nu1, "delta-minimal d with nu = 1");
  o.require(r.selmer_dim == 1, "selmer_dim 1");
  const int w = root_number_fricke(c.symbol);
  o.require(w == -1 && parity_check(r, w) == Parity::Pass, "parity with w = -1");
  o.detail << "sieved " << r.primes.size() << " primes <= 300, delta-minimal " << join(r.delta_minimal)
           << ", selmer_dim " << r.selmer_dim.value_or(-1) << ", w " << w;
}

void route_agreement(Outcome& o) {
  std::size_t checked = 0, failures = 0;
  for (auto [c, p] : {std::pair{&c11(), u64(7)}, std::pair{&c37(), u64(5)}}) {
    const auto primes = sieve(c->e, p, 1, 0, 500);
    std::vector<u64> ells;
    for (const auto& k : primes) ells.push_back(k.ell);
    Kurihara kur(c->symbol, p, 1, primes);
    for (u64 d : products(ells, 500)) {
      const auto direct = kur.direct(d);
      const auto via = kur.via_ed(d);
      const auto oracle = kur.derivative_oracle(d);
      const bool derivative_nonzero = !oracle.norm_multiple || !oracle.coefficient.is_zero();
      const bool ok = direct.value == via.value && oracle.leading_identity &&
                      derivative_nonzero == !direct.value.is_zero();
      ++checked;
      if (!ok) {
        ++failures;
        o.detail << " " << c->e.label() << ":d=" << d;
      }
    }
  }
  o.require(failures == 0, std::to_string(failures) + " route failures");
  o.detail << checked << " d values, " << failures << " failures";
}

void norm_relations(Outcome& o) {
  for (auto [c, p] : {std::pair{&c11(), u64(7)}, std::pair{&c37(), u64(5)}}) {
    SuiteOptions opts;
    opts.dl_bound = 200;
    opts.n_max = 1;
    opts.m_max = 2;
    opts.bottom_d_max = 200;
    opts.route_d_max = 0;
    opts.covariance_trials = 0;
    auto r = run_identity_suite(c->e, c->symbol, p, opts);
    o.detail << c->e.label() << ":";
    for (const char* name : {"xi_tilde_norm", "vartheta_euler", "bottom_identity", "bottom_unit"}) {
      const auto& res = r.result(name);
      o.require(res.failures == 0 && res.instances > 0, c->e.label() + " " + name + " " + res.first_failure);
      o.detail << " " << name << " " << res.instances - res.failures << "/" << res.instances;
    }
    o.detail << "; ";
  }
}

void modsym_core(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::size_t eigen = 0, even = 0, decomp = 0;
  for (const Loaded* c : {&c11(), &c37()}) {
    const auto& s = c->symbol;
    ManinSpace m(c->e.conductor());
    u64 q_max = 0;
    for (auto [q, a] : s.hecke_pairs()) q_max = std::max(q_max, q);
    int held_out = 0;
    for (u64 q = q_max + 1; held_out < 3; ++q) {
      if (!is_prime(q) || !c->e.is_good(q)) continue;
      ++held_out;
      auto t = m.hecke_matrix(q);
      for (std::size_t j = 0; j < m.dimension(); ++j) {
        Rational acc = 0;
        for (std::size_t i = 0; i < m.dimension(); ++i) acc += Rational(static_cast<long>(s.values()[m.free_rep(i)])) * t(i, j);
        o.require(acc == Rational(static_cast<long>(c->e.ap(q))) * Rational(static_cast<long>(s.values()[m.free_rep(j)])),
                  c->e.label() + " eigen-identity at q = " + std::to_string(q));
      }
      ++eigen;
    }
    for (i64 d = 1; d <= 50; ++d)
      for (i64 a = 0; a < d; ++a) {
        if (gcd(a, d) != 1) continue;
        o.require(s.eval_plus(a, d) == s.eval_plus(d - a, d), "evenness at " + std::to_string(a) + "/" + std::to_string(d));
        ++even;
      }
    // {oo, g(a/d)} = {oo, g(oo)} + {oo, a/d} for g in Gamma_0(N): two unrelated continued fractions.
    const i64 n = static_cast<i64>(c->e.conductor());
    for (int t = 0; t < 500; ++t) {
      const i64 d = 1 + static_cast<i64>(rng() % 2000);
      i64 a = static_cast<i64>(rng() % static_cast<u64>(d));
      while (gcd(a, d) != 1) a = (a + 1) % d;
      i64 z, w;
      do {
        z = 1 + static_cast<i64>(rng() % 20);
        w = static_cast<i64>(rng() % 200) - 100;
      } while (gcd(n * z, w) != 1);
      const auto xg = xgcd(w, n * z);  // x w + y n z = 1
      const i64 x = xg.x, y = -xg.y;   // det [[x, y], [n z, w]] = x w - y n z = 1
      const i64 num = x * a + y * d, den = n * z * a + w * d;
      const i64 lhs = s.path_value(num, den) - s.path_value(x, n * z);
      o.require(lhs == s.path_value(a, d), "decomposition at " + std::to_string(a) + "/" + std::to_string(d));
      ++decomp;
    }
  }
  o.detail << eigen << " held-out eigen checks, " << even << " evenness checks, " << decomp << " decomposition checks";
}

void covariance(Outcome& o) {
  std::mt19937_64 rng(17);
  std::size_t done = 0, failures = 0;
  struct Setup {
    const Loaded* c;
    u64 p;
    std::vector<KolyvaginPrime> primes;
    std::vector<u64> pool;
  };
  std::vector<Setup> setups;
  for (auto [c, p] : {std::pair{&c11(), u64(7)}, std::pair{&c37(), u64(5)}}) {
    Setup s{c, p, sieve(c->e, p, 1, 0, 1000), {}};
    for (std::size_t i = 0; i < s.primes.size(); ++i) {
      s.pool.push_back(s.primes[i].ell);
      for (std::size_t j = i + 1; j < s.primes.size(); ++j) s.pool.push_back(s.primes[i].ell * s.primes[j].ell);
    }
    setups.push_back(std::move(s));
  }
  for (int t = 0; t < 50; ++t) {
    const Setup& s = setups[t % 2];
    Kurihara kur(s.c->symbol, s.p, 1, s.primes);
    const u64 d = s.pool[rng() % s.pool.size()];
    std::map<u64, u64> gens;
    Zpm scale = Zpm::one(s.p, 1);
    for (auto [ell, k] : factor(d)) {
      (void)k;
      u64 u;
      do u = 1 + rng() % (ell - 2); while (std::gcd(u, ell - 1) != 1);
      gens[ell] = powmod(kur.primes().at(ell).generator, u, ell);
      scale = scale * Zpm(static_cast<i64>(u % s.p), s.p, 1).inverse();
    }
    const Zpm before = kur.direct(d).value, after = kur.with_generators(gens).direct(d).value;
    const bool ok = after == before * scale && after.is_zero() == before.is_zero();
    ++done;
    if (!ok) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " covariance failures");
  o.detail << done << " random (d, u) instances, " << failures << " failures";
}

void coset(Outcome& o) {
  const auto v = verify_coset_lemma(3);
  const auto again = verify_coset_lemma(3);
  const auto full = verify_coset_lemma(3, false);
  o.require(v.counterexamples == 0, "reduced counterexamples");
  o.require(v.instances == 2106 && again.to_json() == v.to_json(), "reproducible instance count 2106");
  o.require(full.counterexamples == 0, "unreduced counterexamples");
  const auto w = remark_witness();
  o.require(w && w->covers() && w->span_dimension() == 2, "span-2 covering witness");
  o.detail << "reduced " << v.instances << " instances, unreduced " << full.instances << ", 0 counterexamples";
  if (w) o.detail << "; witness " << w->to_json();
}

void hypotheses_negative(Outcome& o) {
  const auto h5 = check_hypotheses(c11().e, 5);
  o.require(!h5.tamagawa_prime_to_p && !h5.passes(), "11a1 p=5 fails (c)");
  const auto h3 = check_hypotheses(c37().e, 3);
  o.require(!h3.ordinary && !h3.passes(), "37a1 p=3 fails (a)");
  const int x5 = run_cli("check --curve " + g_data + "/curves/11a1.json --p 5 --no-cache");
  const int x3 = run_cli("check --curve " + g_data + "/curves/37a1.json --p 3 --no-cache");
  const int s5 = run_cli("search --curve " + g_data + "/curves/11a1.json --p 5 --no-cache");
  o.require(x5 == 65 && x3 == 65 && s5 == 65, "exit code 65");
  o.detail << "11a1 p=5 Tamagawa 5 | p, 37a1 p=3 a_3 = " << h3.ap << "; exit codes " << x5 << ", " << x3 << ", " << s5;
}

void exhaustive_b(Outcome& o) {
  SearchOptions opts;
  opts.prime_bound = 300;
  opts.nu_max = 3;
  opts.exhaustive = true;
  opts.d_max = 100000000;
  auto r = find_delta_minimal(c37().e, c37().symbol, 5, opts);
  bool minimal_nu1 = !r.delta_minimal.empty();
  for (u64 d : r.delta_minimal) minimal_nu1 = minimal_nu1 && r.find(d)->factors.size() == 1;
  bool nonvanishing_nu = true;
  std::size_t nonzero = 0;
  for (const auto& e : r.table) {
    if (e.value.is_zero()) continue;
    ++nonzero;
    nonvanishing_nu = nonvanishing_nu && e.factors.size() >= 1;
  }
  o.require(minimal_nu1, "every delta-minimal d has nu = 1");
  o.require(nonvanishing_nu, "every nonvanishing d has nu >= 1");
  o.require(r.skipped_over_d_max == 0, "no d skipped");
  o.detail << r.table.size() << " d values (nu <= 3), " << nonzero << " nonvanishing, delta-minimal "
           << join(r.delta_minimal);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <data dir> <kurihara binary>\n";
    return 64;
  }
  g_data = argv[1];
  g_cli = argv[2];

  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds, 0 = none
    std::function<void(Outcome&)> run;
  };
  // Golden runs include curve ingestion and eigensymbol extraction in their time.
  const Criterion criteria[] = {
      {1, "golden run A: 11a1, p = 7", kBudgetA, [](Outcome& o) { c11(); golden_a(o); }},
      {2, "golden run B: 37a1, p = 5", kBudgetB, [](Outcome& o) { c37(); golden_b(o); }},
      {3, "route agreement, d <= 500", 0, route_agreement},
      {4, "norm relations, d ell <= 200, n <= 1, m <= 2", kBudgetNorm, norm_relations},
      {5, "modular-symbols core", 0, modsym_core},
      {6, "generator covariance", 0, covariance},
      {7, "coset lemma on F_3^3 and the span-2 witness", kBudgetCoset, coset},
      {8, "hypothesis negatives", 0, hypotheses_negative},
      {9, "exhaustive delta-minimal search on 37a1", 0, exhaustive_b},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0 && secs > c.budget) {
      o.pass = false;
      o.detail << " [over budget " << c.budget << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %d: %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
