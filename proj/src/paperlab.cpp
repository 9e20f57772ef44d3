#include "kurihara/paperlab.hpp"

#include "kurihara/parallel.hpp"

#include "json.hpp"

#include <random>
#include <set>

namespace kurihara {

namespace {

using Mask = unsigned __int128;

constexpr int kMaxCosetDim = 4;

int pow3(int k) {
  int r = 1;
  while (k-- > 0) r *= 3;
  return r;
}

std::vector<int> digits(int index, int k) {
  std::vector<int> v(k);
  for (int j = 0; j < k; ++j, index /= 3) v[j] = index % 3;
  return v;
}

int undigits(const std::vector<int>& v) {
  int r = 0;
  for (int j = static_cast<int>(v.size()) - 1; j >= 0; --j) r = 3 * r + v[j];
  return r;
}

int dot3(const std::vector<int>& a, const std::vector<int>& b) {
  int s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s % 3;
}

// masks[f][c]: points x of F_3^k with phi_f(x) = c, functionals and points indexed base 3.
struct MaskTable {
  int k;
  int points;
  Mask full;
  std::vector<std::array<Mask, 3>> masks;

  explicit MaskTable(int k_) : k(k_), points(pow3(k_)), full(0), masks(pow3(k_)) {
    for (int x = 0; x < points; ++x) full |= Mask(1) << x;
    for (int f = 0; f < points; ++f) {
      masks[f] = {0, 0, 0};
      const auto phi = digits(f, k);
      for (int x = 0; x < points; ++x) masks[f][dot3(phi, digits(x, k))] |= Mask(1) << x;
    }
  }

  bool covers(const std::array<int, 4>& f, const std::array<int, 4>& c) const {
    return (masks[f[0]][c[0]] | masks[f[1]][c[1]] | masks[f[2]][c[2]] | masks[f[3]][c[3]]) == full;
  }
};

const MaskTable& mask_table(int k) {
  static const std::array<MaskTable, kMaxCosetDim + 1> tables{MaskTable(0), MaskTable(1), MaskTable(2), MaskTable(3),
                                                              MaskTable(4)};
  return tables[k];
}

// Row reduction over F_3; returns the rank.
int rank3(std::vector<std::vector<int>> rows) {
  if (rows.empty()) return 0;
  const std::size_t k = rows[0].size();
  int r = 0;
  for (std::size_t col = 0; col < k && r < static_cast<int>(rows.size()); ++col) {
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    const int inv = rows[r][col];  // 1 and 2 are self-inverse mod 3
    for (auto& x : rows[r]) x = x * inv % 3;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) == r || rows[i][col] == 0) continue;
      const int t = rows[i][col];
      for (std::size_t j = 0; j < k; ++j) rows[i][j] = ((rows[i][j] - t * rows[r][j]) % 3 + 3) % 3;
    }
    ++r;
  }
  return r;
}

int span_of(const std::array<int, 4>& f, int k) {
  std::vector<std::vector<int>> rows;
  for (int i : f) rows.push_back(digits(i, k));
  return rank3(rows);
}

// Coordinates of phi in the basis `basis` (rows of an invertible k x k matrix), by brute force.
std::vector<int> coordinates(const std::vector<int>& phi, const std::vector<std::vector<int>>& basis) {
  const int k = static_cast<int>(phi.size());
  for (int idx = 0; idx < pow3(k); ++idx) {
    const auto lambda = digits(idx, k);
    std::vector<int> v(k, 0);
    for (int j = 0; j < k; ++j)
      for (int t = 0; t < k; ++t) v[t] = (v[t] + lambda[j] * basis[j][t]) % 3;
    if (v == phi) return lambda;
  }
  throw Error(ErrorKind::InvalidArgument, "functional not in the span of the basis");
}

// Canonical representative: pivots (greedy independent functionals, in order) become
// e_1..e_r and come first; the rest are rewritten in the new coordinates.
struct Canonical {
  std::array<int, 4> f;
  std::array<int, 4> order;  // canonical position i holds original functional order[i]
  int span;
};

Canonical canonicalise(const std::array<int, 4>& f, int k) {
  std::vector<std::vector<int>> basis;
  std::vector<int> pivots, rest;
  for (int i = 0; i < 4; ++i) {
    auto cand = basis;
    cand.push_back(digits(f[i], k));
    if (rank3(cand) == static_cast<int>(cand.size())) {
      basis = std::move(cand);
      pivots.push_back(i);
    } else {
      rest.push_back(i);
    }
  }
  const int span = static_cast<int>(basis.size());
  for (int j = 0; j < k && static_cast<int>(basis.size()) < k; ++j) {
    std::vector<int> e(k, 0);
    e[j] = 1;
    auto cand = basis;
    cand.push_back(e);
    if (rank3(cand) == static_cast<int>(cand.size())) basis = std::move(cand);
  }
  Canonical out{};
  out.span = span;
  int pos = 0;
  for (int i : pivots) out.order[pos++] = i;
  for (int i : rest) out.order[pos++] = i;
  for (int i = 0; i < 4; ++i) out.f[i] = undigits(coordinates(digits(f[out.order[i]], k), basis));
  return out;
}

// Reduced functional tuples on F_3^k with span >= 3.
std::vector<std::array<int, 4>> reduced_tuples(int k) {
  std::vector<std::array<int, 4>> out;
  auto unit = [&](int j) {
    std::vector<int> v(k, 0);
    v[j] = 1;
    return undigits(v);
  };
  if (k >= 3) {
    for (int f4 = 1; f4 < 27; ++f4) {
      auto v = digits(f4, 3);
      v.resize(k, 0);
      out.push_back({unit(0), unit(1), unit(2), undigits(v)});
    }
  }
  if (k >= 4) out.push_back({unit(0), unit(1), unit(2), unit(3)});
  return out;
}

std::array<int, 4> shift_values(int index) {
  const auto v = digits(index, 4);
  return {v[0], v[1], v[2], v[3]};
}

CosetInstance make_instance(int k, const std::array<int, 4>& f, const std::array<int, 4>& c) {
  CosetInstance inst;
  inst.k = k;
  for (int i = 0; i < 4; ++i) {
    inst.phi[i] = digits(f[i], k);
    inst.g[i].assign(k, 0);
    for (int j = 0; j < k; ++j) {
      if (inst.phi[i][j] != 0) {
        inst.g[i][j] = c[i] * inst.phi[i][j] % 3;  // phi_j^{-1} = phi_j in F_3
        break;
      }
    }
  }
  return inst;
}

}  // namespace

int CosetInstance::span_dimension() const {
  std::vector<std::vector<int>> rows(phi.begin(), phi.end());
  return rank3(rows);
}

bool CosetInstance::covers() const {
  if (k < 1 || k > kMaxCosetDim) throw Error(ErrorKind::InvalidArgument, "coset dimension must be in [1, 4]");
  std::array<int, 4> f{}, c{};
  for (int i = 0; i < 4; ++i) {
    if (static_cast<int>(phi[i].size()) != k || static_cast<int>(g[i].size()) != k) {
      throw Error(ErrorKind::InvalidArgument, "functional or shift of the wrong length");
    }
    f[i] = undigits(phi[i]);
    if (f[i] == 0) throw Error(ErrorKind::InvalidArgument, "functionals must be nonzero");
    c[i] = dot3(phi[i], g[i]);
  }
  return mask_table(k).covers(f, c);
}

std::string CosetInstance::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["phi"] = phi;
  j["g"] = g;
  return j.dump();
}

u64 coset_size(int k, const std::vector<int>& phi, const std::vector<int>& g) {
  if (k < 1 || k > kMaxCosetDim || static_cast<int>(phi.size()) != k || static_cast<int>(g.size()) != k) {
    throw Error(ErrorKind::InvalidArgument, "bad coset data");
  }
  const Mask m = mask_table(k).masks[undigits(phi)][dot3(phi, g)];
  return static_cast<u64>(__builtin_popcountll(static_cast<unsigned long long>(m)) +
                          __builtin_popcountll(static_cast<unsigned long long>(m >> 64)));
}

std::string CosetVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["max_dim"] = max_dim;
  j["reduced"] = reduced;
  j["tuples"] = tuples;
  j["instances"] = instances;
  j["counterexamples"] = counterexamples;
  j["first_counterexample"] =
      first_counterexample ? nlohmann::ordered_json::parse(first_counterexample->to_json()) : nlohmann::ordered_json();
  return j.dump();
}

CosetVerdict verify_coset_lemma(int max_dim, bool reduced, unsigned workers) {
  if (max_dim != 3 && max_dim != 4) throw Error(ErrorKind::InvalidArgument, "max_dim must be 3 or 4");
  CosetVerdict v;
  v.max_dim = max_dim;
  v.reduced = reduced;
  for (int k = 3; k <= max_dim; ++k) {
    const MaskTable& table = mask_table(k);
    if (reduced) {
      for (const auto& f : reduced_tuples(k)) {
        ++v.tuples;
        for (int ci = 0; ci < 81; ++ci) {
          ++v.instances;
          const auto c = shift_values(ci);
          if (!table.covers(f, c)) continue;
          if (v.counterexamples++ == 0) v.first_counterexample = make_instance(k, f, c);
        }
      }
      continue;
    }
    // Unreduced: split on phi_1; chunks are merged in order so counts and the first
    // counterexample do not depend on scheduling.
    const int nf = table.points;
    struct Chunk {
      u64 tuples = 0, instances = 0, counterexamples = 0;
      std::optional<CosetInstance> first;
    };
    std::vector<Chunk> chunks(nf);
    parallel_for(static_cast<std::size_t>(nf - 1), workers, [&](std::size_t i) {
      Chunk& ch = chunks[i + 1];
      const int f1 = static_cast<int>(i) + 1;
      for (int f2 = 1; f2 < nf; ++f2)
        for (int f3 = 1; f3 < nf; ++f3)
          for (int f4 = 1; f4 < nf; ++f4) {
            const std::array<int, 4> f{f1, f2, f3, f4};
            if (span_of(f, k) < 3) continue;
            ++ch.tuples;
            for (int ci = 0; ci < 81; ++ci) {
              ++ch.instances;
              const auto c = shift_values(ci);
              if (!table.covers(f, c)) continue;
              if (ch.counterexamples++ == 0) ch.first = make_instance(k, f, c);
            }
          }
    });
    for (auto& ch : chunks) {
      v.tuples += ch.tuples;
      v.instances += ch.instances;
      if (ch.counterexamples > 0 && v.counterexamples == 0) v.first_counterexample = ch.first;
      v.counterexamples += ch.counterexamples;
    }
  }
  return v;
}

ReductionAgreement check_reduction_agreement(int k, int min_span) {
  if (k < 1 || k > kMaxCosetDim) throw Error(ErrorKind::InvalidArgument, "coset dimension must be in [1, 4]");
  const MaskTable& table = mask_table(k);
  std::set<std::array<int, 4>> reduced;
  for (const auto& f : reduced_tuples(k)) reduced.insert(f);
  ReductionAgreement out;
  const int nf = table.points;
  for (int f1 = 1; f1 < nf; ++f1)
    for (int f2 = 1; f2 < nf; ++f2)
      for (int f3 = 1; f3 < nf; ++f3)
        for (int f4 = 1; f4 < nf; ++f4) {
          const std::array<int, 4> f{f1, f2, f3, f4};
          const Canonical can = canonicalise(f, k);
          if (can.span < min_span) continue;
          // Span >= 3 representatives must be among the reduced tuples.
          if (can.span >= 3 && !reduced.count(can.f)) ++out.disagreements;
          for (int ci = 0; ci < 81; ++ci) {
            const auto c = shift_values(ci);
            std::array<int, 4> cc{};
            for (int i = 0; i < 4; ++i) cc[i] = c[can.order[i]];
            ++out.instances;
            if (table.covers(f, c) != table.covers(can.f, cc)) ++out.disagreements;
          }
        }
  return out;
}

std::optional<CosetInstance> remark_witness() {
  const std::array<int, 4> f{undigits({1, 0}), undigits({0, 1}), undigits({1, 1}), undigits({1, 2})};
  for (int ci = 0; ci < 81; ++ci) {
    const auto c = shift_values(ci);
    if (mask_table(2).covers(f, c)) return make_instance(2, f, c);
  }
  return std::nullopt;
}

// --- identity suite ----------------------------------------------------------------

bool SuiteReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const IdentityResult& r) { return r.failures == 0; });
}

const IdentityResult& SuiteReport::result(std::string_view name) const {
  for (const auto& r : results)
    if (r.name == name) return r;
  throw Error(ErrorKind::InvalidArgument, "no identity named " + std::string(name));
}

void SuiteReport::require_pass() const {
  for (const auto& r : results) {
    if (r.failures > 0) {
      throw Error(ErrorKind::IdentityFailure, curve + " p = " + std::to_string(p) + ": " + r.name + " failed at " +
                                                  r.first_failure + " (" + std::to_string(r.failures) + " of " +
                                                  std::to_string(r.instances) + ")");
    }
  }
}

std::string SuiteReport::to_json() const {
  nlohmann::ordered_json j;
  j["testsuite"] = curve + " p=" + std::to_string(p);
  u64 failures = 0;
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json c;
    c["name"] = r.name;
    c["instances"] = r.instances;
    c["failures"] = r.failures;
    c["status"] = r.failures == 0 ? "pass" : "fail";
    if (r.failures > 0) c["failure"] = r.first_failure;
    if (r.failures > 0) ++failures;
    cases.push_back(c);
  }
  j["tests"] = results.size();
  j["failures"] = failures;
  j["testcases"] = cases;
  j["warnings"] = warnings;
  return j.dump(2);
}

namespace {

bool good_level(const CurveData& e, u64 d, u64 p) {
  if (d % p == 0 || !is_squarefree(d)) return false;
  for (auto [q, k] : factor(d)) {
    (void)k;
    if (!e.is_good(q)) return false;
  }
  return true;
}

template <typename T>
GroupRingElement<T> euler_twist(const GroupRingElement<T>& x, std::size_t s, const T& a) {
  return x.scaled(a) - x.translated(s) - x.translated(x.group().negate(s));
}

// Squarefree products of `primes` (ascending) with at most nu_max factors and value <= bound.
std::vector<u64> products(const std::vector<u64>& primes, u64 bound, int nu_max) {
  if (bound == 0) return {};
  std::vector<u64> out{1};
  std::vector<std::pair<u64, std::size_t>> frontier{{1, 0}};
  for (int nu = 1; nu <= nu_max; ++nu) {
    std::vector<std::pair<u64, std::size_t>> next;
    for (auto [d, start] : frontier)
      for (std::size_t i = start; i < primes.size(); ++i) {
        if (d > bound / primes[i]) break;
        next.push_back({d * primes[i], i + 1});
        out.push_back(d * primes[i]);
      }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs check(i) for every instance and folds the results in instance order.
template <typename Check>
IdentityResult run_identity(std::string name, const std::vector<std::string>& labels, unsigned workers, Check check) {
  std::vector<std::optional<std::string>> failed(labels.size());
  parallel_for(labels.size(), workers, [&](std::size_t i) {
    try {
      if (!check(i)) failed[i] = labels[i];
    } catch (const Error& err) {
      failed[i] = labels[i] + " [" + err.what() + "]";
    }
  });
  IdentityResult r;
  r.name = std::move(name);
  r.instances = labels.size();
  for (auto& f : failed) {
    if (!f) continue;
    if (r.failures++ == 0) r.first_failure = *f;
  }
  return r;
}

std::string label(std::initializer_list<std::pair<const char*, u64>> kv) {
  std::string s;
  for (auto [k, v] : kv) s += (s.empty() ? "" : " ") + std::string(k) + "=" + std::to_string(v);
  return s;
}

}  // namespace

SuiteReport run_identity_suite(const CurveData& e, const EigenSymbol& symbol_in, u64 p, const SuiteOptions& opts) {
  if (!check_hypotheses(e, p).passes()) {
    throw Error(ErrorKind::HypothesisViolation, "hypotheses fail for " + e.label() + " at p = " + std::to_string(p));
  }
  EigenSymbol symbol = symbol_in;
  if (opts.inject_sign_flip) symbol.set_sign_flip(true);

  SuiteReport report;
  report.curve = e.label();
  report.p = p;

  struct Cell {
    int m, n;
    u64 d, ell;
  };

  // Norm relation: pi(xi~_{d ell}) = P_ell(sigma_ell^{-1}) xi~_d, ell = 1 mod p^m.
  {
    std::vector<Cell> cells;
    std::vector<std::string> labels;
    for (int m = 1; m <= opts.m_max; ++m)
      for (int n = 0; n <= opts.n_max; ++n) {
        const u64 pm = ipow(p, m);
        for (u64 ell = pm + 1; ell <= opts.dl_bound; ell += pm) {
          if (!is_prime(ell) || !e.is_good(ell)) continue;
          for (u64 d = 1; d * ell <= opts.dl_bound; ++d) {
            if (!good_level(e, d, p) || d % ell == 0) continue;
            cells.push_back({m, n, d, ell});
            labels.push_back(label({{"m", m}, {"n", n}, {"d", d}, {"ell", ell}}));
          }
        }
      }
    report.results.push_back(run_identity("xi_tilde_norm", labels, opts.workers, [&](std::size_t i) {
      const Cell& c = cells[i];
      MazurTate mt(e, symbol, p, c.m);
      const u64 pn = ipow(p, c.n);
      auto upper = mt.project(mt.xi_tilde(c.d * c.ell, c.n), c.d * c.ell * pn, c.d * pn);
      auto g = unit_group(c.d * pn);
      const std::size_t s_inv = g->group().negate(g->index_of(static_cast<i64>(c.ell % (c.d * pn))));
      auto poly = mt.polynomial_at(frobenius_poly(e, c.ell, p, c.m), c.d * pn, s_inv);
      return upper == poly * mt.xi_tilde(c.d, c.n);
    }));
  }

  // Euler relation: pi(vartheta_{d ell}) = (a_ell - sigma_ell - sigma_ell^{-1}) vartheta_d.
  {
    std::vector<Cell> cells;
    std::vector<std::string> labels;
    for (int m = 1; m <= opts.m_max; ++m)
      for (int n = 0; n <= opts.n_max; ++n)
        for (u64 d = 1; d <= opts.dl_bound; ++d) {
          if (!good_level(e, d, p)) continue;
          for (u64 ell = 2; d * ell <= opts.dl_bound; ++ell) {
            if (!is_prime(ell) || ell == p || d % ell == 0 || !e.is_good(ell)) continue;
            cells.push_back({m, n, d, ell});
            labels.push_back(label({{"m", m}, {"n", n}, {"d", d}, {"ell", ell}}));
          }
        }
    report.results.push_back(run_identity("vartheta_euler", labels, opts.workers, [&](std::size_t i) {
      const Cell& c = cells[i];
      MazurTate mt(e, symbol, p, c.m);
      const u64 pn = ipow(p, c.n);
      auto upper = mt.project(mt.vartheta(c.d * c.ell, c.n), c.d * c.ell * pn, c.d * pn);
      const std::size_t s = unit_group(c.d * pn)->index_of(static_cast<i64>(c.ell % (c.d * pn)));
      return upper == euler_twist(mt.vartheta(c.d, c.n), s, Zpm(e.ap(c.ell), p, c.m));
    }));
  }

  // Bottom identity: pi(vartheta_{dp}) = (1 - alpha^-1 sigma_p)(1 - alpha^-1 sigma_p^-1) theta~_d.
  {
    std::vector<Cell> cells;
    std::vector<std::string> labels;
    for (int m = 1; m <= opts.m_max; ++m)
      for (u64 d = 1; d <= opts.bottom_d_max; ++d) {
        if (!good_level(e, d, p)) continue;
        cells.push_back({m, 1, d, 0});
        labels.push_back(label({{"m", m}, {"d", d}}));
      }
    report.results.push_back(run_identity("bottom_identity", labels, opts.workers, [&](std::size_t i) {
      const Cell& c = cells[i];
      MazurTate mt(e, symbol, p, c.m);
      return mt.project(mt.vartheta(c.d, 1), c.d * p, c.d) == mt.bottom_factor(c.d) * mt.theta_mod(c.d);
    }));
  }

  const auto primes = sieve(e, p, 1, 0, opts.sieve_bound, opts.workers);
  std::vector<u64> ells;
  for (const auto& kp : primes) ells.push_back(kp.ell);

  // Unit-ness of the bottom factor over d in N (products of Kolyvagin primes, d = 1 included).
  {
    std::vector<Cell> cells;
    std::vector<std::string> labels;
    for (int m = 1; m <= opts.m_max; ++m)
      for (u64 d : products(ells, opts.bottom_d_max, 64)) {
        cells.push_back({m, 0, d, 0});
        labels.push_back(label({{"m", m}, {"d", d}}));
      }
    report.results.push_back(run_identity("bottom_unit", labels, opts.workers, [&](std::size_t i) {
      const Cell& c = cells[i];
      MazurTate mt(e, symbol, p, c.m);
      auto b = mt.bottom_factor(c.d);
      try {
        auto inv = group_ring_inverse(b);
        return b * inv == ResidueGroupRing::monomial(b.group(), 0, mt.one(), mt.zero());
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::NotInvertible) return false;
        throw;
      }
    }));
    // Outside N the factor need not be a unit; record where, as information only.
    if (!opts.inject_sign_flip) {
      MazurTate mt(e, symbol, p, 1);
      std::vector<u64> non_units;
      for (u64 d = 1; d <= opts.bottom_d_max; ++d) {
        if (!good_level(e, d, p)) continue;
        try {
          group_ring_inverse(mt.bottom_factor(d));
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::NotInvertible) throw;
          non_units.push_back(d);
        }
      }
      if (!non_units.empty()) {
        std::string s;
        for (u64 d : non_units) s += (s.empty() ? "" : ", ") + std::to_string(d);
        report.warnings.push_back("bottom factor is not a unit at good levels outside N: " + s);
      }
    }
  }

  Kurihara kur(symbol, p, 1, primes);
  const auto route_ds = products(ells, opts.route_d_max, 64);
  std::vector<std::string> route_labels;
  for (u64 d : route_ds) route_labels.push_back(label({{"d", d}}));

  std::vector<std::optional<DerivativeResult>> oracle(route_ds.size());
  std::vector<std::optional<Zpm>> direct(route_ds.size());
  parallel_for(route_ds.size(), opts.workers, [&](std::size_t i) {
    try {
      oracle[i] = kur.derivative_oracle(route_ds[i]);
      direct[i] = kur.direct(route_ds[i]).value;
    } catch (const Error&) {
      // Left empty; reported as a failure below.
    }
  });
  report.results.push_back(run_identity("leading_term", route_labels, opts.workers, [&](std::size_t i) {
    return oracle[i] && oracle[i]->leading_identity;
  }));
  report.results.push_back(run_identity("nonvanishing_equivalence", route_labels, opts.workers, [&](std::size_t i) {
    if (!oracle[i] || !direct[i]) return false;
    const bool derivative_nonzero = !oracle[i]->norm_multiple || !oracle[i]->coefficient.is_zero();
    return derivative_nonzero == !direct[i]->is_zero();
  }));
  report.results.push_back(run_identity("ed_identity", route_labels, opts.workers, [&](std::size_t i) {
    return direct[i] && kur.via_ed(route_ds[i]).value == *direct[i];
  }));

  // Generator covariance: h -> h^u scales delta~_d by prod u^{-1} mod p.
  {
    auto pool = products(ells, opts.covariance_d_max, 2);
    pool.erase(std::remove(pool.begin(), pool.end(), u64(1)), pool.end());
    std::mt19937_64 rng(opts.seed);
    struct Trial {
      u64 d;
      std::map<u64, u64> u;
    };
    std::vector<Trial> trials;
    std::vector<std::string> labels;
    for (int t = 0; t < opts.covariance_trials && !pool.empty(); ++t) {
      Trial tr{pool[rng() % pool.size()], {}};
      std::string s = "d=" + std::to_string(tr.d);
      for (auto [ell, k] : factor(tr.d)) {
        (void)k;
        u64 u;
        do u = 1 + rng() % (ell - 2); while (std::gcd(u, ell - 1) != 1);
        tr.u[ell] = u;
        s += " u_" + std::to_string(ell) + "=" + std::to_string(u);
      }
      trials.push_back(std::move(tr));
      labels.push_back(std::move(s));
    }
    report.results.push_back(run_identity("generator_covariance", labels, opts.workers, [&](std::size_t i) {
      const Trial& tr = trials[i];
      std::map<u64, u64> gens;
      Zpm scale = Zpm::one(p, 1);
      for (auto [ell, u] : tr.u) {
        gens[ell] = powmod(kur.primes().at(ell).generator, u, ell);
        scale = scale * Zpm(static_cast<i64>(u % p), p, 1).inverse();
      }
      return kur.with_generators(gens).direct(tr.d).value == kur.direct(tr.d).value * scale;
    }));
  }

  for (const auto& r : report.results)
    if (r.instances == 0) report.warnings.push_back(r.name + ": zero instances, vacuous pass");
  return report;
}

}  // namespace kurihara
