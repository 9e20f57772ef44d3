// kurihara: command-line front end.
//
// Exit codes: 0 success, 2 search exhausted, 3 correctness alarm,
// 64 usage error, 65 hypothesis failure.

#include "cache.hpp"

#include "kurihara/kolyvagin.hpp"
#include "kurihara/mazurtate.hpp"
#include "kurihara/paperlab.hpp"
#include "kurihara/search.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

using namespace kurihara;
using kurihara::cli::Cache;
using kurihara::cli::Json;

namespace {

constexpr int kExitSearchExhausted = 2;
constexpr int kExitAlarm = 3;
constexpr int kExitUsage = 64;
constexpr int kExitHypothesis = 65;

constexpr const char* kGeneratorPolicy = "smallest-primitive-root";

struct RunConfig {
  std::string curve;
  u64 p = 0;
  int m = 1;
  int n = 0;
  u64 prime_bound = 10000;
  int nu_max = 3;
  u64 d_max = 1000000;
  std::string cache_dir;
  bool no_cache = false;
  unsigned workers = 0;
  std::string format = "json";
  u64 seed = 1;
  bool assert_optimal = false;
  bool assert_surjective = false;
  bool exhaustive = false;
  int root_number = 0;  // 0: not supplied
  int coset_dim = 3;
  u64 d = 1;
  std::string kind = "theta";
  u64 dl_bound = 200;
  u64 route_d_max = 500;
  bool verbose = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::HypothesisViolation:
    case ErrorKind::Supersingular:
    case ErrorKind::DenominatorDivisibleByP:
    case ErrorKind::BadPrime:
      return kExitHypothesis;
    case ErrorKind::SearchExhausted:
      return kExitSearchExhausted;
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidCurve:
    case ErrorKind::NotSquarefree:
    case ErrorKind::PrimeNotKolyvagin:
    case ErrorKind::NotCoprime:
    case ErrorKind::NonInvertibleEll:
    case ErrorKind::NotAUnit:
    case ErrorKind::MissingRootNumber:
    case ErrorKind::Io:
      return kExitUsage;
    default:
      return kExitAlarm;
  }
}

// Renders top-level fields one per line; nested arrays of objects are summarised.
std::string as_text(const Json& j, const std::string& indent = "") {
  std::string out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    out += indent + it.key() + ": ";
    if (v.is_object()) {
      out += "\n" + as_text(v, indent + "  ");
      continue;
    }
    if (v.is_array()) {
      const bool scalars = std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
      if (scalars) {
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
      } else {
        out += "(" + std::to_string(v.size()) + " rows)";
      }
    } else {
      out += v.is_string() ? v.get<std::string>() : v.dump();
    }
    out += "\n";
  }
  return out;
}

class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg), cache_(cache_dir(cfg)) {}

  int check() {
    const CurveData& e = curve();
    auto h = check_hypotheses(e, cfg_.p);
    Json j;
    j["curve"] = e.label();
    j["p"] = cfg_.p;
    j["hypotheses"] = Json::parse(h.to_json());
    emit(j);
    return h.passes() ? 0 : kExitHypothesis;
  }

  int sieve_cmd() {
    const CurveData& e = curve();
    Json inputs{{"curve", Json::parse(e.to_json())}, {"p", cfg_.p},          {"m", cfg_.m},
                {"n", cfg_.n},                        {"bound", cfg_.prime_bound}, {"generators", kGeneratorPolicy}};
    const auto key = cli::cache_key("sieve", inputs);
    auto payload = cached("sieve", key, [&] {
      Json rows = Json::array();
      for (const auto& k : sieve(e, cfg_.p, cfg_.m, cfg_.n, cfg_.prime_bound, cfg_.workers)) {
        rows.push_back(Json{{"ell", k.ell}, {"generator", k.generator}, {"points", k.points}, {"p_valuation", k.p_valuation}});
      }
      Json j;
      j["curve"] = e.label();
      j["p"] = cfg_.p;
      j["m"] = cfg_.m;
      j["n"] = cfg_.n;
      j["prime_bound"] = cfg_.prime_bound;
      j["count"] = rows.size();
      j["primes"] = rows;
      return j;
    });
    emit(payload);
    return 0;
  }

  int theta() {
    const CurveData& e = curve();
    require_hypotheses(e);
    if (cfg_.kind != "theta" && cfg_.kind != "vartheta" && cfg_.kind != "xi_tilde") {
      throw UsageError("--kind must be theta, vartheta or xi_tilde");
    }
    const EigenSymbol& sym = symbol();
    Json inputs{{"curve", Json::parse(e.to_json())}, {"p", cfg_.p}, {"m", cfg_.m}, {"n", cfg_.n},
                {"d", cfg_.d},                        {"kind", cfg_.kind}, {"eigensymbol", symbol_hash_}};
    const auto key = cli::cache_key("theta", inputs);
    auto payload = cached("theta", key, [&] {
      MazurTate mt(e, sym, cfg_.p, cfg_.m);
      const u64 level = cfg_.d * ipow(cfg_.p, cfg_.n);
      ResidueGroupRing x = cfg_.kind == "theta"      ? mt.theta_mod(level)
                           : cfg_.kind == "vartheta" ? mt.vartheta(cfg_.d, cfg_.n)
                                                     : mt.xi_tilde(cfg_.d, cfg_.n);
      auto g = unit_group(level);
      std::vector<std::pair<u64, u64>> coeffs;
      for (std::size_t i = 0; i < g->size(); ++i) coeffs.push_back({g->residue(i), x[i].value()});
      std::sort(coeffs.begin(), coeffs.end());
      Json rows = Json::array();
      for (auto [a, v] : coeffs) rows.push_back(Json::array({a, v}));
      Json j;
      j["curve"] = e.label();
      j["p"] = cfg_.p;
      j["m"] = cfg_.m;
      j["n"] = cfg_.n;
      j["d"] = cfg_.d;
      j["kind"] = cfg_.kind;
      j["level"] = level;
      j["support"] = x.support_size();
      j["coefficients"] = rows;  // [residue a, coefficient of sigma_a]
      return j;
    });
    emit(payload);
    return 0;
  }

  int delta() {
    const CurveData& e = curve();
    require_hypotheses(e);
    if (!is_squarefree(cfg_.d)) throw Error(ErrorKind::NotSquarefree, std::to_string(cfg_.d) + " is not squarefree");
    std::vector<KolyvaginPrime> primes;
    for (auto [ell, k] : factor(cfg_.d)) {
      (void)k;
      if (!is_kolyvagin_prime(e, ell, cfg_.p, cfg_.m, cfg_.n)) {
        throw Error(ErrorKind::PrimeNotKolyvagin, std::to_string(ell) + " is not a Kolyvagin prime");
      }
      primes.push_back(make_kolyvagin_prime(e, ell, cfg_.p));
    }
    const EigenSymbol& sym = symbol();
    Json inputs{{"curve", Json::parse(e.to_json())}, {"p", cfg_.p},        {"m", cfg_.m},
                {"n", cfg_.n},                        {"d", cfg_.d},        {"generators", kGeneratorPolicy},
                {"eigensymbol", symbol_hash_}};
    const auto key = cli::cache_key("delta", inputs);
    auto payload = cached("delta", key, [&] {
      Kurihara kur(sym, cfg_.p, cfg_.m, primes);
      const auto direct = kur.direct(cfg_.d);
      const auto via = kur.via_ed(cfg_.d);
      const auto oracle = kur.derivative_oracle(cfg_.d);
      const bool derivative_nonzero = !oracle.norm_multiple || !oracle.coefficient.is_zero();
      const bool agree = direct.value == via.value && oracle.leading_identity &&
                         derivative_nonzero == !direct.value.is_zero();
      Json j;
      j["curve"] = e.label();
      j["p"] = cfg_.p;
      j["m"] = cfg_.m;
      const Json row = Json::parse(row_json(direct, agree, kur.primes()));
      for (auto it = row.begin(); it != row.end(); ++it) j[it.key()] = it.value();
      j["via_ed"] = via.value.value();
      j["e_d"] = kur.e_d(cfg_.d);
      j["oracle"] = Json{{"coefficient", oracle.coefficient.value()},
                         {"norm_multiple", oracle.norm_multiple},
                         {"leading_identity", oracle.leading_identity}};
      return j;
    });
    emit(payload);
    return payload["routes_agree"].get<bool>() ? 0 : kExitAlarm;
  }

  int search(bool text_report) {
    const CurveData& e = curve();
    const auto h = check_hypotheses(e, cfg_.p);
    if (!h.passes()) {
      if (text_report) emit(Json{{"curve", e.label()}, {"p", cfg_.p}, {"hypotheses", Json::parse(h.to_json())}});
      throw Error(ErrorKind::HypothesisViolation, "hypotheses fail for " + e.label() + " at p = " + std::to_string(cfg_.p));
    }
    const EigenSymbol& sym = symbol();
    SearchOptions opts;
    opts.prime_bound = cfg_.prime_bound;
    opts.nu_max = cfg_.nu_max;
    opts.m = cfg_.m;
    opts.n = cfg_.n;
    opts.exhaustive = cfg_.exhaustive;
    opts.d_max = cfg_.d_max;
    opts.workers = cfg_.workers;
    Json inputs{{"curve", Json::parse(e.to_json())},
                {"p", cfg_.p},
                {"m", cfg_.m},
                {"n", cfg_.n},
                {"prime_bound", cfg_.prime_bound},
                {"nu_max", cfg_.nu_max},
                {"d_max", cfg_.d_max},
                {"exhaustive", cfg_.exhaustive},
                {"root_number", cfg_.root_number},
                {"generators", kGeneratorPolicy},
                {"eigensymbol", symbol_hash_}};
    const auto key = cli::cache_key("search", inputs);
    auto payload = cached("search", key, [&] {
      int code = 0;
      DeltaReport r;
      try {
        r = find_delta_minimal(e, sym, cfg_.p, opts);
      } catch (const SearchExhausted& ex) {
        r = ex.report();
        r.calibration_unit = sym.calibration_unit();
        code = kExitSearchExhausted;
      }
      opts.workers = 1;  // not part of the result
      r.options = opts;
      selmer_report(r);
      resolve_root_number(r, e, sym);
      if (r.root_number) r.parity = parity_check(r, r.root_number);
      return Json{{"exit_code", code}, {"report", Json::parse(r.to_json())}};
    });
    const int code = payload["exit_code"].get<int>();
    if (text_report) {
      Json j;
      j["curve"] = e.label();
      j["p"] = cfg_.p;
      j["hypotheses"] = h.passes() ? "pass" : "fail";
      const Json& r = payload["report"];
      j["sieved_primes"] = r["provenance"]["sieved_primes"];
      j["table_rows"] = r["delta_table"].size();
      Json nonzero = Json::array();
      for (const auto& row : r["delta_table"])
        if (row["delta"].get<u64>() != 0) nonzero.push_back(row["d"]);
      j["nonvanishing_d"] = nonzero;
      for (const char* k : {"delta_minimal", "selmer_dim", "upper_bound", "imc_witness", "parity"}) j[k] = r[k];
      j["root_number"] = r["provenance"]["root_number"];
      j["root_number_source"] = r["provenance"]["root_number_source"];
      j["note"] = r["provenance"]["note"];
      if (cfg_.format == "json") {
        emit(Json{{"summary", j}, {"report", r}});
      } else {
        std::cout << as_text(j);
      }
    } else {
      emit(payload["report"]);
    }
    return code;
  }

  int selftest() {
    Json suites = Json::array();
    bool ok = true;

    auto verdict = verify_coset_lemma(cfg_.coset_dim, true, cfg_.workers);
    auto witness = remark_witness();
    bool sizes_ok = true;
    for (int k = 1; k <= cfg_.coset_dim; ++k) {
      std::vector<int> phi(k, 0), g(k, 0);
      phi[k - 1] = 1;
      g[0] = 1;
      u64 expect = 1;
      for (int i = 1; i < k; ++i) expect *= 3;
      sizes_ok = sizes_ok && coset_size(k, phi, g) == expect;
    }
    Json cases = Json::array();
    cases.push_back(Json{{"name", "coset_lemma_dim_" + std::to_string(cfg_.coset_dim)},
                         {"instances", verdict.instances},
                         {"failures", verdict.counterexamples},
                         {"status", verdict.counterexamples == 0 ? "pass" : "fail"},
                         {"detail", Json::parse(verdict.to_json())}});
    cases.push_back(Json{{"name", "span2_covering_witness"},
                         {"instances", 1},
                         {"failures", witness ? 0 : 1},
                         {"status", witness ? "pass" : "fail"},
                         {"witness", witness ? Json::parse(witness->to_json()) : Json()}});
    cases.push_back(Json{{"name", "single_coset_index_3"},
                         {"instances", cfg_.coset_dim},
                         {"failures", sizes_ok ? 0 : 1},
                         {"status", sizes_ok ? "pass" : "fail"}});
    u64 failures = 0;
    for (const auto& c : cases) failures += c["failures"].get<u64>() > 0 ? 1 : 0;
    suites.push_back(Json{{"testsuite", "coset"}, {"tests", cases.size()}, {"failures", failures}, {"testcases", cases}});
    ok = ok && failures == 0;

    if (!cfg_.curve.empty()) {
      const CurveData& e = curve();
      require_hypotheses(e);
      SuiteOptions opts;
      opts.dl_bound = cfg_.dl_bound;
      opts.bottom_d_max = cfg_.dl_bound;
      opts.route_d_max = cfg_.route_d_max;
      opts.sieve_bound = std::max(cfg_.route_d_max, u64(500));
      opts.seed = cfg_.seed;
      opts.workers = cfg_.workers;
      opts.m_max = std::max(cfg_.m, 2);
      auto report = run_identity_suite(e, symbol(), cfg_.p, opts);
      suites.push_back(Json::parse(report.to_json()));
      ok = ok && report.passed();
    }
    emit(Json{{"testsuites", suites}});
    return ok ? 0 : kExitAlarm;
  }

 private:
  static std::filesystem::path cache_dir(const RunConfig& cfg) {
    if (cfg.no_cache) return {};
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* home = std::getenv("HOME")) return std::filesystem::path(home) / ".cache" / "kurihara";
    return ".kurihara-cache";
  }

  const CurveData& curve() {
    if (curve_) return *curve_;
    if (cfg_.curve.empty()) throw UsageError("--curve is required");
    CurveData e = cfg_.curve.front() == '{' ? CurveData::from_json(cfg_.curve) : CurveData::from_file(cfg_.curve);
    if (cfg_.assert_optimal) e.assert_optimal();
    if (cfg_.assert_surjective) e.assert_surjective(cfg_.p);
    curve_ = std::move(e);
    return *curve_;
  }

  void require_hypotheses(const CurveData& e) const {
    if (!check_hypotheses(e, cfg_.p).passes()) {
      throw Error(ErrorKind::HypothesisViolation, "hypotheses fail for " + e.label() + " at p = " + std::to_string(cfg_.p));
    }
  }

  const EigenSymbol& symbol() {
    if (symbol_) return *symbol_;
    const CurveData& e = curve();
    const auto key = cli::cache_key("eigensymbol", Json{{"curve", Json::parse(e.to_json())}});
    Json payload;
    if (auto hit = cache_.load("eigensymbol", key)) {
      note("cache hit eigensymbol " + key);
      payload = *hit;
      symbol_ = EigenSymbol::from_json(payload.dump());
    } else {
      note("cache miss eigensymbol " + key);
      ManinSpace space(e.conductor());
      EigenSymbol s = extract_eigensymbol(space, e);
      calibrate(s, e);
      payload = Json::parse(s.to_json());
      cache_.store("eigensymbol", key, payload);
      symbol_ = std::move(s);
    }
    symbol_hash_ = cli::sha256_hex(payload.dump());
    return *symbol_;
  }

  void resolve_root_number(DeltaReport& r, const CurveData& e, const EigenSymbol& sym) const {
    if (cfg_.root_number != 0) {
      r.root_number = cfg_.root_number;
      r.root_number_source = "override";
    } else if (e.root_number()) {
      r.root_number = e.root_number();
      r.root_number_source = "ingested";
    } else {
      try {
        r.root_number = root_number_fricke(sym);
        r.root_number_source = "fricke";
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::FrickeNotScalar) throw;
        r.root_number_source = "none";
      }
    }
  }

  template <typename Compute>
  Json cached(const std::string& kind, const std::string& key, Compute compute) {
    if (auto hit = cache_.load(kind, key)) {
      note("cache hit " + kind + " " + key);
      return *hit;
    }
    note("cache miss " + kind + " " + key);
    Json j = compute();
    cache_.store(kind, key, j);
    return j;
  }

  void emit(const Json& j) const {
    if (cfg_.format == "text") {
      std::cout << as_text(j);
    } else {
      std::cout << j.dump(2) << '\n';
    }
  }

  void note(const std::string& msg) const {
    if (cfg_.verbose) std::cerr << msg << '\n';
  }

  const RunConfig& cfg_;
  Cache cache_;
  std::optional<CurveData> curve_;
  std::optional<EigenSymbol> symbol_;
  std::string symbol_hash_;
};

void validate(const RunConfig& cfg, bool needs_p) {
  if (needs_p && (cfg.p < 3 || !is_prime(cfg.p))) throw UsageError("--p must be an odd prime");
  if (cfg.m < 1) throw UsageError("--m must be at least 1");
  if (cfg.n < 0) throw UsageError("--n must be non-negative");
  if (cfg.prime_bound == 0 || cfg.d_max == 0 || cfg.d == 0) throw UsageError("bounds must be positive");
  if (cfg.nu_max < 0) throw UsageError("--nu-max must be non-negative");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Kurihara numbers, delta-minimal search and Selmer rank readout for elliptic curves"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* sub, bool needs_curve) {
    auto* c = sub->add_option("--curve", cfg.curve, "curve JSON file, or inline JSON object");
    if (needs_curve) c->required();
    auto* p = sub->add_option("--p", cfg.p, "odd prime p");
    if (needs_curve) p->required();
    sub->add_option("--m", cfg.m, "coefficients in Z/p^m")->capture_default_str();
    sub->add_option("--n", cfg.n, "layer of the cyclotomic tower")->capture_default_str();
    sub->add_option("--cache-dir", cfg.cache_dir, "cache directory")->envname("KURIHARA_CACHE_DIR");
    sub->add_flag("--no-cache", cfg.no_cache, "do not read or write the cache");
    sub->add_option("--workers", cfg.workers, "worker threads (0: hardware concurrency)")->capture_default_str();
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for randomised checks")->capture_default_str();
    sub->add_flag("--assert-optimal", cfg.assert_optimal, "assert the curve is optimal in its isogeny class");
    sub->add_flag("--assert-surjective", cfg.assert_surjective, "assert rho_{E,p} is surjective");
    sub->add_flag("-v,--verbose", cfg.verbose, "report cache activity on stderr");
  };
  auto search_opts = [&](CLI::App* sub) {
    sub->add_option("--prime-bound", cfg.prime_bound, "sieve bound for Kolyvagin primes")->capture_default_str();
    sub->add_option("--nu-max", cfg.nu_max, "largest number of prime factors of d")->capture_default_str();
    sub->add_option("--d-max", cfg.d_max, "largest d tried")->capture_default_str();
    sub->add_flag("--exhaustive", cfg.exhaustive, "collect every delta-minimal d up to nu-max");
    sub->add_option("--root-number", cfg.root_number, "root number override")->check(CLI::IsMember({-1, 1}));
  };

  auto* check = app.add_subcommand("check", "hypothesis report");
  common(check, true);
  auto* sieve_cmd = app.add_subcommand("sieve", "list Kolyvagin primes");
  common(sieve_cmd, true);
  sieve_cmd->add_option("--prime-bound", cfg.prime_bound, "sieve bound")->capture_default_str();
  auto* theta = app.add_subcommand("theta", "dump theta~, vartheta or xi~");
  common(theta, true);
  theta->add_option("--d", cfg.d, "tame level d")->capture_default_str();
  theta->add_option("--kind", cfg.kind, "theta | vartheta | xi_tilde")->capture_default_str();
  auto* delta = app.add_subcommand("delta", "one Kurihara number, all routes");
  common(delta, true);
  delta->add_option("--d", cfg.d, "squarefree product of Kolyvagin primes")->required();
  auto* search = app.add_subcommand("search", "delta-minimal search with Selmer readout");
  common(search, true);
  search_opts(search);
  auto* report = app.add_subcommand("report", "summary of the search");
  common(report, true);
  search_opts(report);
  auto* selftest = app.add_subcommand("selftest", "coset lemma and, given --curve/--p, the identity suite");
  common(selftest, false);
  selftest->add_option("--coset-dim", cfg.coset_dim, "largest F_3 dimension")->check(CLI::IsMember({3, 4}))->capture_default_str();
  selftest->add_option("--dl-bound", cfg.dl_bound, "d * ell bound of the identity grid")->capture_default_str();
  selftest->add_option("--route-d-max", cfg.route_d_max, "largest d for the route identities")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Runner run(cfg);
    if (check->parsed()) {
      validate(cfg, true);
      return run.check();
    }
    if (sieve_cmd->parsed()) {
      validate(cfg, true);
      return run.sieve_cmd();
    }
    if (theta->parsed()) {
      validate(cfg, true);
      return run.theta();
    }
    if (delta->parsed()) {
      validate(cfg, true);
      return run.delta();
    }
    if (search->parsed()) {
      validate(cfg, true);
      return run.search(false);
    }
    if (report->parsed()) {
      validate(cfg, true);
      if (!report->count("--format")) cfg.format = "text";
      return run.search(true);
    }
    if (selftest->parsed()) {
      if (!cfg.curve.empty()) validate(cfg, true);
      return run.selftest();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAlarm;
  }
  return kExitUsage;
}
