#include "kurihara/search.hpp"

#include "kurihara/parallel.hpp"

#include "json.hpp"

#include <unordered_map>

namespace kurihara {

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::Pass: return "pass";
    case Parity::Fail: return "fail";
    case Parity::Skipped: return "skipped";
  }
  return "?";
}

const DeltaEntry* DeltaReport::find(u64 d) const {
  for (const auto& e : table)
    if (e.d == d) return &e;
  return nullptr;
}

std::string DeltaReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["curve"] = curve;
  j["p"] = p;
  ordered_json rows = ordered_json::array();
  for (const auto& e : table) {
    ordered_json r;
    r["d"] = e.d;
    r["factors"] = e.factors;
    r["delta"] = e.value.value();
    rows.push_back(r);
  }
  j["delta_table"] = rows;
  j["delta_minimal"] = delta_minimal;
  j["selmer_dim"] = selmer_dim ? ordered_json(*selmer_dim) : ordered_json(nullptr);
  j["upper_bound"] = upper_bound ? ordered_json(*upper_bound) : ordered_json(nullptr);
  j["imc_witness"] = imc_witness;
  j["parity"] = std::string(to_string(parity));
  ordered_json prov;
  prov["prime_bound"] = options.prime_bound;
  prov["nu_max"] = options.nu_max;
  prov["m"] = options.m;
  prov["n"] = options.n;
  prov["exhaustive"] = options.exhaustive;
  prov["d_max"] = options.d_max;
  prov["skipped_over_d_max"] = skipped_over_d_max;
  prov["sieved_primes"] = primes.size();
  ordered_json gens = ordered_json::object();
  for (const auto& k : primes) gens[std::to_string(k.ell)] = k.generator;
  prov["generators"] = gens;
  prov["calibration_unit"] = calibration_unit ? ordered_json(to_string(*calibration_unit)) : ordered_json(nullptr);
  prov["root_number"] = root_number ? ordered_json(*root_number) : ordered_json(nullptr);
  prov["root_number_source"] = root_number_source;
  prov["note"] = "selmer_dim and imc_witness are read off through Kurihara's dictionary and are conditional on it";
  j["provenance"] = prov;
  return j.dump(2);
}

DeltaReport find_delta_minimal(const CurveData& e, const EigenSymbol& symbol, u64 p, const SearchOptions& opts) {
  if (!check_hypotheses(e, p).passes()) {
    throw Error(ErrorKind::HypothesisViolation, "hypotheses fail for " + e.label() + " at p = " + std::to_string(p));
  }
  const auto primes = opts.nu_max == 0 ? std::vector<KolyvaginPrime>{}
                                       : sieve(e, p, opts.m, opts.n, opts.prime_bound, opts.workers);
  Kurihara k(symbol, p, opts.m, primes);
  DeltaReport r = find_delta_minimal(e.label(), k, opts);
  r.calibration_unit = symbol.calibration_unit();
  return r;
}

DeltaReport find_delta_minimal(const std::string& label, const Kurihara& kurihara, const SearchOptions& opts) {
  DeltaReport r;
  r.curve = label;
  r.p = kurihara.p();
  r.options = opts;
  for (const auto& [ell, kp] : kurihara.primes()) r.primes.push_back(kp);

  std::unordered_map<u64, std::size_t> index;
  std::vector<std::vector<u64>> level{{}};  // factor lists, ascending
  for (int nu = 0; nu <= opts.nu_max && !level.empty(); ++nu) {
    std::vector<DeltaEntry> entries(level.size());
    parallel_for(level.size(), opts.workers, [&](std::size_t i) {
      u64 d = 1;
      for (u64 ell : level[i]) d *= ell;
      entries[i] = {d, level[i], kurihara.direct(d).value};
    });
    std::sort(entries.begin(), entries.end(), [](const DeltaEntry& a, const DeltaEntry& b) { return a.d < b.d; });

    bool hit = false;
    for (auto& entry : entries) {
      index[entry.d] = r.table.size();
      r.table.push_back(entry);
      if (entry.value.is_zero()) continue;
      r.imc_witness = true;
      bool minimal = true;
      const std::size_t t = entry.factors.size();
      for (u64 mask = 0; mask + 1 < (u64(1) << t) && minimal; ++mask) {
        u64 e = 1;
        for (std::size_t i = 0; i < t; ++i)
          if (mask >> i & 1) e *= entry.factors[i];
        auto it = index.find(e);
        minimal = it != index.end() && r.table[it->second].value.is_zero();
      }
      if (minimal) {
        r.delta_minimal.push_back(entry.d);
        hit = true;
      }
    }
    if (hit && !opts.exhaustive) break;
    if (nu == opts.nu_max) break;

    std::vector<std::vector<u64>> next;
    for (const auto& f : level) {
      u64 d = 1;
      for (u64 ell : f) d *= ell;
      const u64 floor_ell = f.empty() ? 0 : f.back();
      for (const auto& kp : r.primes) {
        if (kp.ell <= floor_ell) continue;
        if (d > opts.d_max / kp.ell) {
          ++r.skipped_over_d_max;
          continue;
        }
        auto g = f;
        g.push_back(kp.ell);
        next.push_back(std::move(g));
      }
    }
    level = std::move(next);
  }
  if (!r.imc_witness) throw SearchExhausted(std::move(r));
  verify_minimality(r);
  return r;
}

void verify_minimality(const DeltaReport& report) {
  std::optional<std::size_t> nu;
  for (u64 d : report.delta_minimal) {
    const DeltaEntry* e = report.find(d);
    if (e == nullptr || e->value.is_zero()) {
      throw Error(ErrorKind::IdentityFailure, "listed delta-minimal d = " + std::to_string(d) + " is not nonvanishing");
    }
    for (u64 q = 1; q < d; ++q) {
      if (d % q != 0) continue;
      const DeltaEntry* f = report.find(q);
      if (f == nullptr || !f->value.is_zero()) {
        throw Error(ErrorKind::IdentityFailure,
                    "delta-minimal d = " + std::to_string(d) + " has divisor " + std::to_string(q) + " not vanishing");
      }
    }
    if (nu && *nu != e->factors.size()) {
      throw Error(ErrorKind::IdentityFailure, "delta-minimal integers with different nu(d)");
    }
    nu = e->factors.size();
  }
}

DeltaReport& selmer_report(DeltaReport& report) {
  report.selmer_dim.reset();
  report.upper_bound.reset();
  if (!report.delta_minimal.empty()) {
    report.selmer_dim = static_cast<int>(report.find(report.delta_minimal.front())->factors.size());
  }
  for (const auto& e : report.table) {
    if (e.value.is_zero()) continue;
    const int nu = static_cast<int>(e.factors.size());
    if (!report.upper_bound || nu < *report.upper_bound) report.upper_bound = nu;
  }
  return report;
}

Parity parity_check(const DeltaReport& report, std::optional<int> w) {
  if (!w) throw Error(ErrorKind::MissingRootNumber, "no root number supplied for " + report.curve);
  if (*w != 1 && *w != -1) throw Error(ErrorKind::InvalidArgument, "root number must be +1 or -1");
  if (report.delta_minimal.empty()) return Parity::Skipped;
  for (u64 d : report.delta_minimal) {
    const int sign = report.find(d)->factors.size() % 2 == 0 ? 1 : -1;
    if (sign != *w) return Parity::Fail;
  }
  return Parity::Pass;
}

int root_number_fricke(const EigenSymbol& symbol) { return -symbol.fricke_eigenvalue(); }

}  // namespace kurihara
