#pragma once

// Breadth-first search for delta-minimal d and the reports built on it.

#include "kurihara/kolyvagin.hpp"

#include <optional>

namespace kurihara {

struct SearchOptions {
  u64 prime_bound = 10000;
  int nu_max = 3;
  int m = 1;
  int n = 0;
  /// Keep going through every level up to nu_max after the first hit.
  bool exhaustive = false;
  /// Products above this are not enumerated (their multiples would not be either).
  u64 d_max = 1000000;
  unsigned workers = 0;
};

struct DeltaEntry {
  u64 d;
  std::vector<u64> factors;
  Zpm value;
};

enum class Parity { Pass, Fail, Skipped };
std::string_view to_string(Parity p);

struct DeltaReport {
  std::string curve;
  u64 p = 0;
  SearchOptions options;
  std::vector<KolyvaginPrime> primes;
  std::vector<DeltaEntry> table;  // ordered by (nu, d)
  std::vector<u64> delta_minimal;
  std::size_t skipped_over_d_max = 0;
  bool imc_witness = false;

  // Filled by selmer_report / parity_check.
  std::optional<int> selmer_dim;
  std::optional<int> upper_bound;
  Parity parity = Parity::Skipped;
  std::optional<int> root_number;
  std::string root_number_source = "none";
  std::optional<Rational> calibration_unit;

  const DeltaEntry* find(u64 d) const;
  std::string to_json() const;
};

/// Thrown when no d with nonzero delta~ turns up within the budget; carries the full table.
class SearchExhausted : public Error {
 public:
  explicit SearchExhausted(DeltaReport report)
      : Error(ErrorKind::SearchExhausted, "no nonvanishing delta~_d within the search budget"),
        report_(std::move(report)) {}
  const DeltaReport& report() const { return report_; }

 private:
  DeltaReport report_;
};

/// Levels nu = 0, 1, ... over squarefree products of sieved primes, d ascending within a level.
DeltaReport find_delta_minimal(const CurveData& e, const EigenSymbol& symbol, u64 p, const SearchOptions& opts);

/// The same search over an explicit prime list (no sieve call, no hypothesis check).
DeltaReport find_delta_minimal(const std::string& label, const Kurihara& kurihara, const SearchOptions& opts);

/// Re-verifies every listed delta-minimal d against the table; throws IdentityFailure otherwise.
void verify_minimality(const DeltaReport& report);

/// Attaches selmer_dim = nu(d_min) and the upper bound min{nu(d) : delta~_d != 0}.
DeltaReport& selmer_report(DeltaReport& report);

/// Pass iff w = (-1)^nu(d) for every delta-minimal d. Throws MissingRootNumber when w is absent.
Parity parity_check(const DeltaReport& report, std::optional<int> w);

/// w_E = -epsilon, epsilon the Fricke eigenvalue on the eigensymbol line.
int root_number_fricke(const EigenSymbol& symbol);

}  // namespace kurihara
