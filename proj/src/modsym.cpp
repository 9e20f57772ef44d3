#include "kurihara/modsym.hpp"

#include "json.hpp"

#include <mutex>

namespace kurihara {

namespace {

constexpr u64 kDenseP1Limit = 1000;

std::vector<u64> divisors(u64 n) {
  std::vector<u64> out;
  for (u64 k = 1; k * k <= n; ++k) {
    if (n % k) continue;
    out.push_back(k);
    if (k * k != n) out.push_back(n / k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// x_i = sign * x_parent; a root may be forced to zero by x = -x.
class SignedUnionFind {
 public:
  explicit SignedUnionFind(std::size_t n) : parent_(n), sign_(n, 1), zero_(n, false) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }

  std::pair<std::size_t, int> find(std::size_t i) {
    if (parent_[i] == i) return {i, 1};
    auto [r, s] = find(parent_[i]);
    parent_[i] = r;
    sign_[i] *= s;
    return {r, sign_[i]};
  }

  // Impose x_i = s * x_j.
  void unite(std::size_t i, std::size_t j, int s) {
    auto [ri, si] = find(i);
    auto [rj, sj] = find(j);
    const int t = si * s * sj;
    if (ri == rj) {
      if (t == -1) zero_[ri] = true;
      return;
    }
    parent_[ri] = rj;
    sign_[ri] = t;
    zero_[rj] = zero_[rj] || zero_[ri];
  }

  bool zero(std::size_t root) const { return zero_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> sign_;
  std::vector<bool> zero_;
};

}  // namespace

// --- P1(Z/N) ---------------------------------------------------------------------

P1List::P1List(u64 n) : n_(n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "level must be positive");
  if (n == 1) {
    elements_.push_back({0, 0});
    return;
  }
  elements_.push_back({0, 1});
  for (u64 g : divisors(n)) {
    if (g == n) continue;
    for (u64 v = 0; v < n; ++v) {
      if (std::gcd(g, v) != 1) continue;
      if (normalize(static_cast<i64>(g), static_cast<i64>(v)) == std::pair<u64, u64>{g, v}) elements_.push_back({g, v});
    }
  }
  if (n <= kDenseP1Limit) {
    dense_.assign(n * n, std::uint32_t(-1));
    std::map<std::pair<u64, u64>, std::size_t> pos;
    for (std::size_t i = 0; i < elements_.size(); ++i) pos[elements_[i]] = i;
    for (u64 c = 0; c < n; ++c)
      for (u64 d = 0; d < n; ++d) {
        if (std::gcd(std::gcd(c, d), n) != 1) continue;
        dense_[c * n + d] = static_cast<std::uint32_t>(pos.at(normalize(static_cast<i64>(c), static_cast<i64>(d))));
      }
  } else {
    for (std::size_t i = 0; i < elements_.size(); ++i) sparse_[elements_[i]] = i;
  }
}

std::pair<u64, u64> P1List::normalize(i64 c, i64 d) const {
  if (n_ == 1) return {0, 0};
  const i64 n = static_cast<i64>(n_);
  u64 u = static_cast<u64>(floor_mod(c, n)), v = static_cast<u64>(floor_mod(d, n));
  if (u == 0) {
    if (std::gcd(v, n_) != 1) throw Error(ErrorKind::InvalidArgument, "(c:d) not in P1(Z/N)");
    return {0, 1};
  }
  const Xgcd x = xgcd(static_cast<i64>(u), n);
  const u64 g = static_cast<u64>(x.g);
  if (std::gcd(g, v) != 1) throw Error(ErrorKind::InvalidArgument, "(c:d) not in P1(Z/N)");
  u64 s = static_cast<u64>(floor_mod(x.x, n));
  const u64 step = n_ / g;
  while (std::gcd(s, n_) != 1) s = (s + step) % n_;
  v = mulmod(s, v, n_);
  // Remaining freedom: units t = 1 mod N/g fix u = g.
  u64 best = v;
  for (u64 k = 1; k < g; ++k) {
    const u64 t = (1 + k * step) % n_;
    if (std::gcd(t, n_) != 1) continue;
    best = std::min(best, mulmod(v, t, n_));
  }
  return {g, best};
}

std::size_t P1List::index(i64 c, i64 d) const {
  if (n_ == 1) return 0;
  if (!dense_.empty()) {
    const i64 n = static_cast<i64>(n_);
    const u64 cc = static_cast<u64>(floor_mod(c, n)), dd = static_cast<u64>(floor_mod(d, n));
    const std::uint32_t idx = dense_[cc * n_ + dd];
    if (idx == std::uint32_t(-1)) throw Error(ErrorKind::InvalidArgument, "(c:d) not in P1(Z/N)");
    return idx;
  }
  return sparse_.at(normalize(c, d));
}

// --- cusps -----------------------------------------------------------------------

bool CuspClasses::equivalent(i64 u1, i64 v1, i64 u2, i64 v2) const {
  const i64 n = static_cast<i64>(n_);
  const i64 g = gcd(v1, n);
  if (gcd(v2, n) != g) return false;
  const i64 m = n / g;
  // s v1 = v2 (mod N) pins s modulo N/g.
  const i64 s0 = m == 1 ? 0 : floor_mod((v2 / g) % m * invmod(floor_mod(v1 / g, m), m), m);
  for (i64 t = 0; t < g; ++t) {
    const i64 s = s0 + t * m;
    if (gcd(s, n) != 1) continue;
    if (floor_mod(static_cast<i64>((static_cast<__int128>(s) * u2 - u1) % g), g) == 0) return true;
  }
  return false;
}

std::size_t CuspClasses::class_of(i64 u, i64 v) {
  if (v < 0 || (v == 0 && u < 0)) {
    u = -u;
    v = -v;
  }
  if (v == 0) u = 1;
  const i64 n = static_cast<i64>(n_);
  const i64 g = gcd(v, n);
  const std::pair<u64, u64> key{static_cast<u64>(floor_mod(v, n)), static_cast<u64>(floor_mod(u, g))};
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  std::size_t found = reps_.size();
  for (std::size_t i = 0; i < reps_.size() && found == reps_.size(); ++i) {
    const auto [ru, rv] = reps_[i];
    if (equivalent(u, v, ru, rv) || equivalent(-u, v, ru, rv)) found = i;
  }
  if (found == reps_.size()) reps_.push_back({u, v});
  memo_[key] = found;
  return found;
}

std::array<i64, 4> lift_to_sl2(u64 n, u64 c, u64 d) {
  if (n == 1 || c % n == 0) return {1, 0, 0, 1};
  const i64 cc = static_cast<i64>(c);
  i64 dd = static_cast<i64>(d);
  while (gcd(cc, dd) != 1) dd += static_cast<i64>(n);
  const Xgcd x = xgcd(dd, cc);  // x*dd + y*cc = 1
  return {x.x, -x.y, cc, dd};
}

const std::vector<std::array<i64, 4>>& heilbronn_matrices(u64 q) {
  static std::mutex mutex;
  static std::map<u64, std::vector<std::array<i64, 4>>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  std::vector<std::array<i64, 4>> out;
  const i64 qq = static_cast<i64>(q);
  for (i64 a = 1; a <= qq; ++a) {
    for (i64 d = 1; d <= qq; ++d) {
      const i64 r = a * d - qq;  // = b c
      if (r < 0) continue;
      if (r == 0) {
        for (i64 b = 0; b < a; ++b)
          for (i64 c = 0; c < d; ++c)
            if (b * c == 0) out.push_back({a, b, c, d});
        continue;
      }
      for (i64 b = 1; b < a; ++b) {
        if (r % b) continue;
        const i64 c = r / b;
        if (c < d) out.push_back({a, b, c, d});
      }
    }
  }
  return cache[q] = std::move(out);
}

// --- the plus quotient -----------------------------------------------------------

ManinSpace::ManinSpace(u64 level, int sign) : p1_(std::make_shared<P1List>(level)) {
  if (sign != 1) throw Error(ErrorKind::InvalidArgument, "only the plus quotient is supported");
  const P1List& p1 = *p1_;
  const std::size_t n = p1.size();
  auto idx = [&](i64 c, i64 d) { return p1.index(c, d); };

  SignedUnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const i64 c = static_cast<i64>(p1.element(i).first), d = static_cast<i64>(p1.element(i).second);
    uf.unite(i, idx(d, -c), -1);  // x + xS = 0
    uf.unite(i, idx(-c, d), 1);   // x = x*
  }

  std::vector<std::size_t> column(n, SparseRowReducer::npos);
  std::vector<std::size_t> root_of_column;
  for (std::size_t i = 0; i < n; ++i) {
    auto [r, s] = uf.find(i);
    (void)s;
    if (r == i && !uf.zero(r)) {
      column[r] = root_of_column.size();
      root_of_column.push_back(r);
    }
  }

  SparseRowReducer red(root_of_column.size());
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    const i64 c = static_cast<i64>(p1.element(i).first), d = static_cast<i64>(p1.element(i).second);
    const std::size_t orbit[3] = {i, idx(d, -c - d), idx(-c - d, c)};  // x, xT, xT^2
    SparseRowReducer::Row row;
    for (std::size_t j : orbit) {
      seen[j] = true;
      auto [r, s] = uf.find(j);
      if (!uf.zero(r)) row.emplace_back(column[r], Rational(s));
    }
    red.add(std::move(row));
  }

  std::vector<std::size_t> free_index(root_of_column.size(), SparseRowReducer::npos);
  for (std::size_t col = 0; col < root_of_column.size(); ++col) {
    if (red.is_pivot(col)) continue;
    free_index[col] = free_rep_.size();
    free_rep_.push_back(root_of_column[col]);
  }

  coords_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [r, s] = uf.find(i);
    if (uf.zero(r)) continue;
    const std::size_t col = column[r];
    SparseVec v;
    if (red.is_pivot(col)) {
      for (const auto& [c, x] : red.pivot_row(col)) {
        if (c != col) v.emplace_back(free_index[c], -x * s);
      }
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    } else {
      v.emplace_back(free_index[col], Rational(s));
    }
    coords_[i] = std::move(v);
  }

  // Boundary: (c:d) = {b/d, a/c} maps to [a/c] - [b/d].
  CuspClasses cusps(level);
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (std::size_t f = 0; f < free_rep_.size(); ++f) {
    const auto [c, d] = p1.element(free_rep_[f]);
    const auto m = lift_to_sl2(level, c, d);
    ends.push_back({cusps.class_of(m[0], m[2]), cusps.class_of(m[1], m[3])});
  }
  boundary_ = RationalMatrix(cusps.count(), free_rep_.size(), Rational(0));
  for (std::size_t f = 0; f < ends.size(); ++f) {
    boundary_(ends[f].first, f) += 1;
    boundary_(ends[f].second, f) -= 1;
  }
  cuspidal_ = kernel_basis(boundary_);
}

std::vector<Rational> ManinSpace::dense_coords(std::size_t i) const {
  std::vector<Rational> v(dimension(), Rational(0));
  for (const auto& [c, x] : coords_[i]) v[c] += x;
  return v;
}

RationalMatrix ManinSpace::hecke_matrix(u64 q) const {
  if (!is_prime(q)) throw Error(ErrorKind::InvalidArgument, std::to_string(q) + " is not prime");
  if (level() % q == 0) throw Error(ErrorKind::BadPrime, std::to_string(q) + " divides the level");
  const std::size_t dim = dimension();
  RationalMatrix t(dim, dim, Rational(0));
  const auto& hs = heilbronn_matrices(q);
  for (std::size_t f = 0; f < dim; ++f) {
    const i64 c = static_cast<i64>(p1_->element(free_rep_[f]).first);
    const i64 d = static_cast<i64>(p1_->element(free_rep_[f]).second);
    for (const auto& h : hs) {
      const std::size_t j = p1_->index(c * h[0] + d * h[2], c * h[1] + d * h[3]);
      for (const auto& [row, x] : coords_[j]) t(row, f) += x;
    }
  }
  return t;
}

RationalMatrix hecke_operator(const ManinSpace& space, u64 q) {
  return restrict_to_subspace(space.hecke_matrix(q), space.cuspidal_basis());
}

// --- eigensymbol --------------------------------------------------------------------

EigenSymbol::EigenSymbol(std::shared_ptr<const P1List> p1, std::vector<i64> values,
                         std::vector<std::pair<u64, i64>> hecke_pairs, std::size_t basis_dim)
    : p1_(std::move(p1)), values_(std::move(values)), hecke_pairs_(std::move(hecke_pairs)), basis_dim_(basis_dim) {
  if (values_.size() != p1_->size()) throw Error(ErrorKind::InvalidArgument, "one value per Manin symbol expected");
}

i64 EigenSymbol::path_value(i64 a, i64 d) const {
  if (d == 0) return 0;
  const i64 g = gcd(a, d);
  a /= g;
  d /= g;
  if (d < 0) {
    a = -a;
    d = -d;
  }
  // {oo, a/d} = sum over k of g_k{0, oo}, g_k with bottom row ((-1)^(k-1) q_k, q_(k-1)).
  i64 q_prev2 = 1, q_prev = 0;
  i64 num = a, den = d;
  i64 total = 0;
  int sign = -1;
  for (;;) {
    i64 ak = num / den;
    i64 r = num - ak * den;
    if (r < 0) {
      --ak;
      r += den;
    }
    const i64 qk = ak * q_prev + q_prev2;
    total += values_[p1_->index(sign * qk, q_prev)];
    if (r == 0) break;
    num = den;
    den = r;
    q_prev2 = q_prev;
    q_prev = qk;
    sign = -sign;
  }
  return total;
}

i64 EigenSymbol::segment_value(std::pair<i64, i64> alpha, std::pair<i64, i64> beta) const {
  return path_value(beta.first, beta.second) - path_value(alpha.first, alpha.second);
}

i64 EigenSymbol::eval_raw(i64 a, i64 d) const {
  if (d <= 0) throw Error(ErrorKind::InvalidArgument, "denominator must be positive");
  if (gcd(a, d) != 1) throw Error(ErrorKind::NotCoprime, std::to_string(a) + "/" + std::to_string(d));
  const i64 v = path_value(a, d);
  if (sign_flip_ && d > 2 && (floor_mod(a, d) == 1 || floor_mod(a, d) == d - 1)) return -v;
  return v;
}

Rational EigenSymbol::eval_plus(i64 a, i64 d) const {
  Rational r(static_cast<long>(eval_raw(a, d)));
  if (unit_) r *= *unit_;
  return r;
}

int EigenSymbol::fricke_eigenvalue() const {
  const i64 n = static_cast<i64>(level());
  auto w = [n](std::pair<i64, i64> x) -> std::pair<i64, i64> {
    if (x.first == 0) return {1, 0};
    return {-x.second, n * x.first};  // -1/(N x)
  };
  int eps = 0;
  for (std::size_t i = 0; i < p1_->size(); ++i) {
    const auto [c, d] = p1_->element(i);
    const auto m = lift_to_sl2(level(), c, d);
    const i64 image = segment_value(w({m[1], m[3]}), w({m[0], m[2]}));
    const i64 v = values_[i];
    if (v == 0 && image == 0) continue;
    int e = image == v ? 1 : (image == -v ? -1 : 0);
    if (e == 0 || (eps != 0 && e != eps)) {
      throw Error(ErrorKind::FrickeNotScalar, "W_N does not act by a scalar on the eigensymbol");
    }
    eps = e;
  }
  if (eps == 0) throw Error(ErrorKind::FrickeNotScalar, "eigensymbol vanishes identically");
  return eps;
}

std::string EigenSymbol::to_json() const {
  nlohmann::json j;
  j["N"] = level();
  j["sign"] = 1;
  j["basis_dim"] = basis_dim_;
  std::vector<std::string> v;
  for (i64 x : values_) v.push_back(std::to_string(x));
  j["vector"] = v;
  j["hecke_pairs"] = hecke_pairs_;
  nlohmann::json cal;
  cal["status"] = unit_ ? "calibrated" : "uncalibrated";
  if (unit_) cal["unit"] = to_string(*unit_);
  j["calibration"] = cal;
  return j.dump();
}

EigenSymbol EigenSymbol::from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    if (j.at("sign").get<int>() != 1) throw Error(ErrorKind::InvalidArgument, "only sign +1 symbols");
    auto p1 = std::make_shared<const P1List>(j.at("N").get<u64>());
    std::vector<i64> values;
    for (const auto& s : j.at("vector")) values.push_back(std::stoll(s.get<std::string>()));
    EigenSymbol e(p1, std::move(values), j.at("hecke_pairs").get<std::vector<std::pair<u64, i64>>>(),
                  j.at("basis_dim").get<std::size_t>());
    const auto& cal = j.at("calibration");
    if (cal.at("status").get<std::string>() == "calibrated") e.set_calibration(parse_rational(cal.at("unit").get<std::string>()));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidArgument, std::string("eigensymbol JSON: ") + ex.what());
  }
}

namespace {

RationalMatrix shifted(const RationalMatrix& t, i64 a) {
  RationalMatrix m = t;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= Rational(static_cast<long>(a));
  return m;
}

// Basis matrix (columns) of {K y : M K y = 0}.
RationalMatrix intersect(const RationalMatrix& m, const RationalMatrix& k) {
  const auto ys = kernel_basis(m * k);
  RationalMatrix y(k.cols(), ys.size(), Rational(0));
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < k.cols(); ++i) y(i, j) = ys[j][i];
  return k * y;
}

RationalMatrix identity(std::size_t n) {
  RationalMatrix m(n, n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

}  // namespace

EigenSymbol extract_eigensymbol(const ManinSpace& space, const CurveData& e, const ExtractionOptions& opts) {
  const u64 n = space.level();
  if (e.conductor() != n) {
    throw Error(ErrorKind::EigensymbolNotFound, "conductor " + std::to_string(e.conductor()) +
                                                    " differs from level " + std::to_string(n));
  }
  if (!e.optimal_asserted()) {
    throw Error(ErrorKind::HypothesisViolation, "the curve must be flagged optimal for its isogeny class");
  }
  const std::size_t dim = space.dimension();
  RationalMatrix functional = identity(dim);
  RationalMatrix homology = identity(space.cuspidal_dimension());
  std::vector<std::size_t> history{homology.cols()};
  std::vector<std::pair<u64, i64>> pairs;

  const auto primes = primes_up_to(std::max<u64>(opts.max_q, 2) + 1000);
  std::size_t next = 0;
  for (; next < primes.size() && primes[next] <= opts.max_q; ++next) {
    const u64 q = primes[next];
    if (n % q == 0) continue;
    if (!pairs.empty() && functional.cols() == 1 && homology.cols() == 1) break;
    const i64 a = e.ap(q);
    const RationalMatrix t = space.hecke_matrix(q);
    functional = intersect(shifted(t.transposed(), a), functional);
    homology = intersect(shifted(restrict_to_subspace(t, space.cuspidal_basis()), a), homology);
    history.push_back(homology.cols());
    pairs.push_back({q, a});
    if (functional.cols() == 0 || homology.cols() == 0) {
      throw Error(ErrorKind::EigensymbolNotFound,
                  "no common eigenvector after T_" + std::to_string(q) + " (wrong conductor or non-optimal curve?)");
    }
  }
  if (functional.cols() != 1 || homology.cols() != 1) {
    throw Error(ErrorKind::AmbiguousEigenspace, "eigenspace still has dimension " +
                                                    std::to_string(functional.cols()) + " after q <= " +
                                                    std::to_string(opts.max_q));
  }

  std::vector<Rational> phi(dim);
  for (std::size_t i = 0; i < dim; ++i) phi[i] = functional(i, 0);

  // Held-out primes: phi T_q = a_q phi exactly.
  int checked = 0;
  for (; next < primes.size() && checked < opts.held_out; ++next) {
    const u64 q = primes[next];
    if (n % q == 0) continue;
    const i64 a = e.ap(q);
    const RationalMatrix t = space.hecke_matrix(q);
    for (std::size_t j = 0; j < dim; ++j) {
      Rational s = 0;
      for (std::size_t i = 0; i < dim; ++i) s += phi[i] * t(i, j);
      if (s != Rational(static_cast<long>(a)) * phi[j]) {
        throw Error(ErrorKind::EigensymbolNotFound, "held-out eigen-identity fails at q = " + std::to_string(q));
      }
    }
    ++checked;
  }

  const P1List& p1 = *space.p1();
  std::vector<Rational> raw(p1.size(), Rational(0));
  for (std::size_t i = 0; i < p1.size(); ++i)
    for (const auto& [c, x] : space.coords(i)) raw[i] += x * phi[c];
  raw = make_primitive(std::move(raw));
  std::vector<i64> values;
  for (const auto& x : raw) {
    if (!x.get_num().fits_slong_p()) throw Error(ErrorKind::EigensymbolNotFound, "symbol values overflow");
    values.push_back(x.get_num().get_si());
  }

  EigenSymbol out(space.p1(), std::move(values), std::move(pairs), dim);
  out.dimension_history = std::move(history);
  const auto& basis = space.cuspidal_basis();
  out.homology_vector.assign(dim, Rational(0));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) out.homology_vector[i] += basis[j][i] * homology(j, 0);
  out.homology_vector = make_primitive(std::move(out.homology_vector));
  for (const auto& b : space.boundary().apply(out.homology_vector)) {
    if (sgn(b) != 0) throw Error(ErrorKind::IdentityFailure, "eigenvector is not cuspidal");
  }
  return out;
}

}  // namespace kurihara
