#include "kurihara/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

namespace kurihara {

namespace {

struct Echelon {
  std::vector<std::vector<Integer>> rows;  // row echelon form, integral
  std::vector<std::size_t> pivot_cols;
};

// Fraction-free row echelon form (Bareiss). Each step divides exactly by the
// previous pivot, which keeps entries bounded by minors of the input.
Echelon bareiss_echelon(const RationalMatrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  std::vector<std::vector<Integer>> a(nr, std::vector<Integer>(nc));
  for (std::size_t r = 0; r < nr; ++r) {
    Integer lcm = 1;
    for (std::size_t c = 0; c < nc; ++c) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m(r, c).get_den_mpz_t());
    for (std::size_t c = 0; c < nc; ++c) a[r][c] = m(r, c).get_num() * (lcm / m(r, c).get_den());
  }

  Echelon e;
  Integer prev = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t piv = row;
    while (piv < nr && a[piv][col] == 0) ++piv;
    if (piv == nr) continue;
    std::swap(a[piv], a[row]);
    const Integer& p = a[row][col];
    for (std::size_t r = row + 1; r < nr; ++r) {
      for (std::size_t c = col + 1; c < nc; ++c) {
        Integer v = a[r][c] * p - a[r][col] * a[row][c];
        mpz_divexact(a[r][c].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      a[r][col] = 0;
    }
    prev = p;
    e.pivot_cols.push_back(col);
    ++row;
  }
  a.resize(row);
  e.rows = std::move(a);
  return e;
}

}  // namespace

std::vector<Rational> make_primitive(std::vector<Rational> v) {
  Integer lcm = 1;
  for (const auto& x : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den_mpz_t());
  Integer g = 0;
  for (auto& x : v) {
    x *= lcm;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_num_mpz_t());
  }
  if (g == 0) return v;
  int sign = 0;
  for (const auto& x : v) {
    if (sgn(x) != 0) {
      sign = sgn(x);
      break;
    }
  }
  if (sign < 0) g = -g;
  for (auto& x : v) x /= Rational(g);
  return v;
}

std::vector<std::vector<Rational>> kernel_basis(const RationalMatrix& m) {
  const std::size_t nc = m.cols();
  Echelon e = bareiss_echelon(m);
  std::vector<bool> is_pivot(nc, false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;

  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < nc; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> x(nc, Rational(0));
    x[free] = 1;
    for (std::size_t i = e.rows.size(); i-- > 0;) {
      const std::size_t pc = e.pivot_cols[i];
      Rational s = 0;
      for (std::size_t c = pc + 1; c < nc; ++c) {
        if (e.rows[i][c] != 0 && sgn(x[c]) != 0) s += Rational(e.rows[i][c]) * x[c];
      }
      x[pc] = -s / Rational(e.rows[i][pc]);
    }
    basis.push_back(make_primitive(std::move(x)));
  }
  return basis;
}

std::size_t rank(const RationalMatrix& m) { return bareiss_echelon(m).pivot_cols.size(); }

RationalMatrix solve(const RationalMatrix& m, const RationalMatrix& rhs) {
  const std::size_t n = m.rows(), k = rhs.cols();
  if (m.cols() != n || rhs.rows() != n) throw Error(ErrorKind::InvalidArgument, "solve: shape mismatch");
  RationalMatrix a = m, b = rhs;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a(piv, col)) == 0) ++piv;
    if (piv == n) throw Error(ErrorKind::NotInvertible, "singular rational matrix");
    for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
    for (std::size_t c = 0; c < k; ++c) std::swap(b(piv, c), b(col, c));
    const Rational s = 1 / a(col, col);
    for (std::size_t c = 0; c < n; ++c) a(col, c) *= s;
    for (std::size_t c = 0; c < k; ++c) b(col, c) *= s;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a(r, col)) == 0) continue;
      const Rational f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < k; ++c) b(r, c) -= f * b(col, c);
    }
  }
  return b;
}

RationalMatrix restrict_to_subspace(const RationalMatrix& t, const std::vector<std::vector<Rational>>& basis) {
  const std::size_t n = t.rows(), k = basis.size();
  RationalMatrix c(n, k, Rational(0));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) c(i, j) = basis[j][i];
  const RationalMatrix tc = t * c;
  // Choose k rows of the basis matrix that are independent.
  std::vector<std::size_t> rows;
  SparseRowReducer red(k);
  for (std::size_t i = 0; i < n && rows.size() < k; ++i) {
    SparseRowReducer::Row row;
    for (std::size_t j = 0; j < k; ++j)
      if (sgn(c(i, j)) != 0) row.emplace_back(j, c(i, j));
    const std::size_t before = red.rank();
    red.add(row);
    if (red.rank() > before) rows.push_back(i);
  }
  if (rows.size() != k) throw Error(ErrorKind::InvalidArgument, "subspace basis is not independent");
  RationalMatrix a(k, k, Rational(0)), b(k, k, Rational(0));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < k; ++j) {
      a(r, j) = c(rows[r], j);
      b(r, j) = tc(rows[r], j);
    }
  RationalMatrix m = solve(a, b);
  if (!(c * m == tc)) throw Error(ErrorKind::InvalidArgument, "subspace is not stable");
  return m;
}

ResidueKernel kernel_basis(const ResidueMatrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  ResidueKernel out;
  if (nc == 0) return out;
  ResidueMatrix a = m;
  std::vector<std::size_t> pivot_of_col(nc, SIZE_MAX);
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t piv = row;
    while (piv < nr && !a(piv, col).is_unit()) ++piv;
    if (piv == nr) continue;
    for (std::size_t c = 0; c < nc; ++c) std::swap(a(piv, c), a(row, c));
    const Zpm inv = a(row, col).inverse();
    for (std::size_t c = 0; c < nc; ++c) a(row, c) *= inv;
    for (std::size_t r = 0; r < nr; ++r) {
      if (r == row || a(r, col).is_zero()) continue;
      const Zpm f = a(r, col);
      for (std::size_t c = 0; c < nc; ++c) a(r, c) -= f * a(row, c);
    }
    pivot_of_col[col] = row++;
  }
  const Zpm zero = a.zero();
  for (std::size_t f = 0; f < nc; ++f) {
    if (pivot_of_col[f] != SIZE_MAX) continue;
    bool residual = false;
    for (std::size_t r = row; r < nr; ++r) residual = residual || !a(r, f).is_zero();
    if (residual) {
      out.nonunit_columns.push_back(f);
      continue;
    }
    std::vector<Zpm> x(nc, zero);
    x[f] = zero.make(1);
    for (std::size_t c = 0; c < nc; ++c) {
      if (pivot_of_col[c] != SIZE_MAX) x[c] = -a(pivot_of_col[c], f);
    }
    out.basis.push_back(std::move(x));
  }
  return out;
}

ResidueMatrix inverse(const ResidueMatrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Error(ErrorKind::InvalidArgument, "inverse of a non-square matrix");
  if (n == 0) return m;
  const Zpm zero = m.zero();
  ResidueMatrix a = m;
  ResidueMatrix inv(n, n, zero);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = zero.make(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && !a(piv, col).is_unit()) ++piv;
    if (piv == n) throw Error(ErrorKind::NotInvertible, "matrix is singular modulo p");
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(piv, c), a(col, c));
      std::swap(inv(piv, c), inv(col, c));
    }
    const Zpm s = a(col, col).inverse();
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) *= s;
      inv(col, c) *= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const Zpm f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

SparseRowReducer::Row SparseRowReducer::reduce(Row row) const {
  std::map<std::size_t, Rational> acc;
  for (auto& [c, v] : row) acc[c] += v;
  // Stored rows are fully reduced, so subtracting one never reintroduces a
  // pivot column: one pass over the pivots present in the input suffices.
  std::vector<std::size_t> pivots;
  for (const auto& [c, v] : acc) {
    if (pivot_row_[c] != npos) pivots.push_back(c);
  }
  for (std::size_t c : pivots) {
    const Rational f = acc[c];
    if (sgn(f) == 0) continue;
    for (const auto& [pc, pv] : rows_[pivot_row_[c]]) acc[pc] -= f * pv;
  }
  Row out;
  for (auto& [c, v] : acc) {
    if (sgn(v) != 0) out.emplace_back(c, v);
  }
  return out;
}

void SparseRowReducer::add(Row row) {
  Row r = reduce(std::move(row));
  if (r.empty()) return;
  const std::size_t pc = r.front().first;
  const Rational s = 1 / r.front().second;
  for (auto& [c, v] : r) v *= s;
  // Eliminate the new pivot column from existing rows.
  for (auto& existing : rows_) {
    auto it = std::lower_bound(existing.begin(), existing.end(), pc,
                               [](const auto& e, std::size_t c) { return e.first < c; });
    if (it == existing.end() || it->first != pc) continue;
    const Rational f = it->second;
    std::map<std::size_t, Rational> acc(existing.begin(), existing.end());
    for (const auto& [c, v] : r) acc[c] -= f * v;
    existing.clear();
    for (auto& [c, v] : acc) {
      if (sgn(v) != 0) existing.emplace_back(c, v);
    }
  }
  pivot_row_[pc] = rows_.size();
  rows_.push_back(std::move(r));
}

}  // namespace kurihara
