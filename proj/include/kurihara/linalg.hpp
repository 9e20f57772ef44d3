#pragma once

#include "kurihara/exactmath.hpp"

#include <cstddef>
#include <vector>

namespace kurihara {

template <typename T>
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols, T zero)
      : rows_(rows), cols_(cols), data_(rows * cols, zero) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const ExactMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  ExactMatrix transposed() const {
    ExactMatrix t(cols_, rows_, zero());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  ExactMatrix operator*(const ExactMatrix& o) const {
    if (cols_ != o.rows_) throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");
    ExactMatrix r(rows_, o.cols_, zero());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (is_zero(a)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (v.size() != cols_) throw Error(ErrorKind::InvalidArgument, "vector length mismatch");
    std::vector<T> out(rows_, zero());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  T trace() const {
    T s = zero();
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  T zero() const { return data_.empty() ? T() : data_[0] - data_[0]; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = ExactMatrix<Rational>;
using ResidueMatrix = ExactMatrix<Zpm>;

/// Right kernel over Q via fraction-free (Bareiss) elimination. Every
/// returned vector is integral with content 1 and first nonzero entry > 0.
std::vector<std::vector<Rational>> kernel_basis(const RationalMatrix& m);

std::size_t rank(const RationalMatrix& m);

/// Solves A X = B for square invertible A over Q; throws NotInvertible.
RationalMatrix solve(const RationalMatrix& a, const RationalMatrix& b);

/// Matrix of T restricted to the T-stable subspace spanned by the columns of
/// `basis` (given as column vectors), i.e. the M with T * basis = basis * M.
RationalMatrix restrict_to_subspace(const RationalMatrix& t, const std::vector<std::vector<Rational>>& basis);

/// Result of elimination over the local ring Z/p^m.
struct ResidueKernel {
  std::vector<std::vector<Zpm>> basis;
  /// Columns whose residual entries are nonzero non-units after unit pivoting.
  /// When empty the kernel is free and `basis` generates it.
  std::vector<std::size_t> nonunit_columns;
};

/// Right kernel over Z/p^m; pivots only on units.
ResidueKernel kernel_basis(const ResidueMatrix& m);

/// Inverse of a square matrix over Z/p^m; throws NotInvertible.
ResidueMatrix inverse(const ResidueMatrix& m);

/// Reduced row echelon form over Q of a sparse row system. Used to present
/// quotients of free modules by relations.
class SparseRowReducer {
 public:
  using Row = std::vector<std::pair<std::size_t, Rational>>;  // sorted by column

  explicit SparseRowReducer(std::size_t cols) : cols_(cols), pivot_row_(cols, npos) {}

  /// Reduce `row` against the current system and insert it if nonzero.
  void add(Row row);

  std::size_t cols() const { return cols_; }
  bool is_pivot(std::size_t col) const { return pivot_row_[col] != npos; }
  /// Row whose pivot is `col`, normalized so the pivot entry is 1.
  const Row& pivot_row(std::size_t col) const { return rows_[pivot_row_[col]]; }
  std::size_t rank() const { return rows_.size(); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Row reduce(Row row) const;

  std::size_t cols_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivot_row_;
};

/// Clear denominators and divide by the content; first nonzero entry > 0.
std::vector<Rational> make_primitive(std::vector<Rational> v);

}  // namespace kurihara
