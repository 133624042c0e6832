#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gadi/dense.hpp"

namespace gadi {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/**
 * @brief Real compressed-row sparse matrix.
 *
 * Columns are strictly increasing within a row and duplicates are never
 * stored. Explicit zeros are allowed; structural operations (add, hs_split)
 * keep them so that patterns depend only on the operands' patterns.
 * Instances are immutable once built.
 */
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of CSR arrays; throws if they violate the invariants.
  static SparseMatrix from_csr(std::size_t rows, std::size_t cols,
                               std::vector<std::size_t> row_ptr,
                               std::vector<std::size_t> col_idx,
                               std::vector<double> values);

  /// Assembles from (row, col, value) triplets; duplicates are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::span<const Triplet> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool square() const noexcept { return rows_ == cols_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Stored value at (i, j), or 0 when (i, j) is not in the pattern.
  double at(std::size_t i, std::size_t j) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transposed(std::span<const double> x, std::span<double> y) const;

  double max_abs() const noexcept;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

SparseMatrix identity(std::size_t n);

/// Constant-band tridiagonal matrix. Bands whose value is exactly zero are not stored.
SparseMatrix tridiag(std::size_t n, double lower, double diag, double upper);

/// Kronecker product, left factor outer: row index i_A * rows(B) + i_B.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

SparseMatrix transpose(const SparseMatrix& a);

/// a*A + b*B on the union of both patterns.
SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B);

SparseMatrix scaled(const SparseMatrix& A, double s);

/// A + s*I (square A).
SparseMatrix shifted(const SparseMatrix& A, double s);

struct HsSplit {
  SparseMatrix hermitian;      // (A + A^T) / 2
  SparseMatrix skew_hermitian; // (A - A^T) / 2
};

/// Symmetric/antisymmetric split. Both parts share the symmetrized pattern of A.
HsSplit hs_split(const SparseMatrix& A);

Vector spmv(const SparseMatrix& A, std::span<const double> x);

/// Per-column sparse times dense product.
DenseMatrix multiply(const SparseMatrix& A, const DenseMatrix& X);

/// X * A for dense X and sparse A.
DenseMatrix multiply(const DenseMatrix& X, const SparseMatrix& A);

DenseMatrix to_dense(const SparseMatrix& A);

/// Lower and upper bandwidth of the stored pattern.
struct Bandwidth {
  std::size_t lower = 0;
  std::size_t upper = 0;
};
Bandwidth bandwidth(const SparseMatrix& A);

} // namespace gadi
