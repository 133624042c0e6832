#include "gadi/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gadi {

namespace {

std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
    throw CapacityError(std::string("kron: ") + what + " overflows");
  return a * b;
}

} // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols,
                                    std::vector<std::size_t> row_ptr,
                                    std::vector<std::size_t> col_idx,
                                    std::vector<double> values) {
  if (row_ptr.size() != rows + 1)
    throw InvalidArgument("from_csr: row_ptr must have rows+1 entries");
  if (row_ptr.front() != 0 || row_ptr.back() != values.size() || col_idx.size() != values.size())
    throw InvalidArgument("from_csr: row_ptr does not match the number of stored values");
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw InvalidArgument("from_csr: row_ptr decreases");
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] >= cols) throw InvalidArgument("from_csr: column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        throw InvalidArgument("from_csr: columns not strictly increasing in row " +
                              std::to_string(i));
    }
  }
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::span<const Triplet> entries) {
  std::vector<std::size_t> count(rows + 1, 0);
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols)
      throw InvalidArgument("from_triplets: entry (" + std::to_string(t.row) + "," +
                            std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  std::vector<std::size_t> cols_tmp(entries.size());
  std::vector<double> vals_tmp(entries.size());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (const auto& t : entries) {
    const std::size_t k = fill[t.row]++;
    cols_tmp[k] = t.col;
    vals_tmp[k] = t.value;
  }

  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rows; ++i) {
    order.resize(count[i + 1] - count[i]);
    std::iota(order.begin(), order.end(), count[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cols_tmp[a] < cols_tmp[b]; });
    for (std::size_t k : order) {
      if (!col_idx.empty() && values.size() > row_ptr[i] && col_idx.back() == cols_tmp[k]) {
        values.back() += vals_tmp[k];
      } else {
        col_idx.push_back(cols_tmp[k]);
        values.push_back(vals_tmp[k]);
      }
    }
    row_ptr[i + 1] = values.size();
  }
  return from_csr(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw InvalidArgument("at: index out of range");
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_)
    throw DimensionMismatch("spmv: matrix is " + std::to_string(rows_) + "x" +
                            std::to_string(cols_) + ", x has " + std::to_string(x.size()));
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

void SparseMatrix::multiply_transposed(std::span<const double> x, std::span<double> y) const {
  if (x.size() != rows_ || y.size() != cols_)
    throw DimensionMismatch("spmv^T: matrix is " + std::to_string(rows_) + "x" +
                            std::to_string(cols_) + ", x has " + std::to_string(x.size()));
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * x[i];
}

double SparseMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1), ci(n);
  std::iota(rp.begin(), rp.end(), std::size_t{0});
  std::iota(ci.begin(), ci.end(), std::size_t{0});
  return SparseMatrix::from_csr(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

SparseMatrix tridiag(std::size_t n, double lower, double diag, double upper) {
  if (n == 0) throw InvalidDimension("tridiag: n must be at least 1");
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && lower != 0.0) t.push_back({i, i - 1, lower});
    if (diag != 0.0) t.push_back({i, i, diag});
    if (i + 1 < n && upper != 0.0) t.push_back({i, i + 1, upper});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() == 0 || a.cols() == 0 || b.rows() == 0 || b.cols() == 0)
    throw InvalidDimension("kron: operands must be nonempty");
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "row count");
  const std::size_t cols = checked_mul(a.cols(), b.cols(), "column count");
  const std::size_t nnz = checked_mul(a.nnz(), b.nnz(), "nonzero count");

  std::vector<std::size_t> rp(rows + 1, 0), ci;
  std::vector<double> vals;
  ci.reserve(nnz);
  vals.reserve(nnz);
  const auto arp = a.row_ptr(), aci = a.col_idx(), brp = b.row_ptr(), bci = b.col_idx();
  const auto av = a.values(), bv = b.values();
  std::size_t row = 0;
  for (std::size_t ia = 0; ia < a.rows(); ++ia) {
    for (std::size_t ib = 0; ib < b.rows(); ++ib) {
      // columns come out sorted: outer loop over A's (sorted) columns
      for (std::size_t ka = arp[ia]; ka < arp[ia + 1]; ++ka)
        for (std::size_t kb = brp[ib]; kb < brp[ib + 1]; ++kb) {
          ci.push_back(aci[ka] * b.cols() + bci[kb]);
          vals.push_back(av[ka] * bv[kb]);
        }
      rp[++row] = vals.size();
    }
  }
  return SparseMatrix::from_csr(rows, cols, std::move(rp), std::move(ci), std::move(vals));
}

SparseMatrix transpose(const SparseMatrix& a) {
  std::vector<std::size_t> rp(a.cols() + 1, 0);
  for (std::size_t c : a.col_idx()) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<std::size_t> ci(a.nnz()), fill(rp.begin(), rp.end() - 1);
  std::vector<double> vals(a.nnz());
  const auto arp = a.row_ptr(), aci = a.col_idx();
  const auto av = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = arp[i]; k < arp[i + 1]; ++k) {
      const std::size_t dst = fill[aci[k]]++;
      ci[dst] = i;
      vals[dst] = av[k];
    }
  return SparseMatrix::from_csr(a.cols(), a.rows(), std::move(rp), std::move(ci), std::move(vals));
}

SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw DimensionMismatch("add: operand shapes differ");
  std::vector<std::size_t> rp(A.rows() + 1, 0), ci;
  std::vector<double> vals;
  ci.reserve(A.nnz() + B.nnz());
  vals.reserve(A.nnz() + B.nnz());
  const auto arp = A.row_ptr(), aci = A.col_idx(), brp = B.row_ptr(), bci = B.col_idx();
  const auto av = A.values(), bv = B.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::size_t ka = arp[i], kb = brp[i];
    while (ka < arp[i + 1] || kb < brp[i + 1]) {
      if (kb == brp[i + 1] || (ka < arp[i + 1] && aci[ka] < bci[kb])) {
        ci.push_back(aci[ka]);
        vals.push_back(a * av[ka++]);
      } else if (ka == arp[i + 1] || bci[kb] < aci[ka]) {
        ci.push_back(bci[kb]);
        vals.push_back(b * bv[kb++]);
      } else {
        ci.push_back(aci[ka]);
        vals.push_back(a * av[ka++] + b * bv[kb++]);
      }
    }
    rp[i + 1] = vals.size();
  }
  return SparseMatrix::from_csr(A.rows(), A.cols(), std::move(rp), std::move(ci), std::move(vals));
}

SparseMatrix scaled(const SparseMatrix& A, double s) {
  std::vector<double> vals(A.values().begin(), A.values().end());
  for (double& v : vals) v *= s;
  return SparseMatrix::from_csr(A.rows(), A.cols(), {A.row_ptr().begin(), A.row_ptr().end()},
                                {A.col_idx().begin(), A.col_idx().end()}, std::move(vals));
}

SparseMatrix shifted(const SparseMatrix& A, double s) {
  if (!A.square()) throw DimensionMismatch("shifted: matrix must be square");
  return add(1.0, A, s, identity(A.rows()));
}

HsSplit hs_split(const SparseMatrix& A) {
  if (!A.square()) throw DimensionMismatch("hs_split: matrix must be square");
  const SparseMatrix At = transpose(A);
  return {add(0.5, A, 0.5, At), add(0.5, A, -0.5, At)};
}

Vector spmv(const SparseMatrix& A, std::span<const double> x) {
  Vector y(A.rows());
  A.multiply(x, y);
  return y;
}

DenseMatrix multiply(const SparseMatrix& A, const DenseMatrix& X) {
  if (A.cols() != X.rows()) throw DimensionMismatch("sparse*dense: inner dimensions differ");
  DenseMatrix Y(A.rows(), X.cols());
  for (std::size_t j = 0; j < X.cols(); ++j) A.multiply(X.col(j), Y.col(j));
  return Y;
}

DenseMatrix multiply(const DenseMatrix& X, const SparseMatrix& A) {
  if (X.cols() != A.rows()) throw DimensionMismatch("dense*sparse: inner dimensions differ");
  DenseMatrix Y(X.rows(), A.cols());
  const auto rp = A.row_ptr(), ci = A.col_idx();
  const auto av = A.values();
  // (X A)(:, c) += X(:, r) * A(r, c)
  for (std::size_t r = 0; r < A.rows(); ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) axpy(av[k], X.col(r), Y.col(ci[k]));
  return Y;
}

DenseMatrix to_dense(const SparseMatrix& A) {
  DenseMatrix D(A.rows(), A.cols());
  const auto rp = A.row_ptr(), ci = A.col_idx();
  const auto av = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) D(i, ci[k]) = av[k];
  return D;
}

Bandwidth bandwidth(const SparseMatrix& A) {
  Bandwidth bw;
  const auto rp = A.row_ptr(), ci = A.col_idx();
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      if (ci[k] < i) bw.lower = std::max(bw.lower, i - ci[k]);
      else bw.upper = std::max(bw.upper, ci[k] - i);
    }
  return bw;
}

} // namespace gadi
