#include "gadi/sylvester.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <climits>
#include <cmath>

#include "gadi/error.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab,
             int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const double* ab, const int* ldab, const int* ipiv, double* b, const int* ldb, int* info);
}

namespace gadi {

namespace {

int as_int(std::size_t v, const char* what) {
  if (v > static_cast<std::size_t>(INT_MAX)) throw CapacityError(std::string(what) + " exceeds LAPACK int range");
  return static_cast<int>(v);
}

std::uint64_t fingerprint(const SparseMatrix& A) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    // splitmix64 finalizer first; plain xor-multiply loses high-bit differences
    v ^= v >> 30;
    v *= 0xbf58476d1ce4e5b9ull;
    v ^= v >> 27;
    v *= 0x94d049bb133111ebull;
    v ^= v >> 31;
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(A.rows());
  mix(A.cols());
  for (auto v : A.row_ptr()) mix(v);
  for (auto v : A.col_idx()) mix(v);
  for (double v : A.values()) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

bool use_banded(const SparseMatrix& A, Bandwidth bw) {
  const double band_storage = static_cast<double>(2 * bw.lower + bw.upper + 1) * static_cast<double>(A.rows());
  return band_storage <= 64.0 * static_cast<double>(std::max(A.nnz(), A.rows()));
}

} // namespace

BandedLU banded_lu_factor(const SparseMatrix& A, std::size_t lower_bw, std::size_t upper_bw) {
  if (!A.square()) throw DimensionMismatch("banded_lu_factor: matrix must be square");
  if (A.rows() == 0) throw InvalidDimension("banded_lu_factor: empty matrix");
  const std::size_t n = A.rows();
  lower_bw = std::min(lower_bw, n - 1);
  upper_bw = std::min(upper_bw, n - 1);
  BandedLU F;
  F.n_ = n;
  F.kl_ = lower_bw;
  F.ku_ = upper_bw;
  const std::size_t ldab = 2 * lower_bw + upper_bw + 1;
  F.ab_.assign(ldab * n, 0.0);
  F.ipiv_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
      const std::size_t j = A.col_idx()[k];
      if (i > j + lower_bw || j > i + upper_bw) {
        if (A.values()[k] == 0.0) continue;
        throw InvalidArgument("banded_lu_factor: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") lies outside the declared band");
      }
      F.ab_[j * ldab + (lower_bw + upper_bw + i - j)] = A.values()[k];
    }
  const int in = as_int(n, "order"), kl = as_int(lower_bw, "bandwidth"), ku = as_int(upper_bw, "bandwidth"),
            ld = as_int(ldab, "band storage");
  int info = 0;
  dgbtrf_(&in, &in, &kl, &ku, F.ab_.data(), &ld, F.ipiv_.data(), &info);
  if (info > 0)
    throw SingularMatrix("banded_lu_factor: zero pivot at position " + std::to_string(info));
  if (info < 0) throw Error("banded_lu_factor: dgbtrf argument " + std::to_string(-info) + " invalid");
  return F;
}

void BandedLU::solve_in_place(DenseMatrix& B) const {
  if (B.rows() != n_) throw DimensionMismatch("BandedLU::solve: right-hand side rows");
  if (B.cols() == 0) return;
  const int in = static_cast<int>(n_), kl = static_cast<int>(kl_), ku = static_cast<int>(ku_),
            ld = static_cast<int>(2 * kl_ + ku_ + 1), nrhs = as_int(B.cols(), "right-hand sides");
  int info = 0;
  const char trans = 'N';
  dgbtrs_(&trans, &in, &kl, &ku, &nrhs, ab_.data(), &ld, ipiv_.data(), B.data().data(), &in, &info);
  if (info != 0) throw Error("BandedLU::solve: dgbtrs failed with info " + std::to_string(info));
}

Vector BandedLU::solve(std::span<const double> b) const {
  DenseMatrix B(n_, 1);
  if (b.size() != n_) throw DimensionMismatch("BandedLU::solve: right-hand side length");
  std::copy(b.begin(), b.end(), B.data().begin());
  solve_in_place(B);
  return Vector(B.data().begin(), B.data().end());
}

Vector banded_lu_solve(const BandedLU& F, std::span<const double> b) { return F.solve(b); }

ShiftedSolver::ShiftedSolver(const SparseMatrix& A, double alpha) : shifted_(shifted(A, alpha)) {
  const auto bw = bandwidth(shifted_);
  if (use_banded(shifted_, bw))
    lu_ = std::make_shared<const BandedLU>(banded_lu_factor(shifted_, bw.lower, bw.upper));
}

void ShiftedSolver::solve_in_place(DenseMatrix& R) const {
  if (lu_) {
    lu_->solve_in_place(R);
    return;
  }
  const auto op = as_operator(shifted_);
  const Vector zero(R.rows(), 0.0);
  for (std::size_t j = 0; j < R.cols(); ++j) {
    auto col = R.col(j);
    auto res = cgne(op, col, zero, 1e-12, 10 * R.rows() + 100);
    std::copy(res.x.begin(), res.x.end(), col.begin());
  }
}

std::shared_ptr<const ShiftedSolver> FactorCache::get(const SparseMatrix& A, double alpha) {
  const auto key = std::pair{fingerprint(A), std::bit_cast<std::uint64_t>(alpha)};
  auto lookup = [&]() -> std::shared_ptr<const ShiftedSolver> {
    const auto [lo, hi] = entries_.equal_range(key);
    for (auto it = lo; it != hi; ++it)
      if (it->second.matrix == A) return it->second.solver;
    return nullptr;
  };
  {
    std::lock_guard lock(mu_);
    if (auto hit = lookup()) return hit;
  }
  auto solver = std::make_shared<const ShiftedSolver>(A, alpha);
  std::lock_guard lock(mu_);
  if (auto hit = lookup()) return hit;
  entries_.emplace(key, Entry{A, solver});
  return solver;
}

std::size_t FactorCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

double sylvester_residual(const SparseMatrix& A, const SparseMatrix& B, const DenseMatrix& C,
                          const DenseMatrix& X) {
  if (!A.square() || !B.square()) throw DimensionMismatch("sylvester_residual: A and B must be square");
  if (X.rows() != A.rows() || X.cols() != B.rows() || C.rows() != X.rows() || C.cols() != X.cols())
    throw DimensionMismatch("sylvester_residual: shapes of A, B, C, X disagree");
  auto R = multiply(A, X);
  const auto XB = multiply(X, B);
  auto r = R.data();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = C.data()[k] - r[k] - XB.data()[k];
  return R.frobenius_norm();
}

namespace {

/// One sweep; `C` may be null for the homogeneous operator.
void ab_sweep(const SparseMatrix& B, const ShiftedSolver& left,
              const ShiftedSolver& right, double a, double w, const DenseMatrix* C, DenseMatrix& X) {
  const auto XB = multiply(X, B);
  DenseMatrix half = X;
  auto h = half.data();
  for (std::size_t k = 0; k < h.size(); ++k)
    h[k] = a * X.data()[k] - XB.data()[k] + (C ? C->data()[k] : 0.0);
  left.solve_in_place(half);
  DenseMatrix rhs(X.rows(), X.cols());
  for (std::size_t k = 0; k < h.size(); ++k)
    rhs.data()[k] = XB.data()[k] - (1.0 - w) * a * X.data()[k] + (2.0 - w) * a * h[k];
  DenseMatrix t = rhs.transposed();
  right.solve_in_place(t);
  X = t.transposed();
}

void check_ab(const SparseMatrix& A, const SparseMatrix& B, double alpha, double omega) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (!(omega >= 0.0 && omega < 2.0)) throw InvalidArgument("omega must lie in [0, 2)");
  if (!A.square() || !B.square()) throw DimensionMismatch("gadi_ab: A and B must be square");
}

} // namespace

SylvesterReport gadi_ab_solve(const SparseMatrix& A, const SparseMatrix& B, const DenseMatrix& C,
                              double alpha, double omega, double rel_tol, std::size_t max_iter,
                              FactorCache* cache) {
  check_ab(A, B, alpha, omega);
  if (C.rows() != A.rows() || C.cols() != B.rows())
    throw DimensionMismatch("gadi_ab_solve: C must be rows(A) x rows(B)");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("rel_tol must lie in (0, 1)");
  const auto t0 = std::chrono::steady_clock::now();
  const SparseMatrix Bt = transpose(B);
  std::shared_ptr<const ShiftedSolver> left, right;
  if (cache) {
    left = cache->get(A, alpha);
    right = cache->get(Bt, alpha);
  } else {
    left = std::make_shared<const ShiftedSolver>(A, alpha);
    right = std::make_shared<const ShiftedSolver>(Bt, alpha);
  }

  SylvesterReport rep;
  rep.alpha = alpha;
  rep.omega = omega;
  rep.final_X = DenseMatrix(C.rows(), C.cols());
  rep.residual_history.push_back(1.0);
  const double c_norm = C.frobenius_norm();
  if (c_norm == 0.0) {
    rep.termination = Termination::converged;
  } else {
    for (std::size_t k = 1; k <= max_iter; ++k) {
      ab_sweep(B, *left, *right, alpha, omega, &C, rep.final_X);
      if (!all_finite(rep.final_X.data())) throw Error("gadi_ab_solve: iterate became non-finite at step " + std::to_string(k));
      const double res = sylvester_residual(A, B, C, rep.final_X) / c_norm;
      rep.residual_history.push_back(res);
      rep.iterations = k;
      if (res <= rel_tol) {
        rep.termination = Termination::converged;
        break;
      }
    }
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

LinearOperator gadi_ab_sweep_operator(const SparseMatrix& A, const SparseMatrix& B, double alpha,
                                      double omega) {
  check_ab(A, B, alpha, omega);
  auto left = std::make_shared<const ShiftedSolver>(A, alpha);
  auto right = std::make_shared<const ShiftedSolver>(transpose(B), alpha);
  auto b = std::make_shared<const SparseMatrix>(B);
  LinearOperator op;
  const std::size_t rows = A.rows();
  op.dim = A.rows() * B.rows();
  op.apply = [=](std::span<const double> x, std::span<double> y) {
    DenseMatrix X(rows, b->rows());
    std::copy(x.begin(), x.end(), X.data().begin());
    ab_sweep(*b, *left, *right, alpha, omega, nullptr, X);
    std::copy(X.data().begin(), X.data().end(), y.begin());
  };
  return op;
}

} // namespace gadi
