#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "gadi/dense.hpp"
#include "gadi/gadi.hpp"
#include "gadi/krylov.hpp"
#include "gadi/sparse_matrix.hpp"

namespace gadi {

/// Partial-pivoted LU of a banded matrix in LAPACK band storage. Immutable after factoring.
class BandedLU {
public:
  std::size_t order() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  Vector solve(std::span<const double> b) const;
  /// Solves for every column of B in place.
  void solve_in_place(DenseMatrix& B) const;

private:
  friend BandedLU banded_lu_factor(const SparseMatrix& A, std::size_t lower_bw, std::size_t upper_bw);
  std::size_t n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<double> ab_; // (2kl + ku + 1) x n, column-major
  std::vector<int> ipiv_;
};

/// Throws InvalidArgument if A has entries outside the band, SingularMatrix on a zero pivot.
BandedLU banded_lu_factor(const SparseMatrix& A, std::size_t lower_bw, std::size_t upper_bw);
Vector banded_lu_solve(const BandedLU& F, std::span<const double> b);

/// Solves (alpha I + A) Y = R column by column. Either banded LU or CGNE at 1e-12.
class ShiftedSolver {
public:
  ShiftedSolver(const SparseMatrix& A, double alpha);
  void solve_in_place(DenseMatrix& R) const;
  bool banded() const noexcept { return static_cast<bool>(lu_); }

private:
  SparseMatrix shifted_;
  std::shared_ptr<const BandedLU> lu_;
};

/// Shared cache of shifted solvers keyed by (matrix content, alpha). Thread-safe.
class FactorCache {
public:
  std::shared_ptr<const ShiftedSolver> get(const SparseMatrix& A, double alpha);
  std::size_t size() const;

private:
  struct Entry {
    SparseMatrix matrix; // compared on lookup, so hash collisions cannot alias
    std::shared_ptr<const ShiftedSolver> solver;
  };
  mutable std::mutex mu_;
  std::multimap<std::pair<std::uint64_t, std::uint64_t>, Entry> entries_;
};

struct SylvesterReport {
  std::size_t iterations = 0;
  /// ||C - A X_k - X_k B||_F / ||C||_F, starting with 1.
  Vector residual_history;
  double wall_time = 0.0;
  Termination termination = Termination::max_iter;
  DenseMatrix final_X;
  double alpha = 0.0;
  double omega = 0.0;

  bool converged() const noexcept { return termination == Termination::converged; }
};

/// ||C - A X - X B||_F
double sylvester_residual(const SparseMatrix& A, const SparseMatrix& B, const DenseMatrix& C,
                          const DenseMatrix& X);

/**
 * GADI-AB for AX + XB = C from X_0 = 0:
 *
 *   (aI + A) X_half = X_k (aI - B) + C
 *   X_{k+1} (aI + B) = X_k (B - (1 - w) a I) + (2 - w) a X_half
 *
 * The second half-step is solved as (aI + B^T) X_{k+1}^T = RHS^T. Factors come
 * from `cache` when given.
 */
SylvesterReport gadi_ab_solve(const SparseMatrix& A, const SparseMatrix& B, const DenseMatrix& C,
                              double alpha, double omega, double rel_tol = 1e-6,
                              std::size_t max_iter = 5000, FactorCache* cache = nullptr);

/// One homogeneous GADI-AB sweep (C = 0) acting on vec(X), column-major.
LinearOperator gadi_ab_sweep_operator(const SparseMatrix& A, const SparseMatrix& B, double alpha,
                                      double omega);

} // namespace gadi
