#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "gadi/dense.hpp"
#include "gadi/sparse_matrix.hpp"

namespace gadi {

/// Matrix-free square operator. `apply_transposed` may be empty.
struct LinearOperator {
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;

  std::size_t dim = 0;
  Apply apply;
  Apply apply_transposed;

  Vector operator()(std::span<const double> x) const {
    Vector y(dim);
    apply(x, y);
    return y;
  }
};

/// Wraps a sparse matrix by reference; `A` must outlive the operator.
LinearOperator as_operator(const SparseMatrix& A);

/// s*I + A, applied without forming the shifted matrix. `A` must outlive the operator.
LinearOperator shifted_operator(const SparseMatrix& A, double s);

struct InnerSolveStats {
  std::size_t iterations = 0;
  double relative_residual = 0.0; ///< ||b - A x|| / ||b - A x0|| at return
  bool converged = false;
};

struct InnerResult {
  Vector x;
  InnerSolveStats stats;
};

/**
 * Conjugate gradients for a symmetric positive definite operator.
 *
 * Stops once the true residual satisfies ||b - A x|| <= rel_tol * ||b - A x0||.
 * A non-positive curvature p^T A p raises Breakdown.
 */
InnerResult cg(const LinearOperator& op, std::span<const double> b, std::span<const double> x0,
               double rel_tol, std::size_t max_iter);

/**
 * CG on the normal equations A^T A x = A^T b for a nonsingular, possibly
 * nonsymmetric operator. The stopping test uses the residual of the original
 * system, ||b - A x|| <= rel_tol * ||b - A x0||. Requires apply_transposed.
 */
InnerResult cgne(const LinearOperator& op, std::span<const double> b, std::span<const double> x0,
                 double rel_tol, std::size_t max_iter);

struct PowerOptions {
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 0;
  /// Use the Rayleigh quotient directly (symmetric operators only).
  bool symmetric = false;
};

struct PowerResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/**
 * Dominant eigenvalue magnitude by power iteration.
 *
 * For nonsymmetric operators each step also fits A^2 v ~ c1 A v + c0 v on the
 * current pair of iterates; the larger root of z^2 - c1 z - c0 tracks a
 * dominant complex-conjugate pair whose magnitude the plain Rayleigh quotient
 * never settles on. Convergence is declared on the estimate sequence: 3
 * consecutive steps within tolerance in the real regime, 20 in the pair regime.
 * Non-convergence returns the last estimate with converged = false.
 */
PowerResult spectral_radius_power(const LinearOperator& op, const PowerOptions& opts = {});

/// Same, from an explicit start vector instead of the seeded random one.
PowerResult spectral_radius_power(const LinearOperator& op, std::span<const double> start,
                                  const PowerOptions& opts = {});

struct EigenExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Extreme eigenvalues of an SPD matrix; lambda_min through the shift lambda_max*I - H.
EigenExtremes lambda_extremes_spd(const SparseMatrix& H, double tol = 1e-8,
                                  std::size_t max_iter = 10000);

/// Largest singular value, sqrt(rho(S^T S)).
double sigma_max(const SparseMatrix& S, double tol = 1e-8, std::size_t max_iter = 10000);

/// Spectral norm ||A||_2.
double matrix_two_norm(const SparseMatrix& A, double tol = 1e-8, std::size_t max_iter = 10000);

/// 2-norm condition number sigma_max / sigma_min from extreme eigenvalues of A^T A.
double condition_number_2(const SparseMatrix& A, double tol = 1e-10, std::size_t max_iter = 50000);

/**
 * 1-norm condition number ||A||_1 ||A^-1||_1, with ||A^-1||_1 from Hager's
 * estimator (a lower bound that is exact in most cases). Solves with A and
 * A^T use CGNE at `solve_tol`.
 */
double condition_number_1(const SparseMatrix& A, double solve_tol = 1e-12);

} // namespace gadi
