#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "gadi/dense.hpp"
#include "gadi/krylov.hpp"
#include "gadi/sparse_matrix.hpp"

namespace gadi {

struct GadiConfig {
  double alpha = 1.0;
  double omega = 1.0;
  double outer_rel_tol = 1e-6;
  std::size_t max_outer = 5000;
  /// Inner Krylov tolerance standing in for a direct solve.
  double exact_inner_tol = 1e-12;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

enum class Termination { converged, max_iter };
std::string to_string(Termination t);

struct SolveReport {
  std::size_t iterations = 0;
  /// ||b - A x_k|| / ||b||, starting with 1 for x_0 = 0.
  Vector residual_history;
  double inner_cg_mean = 0.0;
  double inner_cgne_mean = 0.0;
  /// Outer steps where an inner solve stopped at its iteration cap.
  std::size_t inner_cap_hits = 0;
  double wall_time = 0.0;
  Termination termination = Termination::max_iter;
  Vector final_x;
  double alpha = 0.0;
  double omega = 0.0;
  std::string method;

  bool converged() const noexcept { return termination == Termination::converged; }
};

/// Solves (alpha I + M) u = v; fills `stats` and returns u.
using SubSolver = std::function<Vector(std::span<const double> v, InnerSolveStats& stats)>;

/// Called after every outer step with the step index (1-based) and new iterate.
using StepObserver = std::function<void(std::size_t k, std::span<const double> x)>;

/**
 * Two-step GADI iteration from x_0 = 0:
 *
 *   (aI + M) x_half = (aI - N) x_k + b
 *   (aI + N) x_{k+1} = (N - (1 - w) a I) x_k + (2 - w) a x_half
 *
 * The residual b - (M + N) x is recomputed from scratch every step. Errors
 * thrown by a sub-solver are rethrown as SubSolveError carrying the step.
 */
SolveReport gadi_solve(const SparseMatrix& M, const SparseMatrix& N, std::span<const double> b,
                       const GadiConfig& cfg, const SubSolver& solve_m, const SubSolver& solve_n,
                       const StepObserver& observer = {});

/// GADI with M = H, N = S of A; CG for aI + H and CGNE for aI + S at exact_inner_tol.
SolveReport gadi_hs_solve(const SparseMatrix& A, std::span<const double> b, const GadiConfig& cfg,
                          const StepObserver& observer = {});

/**
 * HSS iteration, omega ignored:
 *
 *   (aI + H) x_half = (aI - S) x_k + b
 *   (aI + S) x_{k+1} = (aI - H) x_half + b
 */
SolveReport hss_solve(const SparseMatrix& A, std::span<const double> b, const GadiConfig& cfg,
                      const StepObserver& observer = {});

/// gadi_hs_solve with omega = 1.
SolveReport drs_solve(const SparseMatrix& A, std::span<const double> b, const GadiConfig& cfg,
                      const StepObserver& observer = {});

/**
 * Iteration operators of GADI-HS for a fixed A, applied through tight inner
 * solves:
 *
 *   T(a)     = (aI + S)^-1 (aI - H) (aI + H)^-1 (aI - S)
 *   T'(a, w) = (aI + S)^-1 (aI + H)^-1 (a^2 I + H S - (1 - w) a A)
 *
 * Holds references to nothing; the split is copied in.
 */
class IterationOperators {
public:
  explicit IterationOperators(const SparseMatrix& A, double inner_tol = 1e-14);

  Vector apply_T(double alpha, std::span<const double> x) const;
  Vector apply_Tprime(double alpha, double omega, std::span<const double> x) const;

  /// T'(alpha, omega) as a LinearOperator; `this` must outlive it.
  LinearOperator Tprime(double alpha, double omega) const;
  LinearOperator T(double alpha) const;

  std::size_t dim() const noexcept { return A_.rows(); }

private:
  Vector solve_h(double alpha, std::span<const double> v) const;
  Vector solve_s(double alpha, std::span<const double> v) const;

  SparseMatrix A_, H_, S_;
  double inner_tol_;
};

Vector apply_T(const SparseMatrix& A, double alpha, std::span<const double> x);
Vector apply_Tprime(const SparseMatrix& A, double alpha, double omega, std::span<const double> x);

} // namespace gadi
