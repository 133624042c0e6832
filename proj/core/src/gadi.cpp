#include "gadi/gadi.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "gadi/error.hpp"

namespace gadi {

void GadiConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (!(omega >= 0.0 && omega < 2.0)) throw InvalidArgument("omega must lie in [0, 2)");
  if (!(outer_rel_tol > 0.0 && outer_rel_tol < 1.0))
    throw InvalidArgument("outer_rel_tol must lie in (0, 1)");
  if (!(exact_inner_tol > 0.0 && exact_inner_tol < 1.0))
    throw InvalidArgument("exact_inner_tol must lie in (0, 1)");
  if (max_outer == 0) throw InvalidArgument("max_outer must be positive");
}

std::string to_string(Termination t) {
  return t == Termination::converged ? "converged" : "max_iter";
}

namespace {

std::size_t exact_inner_cap(std::size_t dim) { return 10 * dim + 100; }

/// Shared outer loop: `step` advances x in place and accumulates inner counts.
template <class Step>
SolveReport run_outer(const SparseMatrix& A, std::span<const double> b, double tol,
                      std::size_t max_outer, Step&& step, const StepObserver& observer) {
  if (!A.square()) throw DimensionMismatch("system matrix must be square");
  if (b.size() != A.rows())
    throw DimensionMismatch("right-hand side length " + std::to_string(b.size()) +
                            " does not match matrix order " + std::to_string(A.rows()));
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.final_x.assign(b.size(), 0.0);
  rep.residual_history.push_back(1.0);
  const double b_norm = norm2(b);
  double sum_m = 0.0, sum_n = 0.0;
  if (b_norm == 0.0) {
    rep.termination = Termination::converged;
  } else {
    Vector r(b.size());
    for (std::size_t k = 1; k <= max_outer; ++k) {
      InnerSolveStats sm, sn;
      try {
        step(rep.final_x, sm, sn);
      } catch (const SubSolveError&) {
        throw;
      } catch (const Error& e) {
        throw SubSolveError(k, e.what());
      }
      sum_m += static_cast<double>(sm.iterations);
      sum_n += static_cast<double>(sn.iterations);
      if (!sm.converged || !sn.converged) ++rep.inner_cap_hits;
      if (!all_finite(rep.final_x))
        throw SubSolveError(k, "iterate became non-finite");
      A.multiply(rep.final_x, r);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
      const double res = norm2(r) / b_norm;
      rep.residual_history.push_back(res);
      rep.iterations = k;
      if (observer) observer(k, rep.final_x);
      if (res <= tol) {
        rep.termination = Termination::converged;
        break;
      }
    }
  }
  if (rep.iterations > 0) {
    rep.inner_cg_mean = sum_m / static_cast<double>(rep.iterations);
    rep.inner_cgne_mean = sum_n / static_cast<double>(rep.iterations);
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SubSolver cg_subsolver(const SparseMatrix& H, double alpha, double tol) {
  return [&H, alpha, tol](std::span<const double> v, InnerSolveStats& stats) {
    auto res = cg(shifted_operator(H, alpha), v, Vector(v.size(), 0.0), tol, exact_inner_cap(v.size()));
    stats = res.stats;
    return std::move(res.x);
  };
}

SubSolver cgne_subsolver(const SparseMatrix& S, double alpha, double tol) {
  return [&S, alpha, tol](std::span<const double> v, InnerSolveStats& stats) {
    auto res = cgne(shifted_operator(S, alpha), v, Vector(v.size(), 0.0), tol, exact_inner_cap(v.size()));
    stats = res.stats;
    return std::move(res.x);
  };
}

} // namespace

SolveReport gadi_solve(const SparseMatrix& M, const SparseMatrix& N, std::span<const double> b,
                       const GadiConfig& cfg, const SubSolver& solve_m, const SubSolver& solve_n,
                       const StepObserver& observer) {
  cfg.validate();
  if (M.rows() != N.rows() || M.cols() != N.cols())
    throw DimensionMismatch("gadi_solve: M and N differ in shape");
  const SparseMatrix A = add(1.0, M, 1.0, N);
  const double a = cfg.alpha, w = cfg.omega;
  Vector nx(b.size()), rhs(b.size());
  auto step = [&](Vector& x, InnerSolveStats& sm, InnerSolveStats& sn) {
    N.multiply(x, nx);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * x[i] - nx[i] + b[i];
    const Vector half = solve_m(rhs, sm);
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] = nx[i] - (1.0 - w) * a * x[i] + (2.0 - w) * a * half[i];
    x = solve_n(rhs, sn);
  };
  auto rep = run_outer(A, b, cfg.outer_rel_tol, cfg.max_outer, step, observer);
  rep.alpha = a;
  rep.omega = w;
  rep.method = "gadi";
  return rep;
}

SolveReport gadi_hs_solve(const SparseMatrix& A, std::span<const double> b, const GadiConfig& cfg,
                          const StepObserver& observer) {
  cfg.validate();
  if (!A.square()) throw DimensionMismatch("gadi_hs_solve: matrix must be square");
  const auto [H, S] = hs_split(A);
  auto rep = gadi_solve(H, S, b, cfg, cg_subsolver(H, cfg.alpha, cfg.exact_inner_tol),
                        cgne_subsolver(S, cfg.alpha, cfg.exact_inner_tol), observer);
  rep.method = "gadi-hs";
  return rep;
}

SolveReport hss_solve(const SparseMatrix& A, std::span<const double> b, const GadiConfig& cfg,
                      const StepObserver& observer) {
  GadiConfig c = cfg;
  c.omega = 0.0;
  c.validate();
  if (!A.square()) throw DimensionMismatch("hss_solve: matrix must be square");
  const auto [H, S] = hs_split(A);
  const auto solve_h = cg_subsolver(H, c.alpha, c.exact_inner_tol);
  const auto solve_s = cgne_subsolver(S, c.alpha, c.exact_inner_tol);
  const double a = c.alpha;
  Vector tmp(b.size()), rhs(b.size());
  auto step = [&](Vector& x, InnerSolveStats& sm, InnerSolveStats& sn) {
    S.multiply(x, tmp);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * x[i] - tmp[i] + b[i];
    const Vector half = solve_h(rhs, sm);
    H.multiply(half, tmp);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * half[i] - tmp[i] + b[i];
    x = solve_s(rhs, sn);
  };
  auto rep = run_outer(A, b, c.outer_rel_tol, c.max_outer, step, observer);
  rep.alpha = a;
  rep.omega = 0.0;
  rep.method = "hss";
  return rep;
}

SolveReport drs_solve(const SparseMatrix& A, std::span<const double> b, const GadiConfig& cfg,
                      const StepObserver& observer) {
  GadiConfig c = cfg;
  c.omega = 1.0;
  auto rep = gadi_hs_solve(A, b, c, observer);
  rep.method = "drs";
  return rep;
}

IterationOperators::IterationOperators(const SparseMatrix& A, double inner_tol)
    : A_(A), inner_tol_(inner_tol) {
  if (!A.square()) throw DimensionMismatch("IterationOperators: matrix must be square");
  auto split = hs_split(A);
  H_ = std::move(split.hermitian);
  S_ = std::move(split.skew_hermitian);
}

Vector IterationOperators::solve_h(double alpha, std::span<const double> v) const {
  auto r = cg(shifted_operator(H_, alpha), v, Vector(v.size(), 0.0), inner_tol_, exact_inner_cap(v.size()));
  return std::move(r.x);
}

Vector IterationOperators::solve_s(double alpha, std::span<const double> v) const {
  auto r = cgne(shifted_operator(S_, alpha), v, Vector(v.size(), 0.0), inner_tol_, exact_inner_cap(v.size()));
  return std::move(r.x);
}

Vector IterationOperators::apply_T(double alpha, std::span<const double> x) const {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (x.size() != dim()) throw DimensionMismatch("apply_T: vector length");
  Vector v(x.size());
  S_.multiply(x, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha * x[i] - v[i];
  Vector u = solve_h(alpha, v);
  H_.multiply(u, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha * u[i] - v[i];
  return solve_s(alpha, v);
}

Vector IterationOperators::apply_Tprime(double alpha, double omega, std::span<const double> x) const {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (x.size() != dim()) throw DimensionMismatch("apply_Tprime: vector length");
  Vector sx(x.size()), hsx(x.size()), ax(x.size());
  S_.multiply(x, sx);
  H_.multiply(sx, hsx);
  A_.multiply(x, ax);
  Vector v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = alpha * alpha * x[i] + hsx[i] - (1.0 - omega) * alpha * ax[i];
  return solve_s(alpha, solve_h(alpha, v));
}

LinearOperator IterationOperators::Tprime(double alpha, double omega) const {
  LinearOperator op;
  op.dim = dim();
  op.apply = [this, alpha, omega](std::span<const double> x, std::span<double> y) {
    const Vector r = apply_Tprime(alpha, omega, x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  return op;
}

LinearOperator IterationOperators::T(double alpha) const {
  LinearOperator op;
  op.dim = dim();
  op.apply = [this, alpha](std::span<const double> x, std::span<double> y) {
    const Vector r = apply_T(alpha, x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  return op;
}

Vector apply_T(const SparseMatrix& A, double alpha, std::span<const double> x) {
  return IterationOperators(A).apply_T(alpha, x);
}

Vector apply_Tprime(const SparseMatrix& A, double alpha, double omega, std::span<const double> x) {
  return IterationOperators(A).apply_Tprime(alpha, omega, x);
}

} // namespace gadi
