#include "gadi/inexact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gadi/error.hpp"

namespace gadi {

void InexactConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (!(omega >= 0.0 && omega < 2.0)) throw InvalidArgument("omega must lie in [0, 2)");
  if (delta_H < 1 || delta_S < 1) throw InvalidArgument("delta_H and delta_S must be at least 1");
  if (delta_H > 15 || delta_S > 15) throw InvalidArgument("delta_H and delta_S must be at most 15");
  if (!(outer_rel_tol > 0.0 && outer_rel_tol < 1.0))
    throw InvalidArgument("outer_rel_tol must lie in (0, 1)");
  if (max_outer == 0) throw InvalidArgument("max_outer must be positive");
}

SolveReport practical_gadi_hs(const SparseMatrix& A, std::span<const double> b, const InexactConfig& cfg,
                              const InexactObserver& observer) {
  cfg.validate();
  if (!A.square()) throw DimensionMismatch("practical_gadi_hs: matrix must be square");
  if (b.size() != A.rows()) throw DimensionMismatch("practical_gadi_hs: right-hand side length");
  const auto t0 = std::chrono::steady_clock::now();
  const auto [H, S] = hs_split(A);
  const std::size_t n = A.rows();
  const std::size_t cap = cfg.inner_max_iter > 0
                              ? cfg.inner_max_iter
                              : std::max<std::size_t>(20, static_cast<std::size_t>(10.0 * std::sqrt(static_cast<double>(n))));
  const double tol_h = std::pow(10.0, -cfg.delta_H);
  const double tol_s = std::pow(10.0, -cfg.delta_S);
  const double a = cfg.alpha, w = cfg.omega;
  const auto op_h = shifted_operator(H, a);
  const auto op_s = shifted_operator(S, a);

  SolveReport rep;
  rep.method = w == 0.0 ? "ihss" : "practical-gadi-hs";
  rep.alpha = a;
  rep.omega = w;
  rep.final_x.assign(n, 0.0);
  Vector& x = rep.final_x;
  const double b_norm = norm2(b);
  Vector r(b.begin(), b.end()), rhs(n);
  const Vector zero(n, 0.0);
  double sum_cg = 0.0, sum_cgne = 0.0;
  double res = b_norm == 0.0 ? 0.0 : 1.0;
  rep.residual_history.push_back(1.0);
  std::size_t k = 0;
  while (res > cfg.outer_rel_tol && k < cfg.max_outer) {
    ++k;
    InnerResult z, y;
    try {
      z = cg(op_h, r, zero, tol_h, cap);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = a * (2.0 - w) * z.x[i];
      y = cgne(op_s, rhs, zero, tol_s, cap);
    } catch (const Error& e) {
      throw SubSolveError(k, e.what());
    }
    sum_cg += static_cast<double>(z.stats.iterations);
    sum_cgne += static_cast<double>(y.stats.iterations);
    if (!z.stats.converged || !y.stats.converged) ++rep.inner_cap_hits;
    if (observer) observer({k, r, z.x, y.x});
    axpy(1.0, y.x, x);
    if (!all_finite(x)) throw SubSolveError(k, "iterate became non-finite");
    A.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    res = norm2(r) / b_norm;
    rep.residual_history.push_back(res);
  }
  rep.iterations = k;
  rep.termination = res <= cfg.outer_rel_tol ? Termination::converged : Termination::max_iter;
  if (k > 0) {
    rep.inner_cg_mean = sum_cg / static_cast<double>(k);
    rep.inner_cgne_mean = sum_cgne / static_cast<double>(k);
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolveReport ihss_solve(const SparseMatrix& A, std::span<const double> b, const InexactConfig& cfg,
                       const InexactObserver& observer) {
  InexactConfig c = cfg;
  c.omega = 0.0;
  return practical_gadi_hs(A, b, c, observer);
}

} // namespace gadi
