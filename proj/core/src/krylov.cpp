#include "gadi/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

namespace gadi {

LinearOperator as_operator(const SparseMatrix& A) {
  if (!A.square()) throw DimensionMismatch("as_operator: matrix must be square");
  LinearOperator op;
  op.dim = A.rows();
  op.apply = [&A](std::span<const double> x, std::span<double> y) { A.multiply(x, y); };
  op.apply_transposed = [&A](std::span<const double> x, std::span<double> y) {
    A.multiply_transposed(x, y);
  };
  return op;
}

LinearOperator shifted_operator(const SparseMatrix& A, double s) {
  if (!A.square()) throw DimensionMismatch("shifted_operator: matrix must be square");
  LinearOperator op;
  op.dim = A.rows();
  op.apply = [&A, s](std::span<const double> x, std::span<double> y) {
    A.multiply(x, y);
    axpy(s, x, y);
  };
  op.apply_transposed = [&A, s](std::span<const double> x, std::span<double> y) {
    A.multiply_transposed(x, y);
    axpy(s, x, y);
  };
  return op;
}

namespace {

void check_system(const LinearOperator& op, std::span<const double> b, std::span<const double> x0,
                  double rel_tol, const char* name) {
  if (op.dim == 0) throw InvalidDimension(std::string(name) + ": zero-dimension system");
  if (b.size() != op.dim || x0.size() != op.dim)
    throw DimensionMismatch(std::string(name) + ": right-hand side or start vector has wrong length");
  if (!(rel_tol > 0.0)) throw InvalidArgument(std::string(name) + ": rel_tol must be positive");
}

Vector residual(const LinearOperator& op, std::span<const double> b, std::span<const double> x) {
  Vector r(op.dim);
  op.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

} // namespace

InnerResult cg(const LinearOperator& op, std::span<const double> b, std::span<const double> x0,
               double rel_tol, std::size_t max_iter) {
  check_system(op, b, x0, rel_tol, "cg");
  InnerResult out{Vector(x0.begin(), x0.end()), {}};
  Vector& x = out.x;
  Vector r = residual(op, b, x);
  const double r0 = norm2(r);
  if (r0 == 0.0) {
    out.stats.converged = true;
    return out;
  }
  const double target = rel_tol * r0;
  Vector p = r, q(op.dim);
  double rr = dot(r, r);
  double true_norm = r0;
  std::size_t k = 0;
  while (k < max_iter) {
    ++k;
    op.apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw Breakdown("cg: p^T A p = " + std::to_string(pq) + " at iteration " + std::to_string(k) +
                      " (operator not positive definite)");
    const double a = rr / pq;
    axpy(a, p, x);
    axpy(-a, q, r);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= target) {
      r = residual(op, b, x);
      true_norm = norm2(r);
      if (true_norm <= target) break;
      // recursive residual drifted; restart from the true one
      rr = dot(r, r);
      p = r;
      continue;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    true_norm = std::sqrt(rr_new);
  }
  if (true_norm > target) true_norm = norm2(residual(op, b, x));
  out.stats.iterations = k;
  out.stats.relative_residual = true_norm / r0;
  out.stats.converged = true_norm <= target;
  return out;
}

InnerResult cgne(const LinearOperator& op, std::span<const double> b, std::span<const double> x0,
                 double rel_tol, std::size_t max_iter) {
  check_system(op, b, x0, rel_tol, "cgne");
  if (!op.apply_transposed) throw InvalidArgument("cgne: operator has no transpose");
  InnerResult out{Vector(x0.begin(), x0.end()), {}};
  Vector& x = out.x;
  Vector r = residual(op, b, x);
  const double r0 = norm2(r);
  if (r0 == 0.0) {
    out.stats.converged = true;
    return out;
  }
  const double target = rel_tol * r0;
  Vector s(op.dim), q(op.dim);
  op.apply_transposed(r, s);
  Vector p = s;
  double gamma = dot(s, s);
  double r_norm = r0;
  std::size_t k = 0;
  while (k < max_iter) {
    if (!(gamma > 0.0))
      throw Breakdown("cgne: A^T r vanished with nonzero residual (singular operator)");
    ++k;
    op.apply(p, q);
    const double qq = dot(q, q);
    if (!(qq > 0.0)) throw Breakdown("cgne: A p vanished (singular operator)");
    const double a = gamma / qq;
    axpy(a, p, x);
    axpy(-a, q, r);
    r_norm = norm2(r);
    if (r_norm <= target) {
      r = residual(op, b, x);
      r_norm = norm2(r);
      if (r_norm <= target) break;
    }
    op.apply_transposed(r, s);
    const double gamma_new = dot(s, s);
    const double beta = gamma_new / gamma;
    gamma = gamma_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
  }
  out.stats.iterations = k;
  out.stats.relative_residual = r_norm / r0;
  out.stats.converged = r_norm <= target;
  return out;
}

PowerResult spectral_radius_power(const LinearOperator& op, const PowerOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector start(op.dim);
  for (double& v : start) v = dist(rng);
  return spectral_radius_power(op, start, opts);
}

PowerResult spectral_radius_power(const LinearOperator& op, std::span<const double> start,
                                  const PowerOptions& opts) {
  if (op.dim == 0) throw InvalidDimension("power iteration: zero-dimension operator");
  if (start.size() != op.dim) throw DimensionMismatch("power iteration: start vector length");
  Vector v(start.begin(), start.end());
  const double v_norm = norm2(v);
  if (v_norm == 0.0) throw InvalidArgument("power iteration: zero start vector");
  scale(1.0 / v_norm, v);

  Vector w = op(v), u(op.dim);
  PowerResult res;
  double prev = 0.0, prev_change = 0.0;
  std::size_t streak = 0;
  for (std::size_t k = 1; k <= opts.max_iter; ++k) {
    res.iterations = k;
    const double w_norm = norm2(w);
    if (w_norm == 0.0) {
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    double estimate = 0.0;
    bool pair_regime = false;
    if (opts.symmetric) {
      estimate = std::abs(dot(v, w));
      op.apply(w, u);
    } else {
      op.apply(w, u);
      const double vv = 1.0, vw = dot(v, w), ww = w_norm * w_norm;
      const double sin2 = 1.0 - vw * vw / ww;
      if (sin2 < 1e-8) {
        estimate = std::abs(vw);
      } else {
        pair_regime = true;
        // least squares u ~ c1 w + c0 v
        const double wu = dot(w, u), vu = dot(v, u);
        const double det = ww * vv - vw * vw;
        const double c1 = (wu * vv - vw * vu) / det;
        const double c0 = (ww * vu - vw * wu) / det;
        const double disc = c1 * c1 + 4.0 * c0;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          estimate = std::max(std::abs(0.5 * (c1 + sq)), std::abs(0.5 * (c1 - sq)));
        } else {
          estimate = std::sqrt(-c0);
        }
      }
    }

    const double change = std::abs(estimate - prev);
    // Extrapolated distance to the limit for linearly converging sequences.
    double err = change;
    if (k > 2 && prev_change > 0.0) {
      const double q = std::min(change / prev_change, 0.99);
      err = change / (1.0 - q);
    }
    const std::size_t patience = pair_regime ? 20 : 3;
    streak = (k > 1 && err <= opts.tol * estimate) ? streak + 1 : 0;
    prev_change = change;
    prev = estimate;
    res.value = estimate;
    if (streak >= patience) {
      res.converged = true;
      return res;
    }

    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = w[i] / w_norm;
      w[i] = u[i] / w_norm;
    }
  }
  return res;
}

namespace {

double checked_power(const LinearOperator& op, const PowerOptions& opts, const char* what) {
  const auto r = spectral_radius_power(op, opts);
  if (!r.converged)
    throw NotConverged(std::string(what) + ": power iteration did not converge in " +
                       std::to_string(r.iterations) + " iterations (last estimate " +
                       std::to_string(r.value) + ")");
  return r.value;
}

LinearOperator normal_operator(const SparseMatrix& A) {
  LinearOperator op;
  op.dim = A.cols();
  auto tmp = std::make_shared<Vector>(A.rows());
  op.apply = [&A, tmp](std::span<const double> x, std::span<double> y) {
    A.multiply(x, *tmp);
    A.multiply_transposed(*tmp, y);
  };
  return op;
}

} // namespace

EigenExtremes lambda_extremes_spd(const SparseMatrix& H, double tol, std::size_t max_iter) {
  if (!H.square()) throw DimensionMismatch("lambda_extremes_spd: matrix must be square");
  const double lmax = checked_power(as_operator(H), {tol, max_iter, 0, true}, "lambda_max");
  LinearOperator shifted;
  shifted.dim = H.rows();
  shifted.apply = [&H, lmax](std::span<const double> x, std::span<double> y) {
    H.multiply(x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lmax * x[i] - y[i];
  };
  // An error in lmax cancels in lmax - rho(lmax I - H), but the spread must be
  // resolved to tol * lambda_min, not tol * lambda_max.
  double spread = checked_power(shifted, {tol, max_iter, 0, true}, "lambda_min");
  const double ratio = (lmax - spread) / lmax;
  if (ratio > 0.0 && ratio < 1.0) {
    // Best effort: the same seeded run continued longer, so even an
    // unconverged refinement is no worse than the pass above.
    const auto refined = spectral_radius_power(shifted, {std::max(tol * ratio, 1e-15), max_iter, 0, true});
    spread = refined.value;
  }
  return {lmax - spread, lmax};
}

double sigma_max(const SparseMatrix& S, double tol, std::size_t max_iter) {
  if (S.rows() == 0 || S.cols() == 0) throw InvalidDimension("sigma_max: empty matrix");
  if (S.nnz() == 0) return 0.0;
  return std::sqrt(checked_power(normal_operator(S), {tol, max_iter, 0, true}, "sigma_max"));
}

double matrix_two_norm(const SparseMatrix& A, double tol, std::size_t max_iter) {
  return sigma_max(A, tol, max_iter);
}

double condition_number_2(const SparseMatrix& A, double tol, std::size_t max_iter) {
  if (!A.square()) throw DimensionMismatch("condition_number_2: matrix must be square");
  const PowerOptions opts{tol, max_iter, 0, true};
  const LinearOperator normal = normal_operator(A);
  const double top = checked_power(normal, opts, "condition_number_2");
  LinearOperator shifted;
  shifted.dim = A.cols();
  shifted.apply = [&normal, top](std::span<const double> x, std::span<double> y) {
    normal.apply(x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = top * x[i] - y[i];
  };
  const double bottom = top - checked_power(shifted, opts, "condition_number_2");
  if (!(bottom > 0.0)) throw SingularMatrix("condition_number_2: matrix is numerically singular");
  return std::sqrt(top / bottom);
}

double condition_number_1(const SparseMatrix& A, double solve_tol) {
  if (!A.square()) throw DimensionMismatch("condition_number_1: matrix must be square");
  const std::size_t n = A.rows();
  if (n == 0) throw InvalidDimension("condition_number_1: empty matrix");

  Vector col_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
      col_sums[A.col_idx()[k]] += std::abs(A.values()[k]);
  const double norm_a = *std::max_element(col_sums.begin(), col_sums.end());

  const auto op = as_operator(A);
  const auto At = transpose(A);
  const auto op_t = as_operator(At);
  const Vector zero(n, 0.0);
  const std::size_t cap = 10 * n + 100;
  auto solve = [&](const LinearOperator& o, const Vector& v) {
    auto r = cgne(o, v, zero, solve_tol, cap);
    if (!r.stats.converged) throw NotConverged("condition_number_1: inner solve did not converge");
    return std::move(r.x);
  };
  auto norm1 = [](const Vector& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  };

  Vector x(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  std::size_t last_j = n;
  for (int it = 0; it < 5; ++it) {
    const Vector y = solve(op, x);
    est = std::max(est, norm1(y));
    Vector xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const Vector z = solve(op_t, xi);
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[j])) j = i;
    if (std::abs(z[j]) <= dot(z, x) || j == last_j) break;
    last_j = j;
    std::fill(x.begin(), x.end(), 0.0);
    x[j] = 1.0;
  }
  // Higham's alternating-sign test vector guards against unlucky cases.
  Vector alt(n);
  for (std::size_t i = 0; i < n; ++i)
    alt[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / (n > 1 ? static_cast<double>(n - 1) : 1.0));
  est = std::max(est, 2.0 * norm1(solve(op, alt)) / (3.0 * static_cast<double>(n)));
  return norm_a * est;
}

} // namespace gadi
