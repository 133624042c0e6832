#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "gadi/dense.hpp"

namespace gadi {

struct LbfgsOptions {
  std::size_t memory = 10;
  std::size_t max_iter = 200;
  double grad_tol = 1e-7;  ///< stop when ||g||_inf <= grad_tol * max(1, |f|)
  double f_rel_tol = 1e-13;
  double c1 = 1e-4;        ///< sufficient decrease
  double c2 = 0.9;         ///< curvature
  std::size_t max_line_search = 40;
};

struct LbfgsResult {
  Vector x;
  double f = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Objective returning f(x) and writing the gradient into g. May return +inf to reject x.
using Objective = std::function<double(std::span<const double> x, std::span<double> g)>;

/// Limited-memory BFGS minimization with a strong-Wolfe line search.
LbfgsResult lbfgs_minimize(const Objective& f, std::span<const double> x0, const LbfgsOptions& opts = {});

/// Wraps a value-only function with central differences of step rel_step * max(1, |x_i|).
Objective central_difference(std::function<double(std::span<const double>)> f, double rel_step = 1e-5);

} // namespace gadi
