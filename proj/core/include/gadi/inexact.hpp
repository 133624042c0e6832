#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "gadi/gadi.hpp"

namespace gadi {

struct InexactConfig {
  double alpha = 1.0;
  double omega = 1.0;
  /// Inner tolerances are 10^-delta_H and 10^-delta_S.
  int delta_H = 2;
  int delta_S = 2;
  double outer_rel_tol = 1e-6;
  std::size_t max_outer = 5000;
  /// 0 selects max(20, 10*sqrt(dim)).
  std::size_t inner_max_iter = 0;

  void validate() const;
};

/// Inner data of one outer step: r = b - A x, (aI + H) z ~ r, (aI + S) y ~ a(2 - w) z.
struct InexactStep {
  std::size_t k = 0;
  std::span<const double> r;
  std::span<const double> z;
  std::span<const double> y;
};
using InexactObserver = std::function<void(const InexactStep&)>;

/**
 * Practical GADI-HS: per outer step
 *
 *   r = b - A x
 *   CG:   (aI + H) z ~ r            until ||r - (aI + H) z|| <= 10^-dH ||r||
 *   CGNE: (aI + S) y ~ a(2 - w) z   until ||a(2 - w) z - (aI + S) y|| <= 10^-dS ||a(2 - w) z||
 *   x += y
 *
 * stopping when ||r|| / ||b|| <= outer_rel_tol. Both inner solves start from
 * zero. Hitting the inner cap is counted in `inner_cap_hits`, not fatal.
 */
SolveReport practical_gadi_hs(const SparseMatrix& A, std::span<const double> b, const InexactConfig& cfg,
                              const InexactObserver& observer = {});

/// practical_gadi_hs with omega = 0.
SolveReport ihss_solve(const SparseMatrix& A, std::span<const double> b, const InexactConfig& cfg,
                       const InexactObserver& observer = {});

} // namespace gadi
