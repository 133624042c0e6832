#pragma once

#include "gadi/sparse_matrix.hpp"

namespace gadi {

/// Spectral quantities of A = H + S used by the parameter formulas.
struct SpectralSummary {
  double lambda_min = 0.0; ///< smallest eigenvalue of H
  double lambda_max = 0.0; ///< largest eigenvalue of H
  double sigma_max = 0.0;  ///< largest singular value of S
  double norm_A = 0.0;     ///< ||A||_2

  /// Throws InvalidArgument unless 0 < lambda_min <= lambda_max, sigma_max >= 0, all finite.
  void validate() const;
  friend bool operator==(const SpectralSummary&, const SpectralSummary&) = default;
};

SpectralSummary summarize_spectrum(const SparseMatrix& A, double tol = 1e-8, std::size_t max_iter = 10000);

/// sqrt(lambda_min * lambda_max)
double hss_alpha(const SpectralSummary& s);

struct GadiParams {
  double alpha = 0.0;
  double omega = 0.0;
};

/**
 * Quasi-optimal GADI-HS parameters for the case sigma_max > 0:
 * omega = 1, alpha = (p + sqrt(p^2 + lambda_min^2 p)) / lambda_min with
 * p = lambda_max * sigma_max. Throws InvalidArgument when sigma_max = 0; use
 * hss_alpha with omega = 0 in that case.
 */
GadiParams gadi_hs_params(const SpectralSummary& s);

/// (a^2 + a |1 - w| ||A||_2 + lambda_max sigma_max) / (a (a + lambda_min))
double delta_bound(double alpha, double omega, const SpectralSummary& s);

} // namespace gadi
