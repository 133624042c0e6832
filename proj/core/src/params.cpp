#include "gadi/params.hpp"

#include <cmath>

#include "gadi/error.hpp"
#include "gadi/krylov.hpp"

namespace gadi {

void SpectralSummary::validate() const {
  if (!std::isfinite(lambda_min) || !std::isfinite(lambda_max) || !std::isfinite(sigma_max) ||
      !std::isfinite(norm_A))
    throw InvalidArgument("spectral summary has non-finite entries");
  if (!(lambda_min > 0.0)) throw InvalidArgument("lambda_min must be positive");
  if (lambda_min > lambda_max) throw InvalidArgument("lambda_min exceeds lambda_max");
  if (sigma_max < 0.0) throw InvalidArgument("sigma_max must be nonnegative");
}

SpectralSummary summarize_spectrum(const SparseMatrix& A, double tol, std::size_t max_iter) {
  if (!A.square()) throw DimensionMismatch("summarize_spectrum: matrix must be square");
  const auto [H, S] = hs_split(A);
  const auto e = lambda_extremes_spd(H, tol, max_iter);
  SpectralSummary s;
  s.lambda_min = e.lambda_min;
  s.lambda_max = e.lambda_max;
  s.sigma_max = sigma_max(S, tol, max_iter);
  s.norm_A = matrix_two_norm(A, tol, max_iter);
  s.validate();
  return s;
}

double hss_alpha(const SpectralSummary& s) {
  s.validate();
  return std::sqrt(s.lambda_min * s.lambda_max);
}

GadiParams gadi_hs_params(const SpectralSummary& s) {
  s.validate();
  if (s.sigma_max == 0.0)
    throw InvalidArgument("sigma_max is zero (symmetric A): use hss_alpha with omega = 0");
  const double p = s.lambda_max * s.sigma_max;
  const double lm = s.lambda_min;
  return {(p + std::sqrt(p * p + lm * lm * p)) / lm, 1.0};
}

double delta_bound(double alpha, double omega, const SpectralSummary& s) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  return (alpha * alpha + alpha * std::abs(1.0 - omega) * s.norm_A + s.lambda_max * s.sigma_max) /
         (alpha * (alpha + s.lambda_min));
}

} // namespace gadi
