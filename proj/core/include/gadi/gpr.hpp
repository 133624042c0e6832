#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gadi/dense.hpp"
#include "gadi/error.hpp"

namespace gadi {

/// sigma_f^2 exp(-|x - y| / (2 iota^2)); note the distance is not squared.
double exp_kernel(double x, double y, double iota, double sigma_f);

/**
 * -1/2 y^T (K + s^2 I)^-1 y - 1/2 log det(K + s^2 I) - n/2 log(2 pi) for the
 * exponential kernel on the given inputs. Throws SingularMatrix if the
 * Cholesky factorization fails.
 */
double log_marginal_likelihood(std::span<const double> inputs, std::span<const double> targets, double iota,
                               double sigma_f, double noise);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/**
 * Zero-mean GP over a scalar input with a cached factorization.
 *
 * Inputs are divided by `input_scale` before the kernel is evaluated, so
 * `iota` is measured in scaled units. Immutable once built.
 */
class GprModel {
public:
  GprModel() = default;

  /// Factorizes K + noise^2 I. Throws InvalidArgument on bad hyperparameters or duplicate inputs.
  static GprModel build(std::vector<double> inputs, std::vector<double> targets, double iota, double sigma_f,
                        double noise, double input_scale = 1.0);

  const std::vector<double>& inputs() const noexcept { return inputs_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  double iota() const noexcept { return iota_; }
  double sigma_f() const noexcept { return sigma_f_; }
  double noise() const noexcept { return noise_; }
  double input_scale() const noexcept { return input_scale_; }
  double log_likelihood() const noexcept { return log_likelihood_; }
  /// Lower Cholesky factor of K + noise^2 I, column-major n x n.
  const std::vector<double>& chol() const noexcept { return chol_; }
  /// (K + noise^2 I)^-1 y
  const std::vector<double>& weights() const noexcept { return weights_; }

  Prediction predict(double x) const;

private:
  std::vector<double> inputs_, targets_;
  double iota_ = 1.0, sigma_f_ = 1.0, noise_ = 1e-4, input_scale_ = 1.0;
  double log_likelihood_ = 0.0;
  std::vector<double> chol_, weights_;
};

Prediction predict(const GprModel& model, double x);

struct GprFitOptions {
  double noise = 1e-4;
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  /// Divide inputs by the largest |input| before fitting.
  bool rescale_inputs = true;
  /// Optional extra start (iota, sigma_f) tried before the random restarts.
  std::optional<std::pair<double, double>> theta0;
};

/// Raised when no restart produced a finite likelihood; carries the best effort.
class GprFitError : public Error {
public:
  GprFitError(const std::string& what, double iota, double sigma_f) : Error(what), iota_(iota), sigma_f_(sigma_f) {}
  double iota() const noexcept { return iota_; }
  double sigma_f() const noexcept { return sigma_f_; }

private:
  double iota_, sigma_f_;
};

/**
 * Maximizes the marginal likelihood over (log iota, log sigma_f) with L-BFGS
 * and central-difference gradients, from `restarts` seeded log-uniform starts
 * (iota in [0.1, 100], sigma_f in [0.01, 10]) plus theta0 if given.
 */
GprModel gpr_fit(std::vector<double> inputs, std::vector<double> targets, const GprFitOptions& opts = {});

/**
 * Appends (x, predicted mean) for every new input and refits from the current
 * hyperparameters. Inputs already present are skipped and reported in `skipped`.
 */
GprModel retrain(const GprModel& model, std::span<const double> new_inputs,
                 std::vector<double>* skipped = nullptr);

} // namespace gadi
