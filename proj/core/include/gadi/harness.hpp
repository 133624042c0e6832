#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gadi/error.hpp"
#include "gadi/problems.hpp"

namespace gadi {

enum class Method { hss, drs, gadi_hs, practical_gadi_hs, ihss, gadi_ab };

std::string to_string(Method m);
/// Accepts "hss", "drs", "gadi-hs", "practical-gadi-hs", "ihss", "gadi-ab".
Method parse_method(std::string_view s);

/// Values lo + i*step for i = 0, 1, ... while <= hi (plus half a step of slack).
std::vector<double> grid_values(double lo, double hi, double step);

struct TraversalPoint {
  double alpha = 0.0;
  double omega = 0.0;
  std::size_t it = 0;
  bool converged = false;

  friend bool operator==(const TraversalPoint&, const TraversalPoint&) = default;
};

struct TraversalResult {
  std::vector<TraversalPoint> grid; ///< alpha-major, omega-minor
  double best_alpha = 0.0;
  double best_omega = 0.0;
  std::size_t best_it = 0;

  friend bool operator==(const TraversalResult&, const TraversalResult&) = default;
};

struct TraversalOptions {
  /// Shared outer-iteration cap per grid point; capped points are non-converged.
  std::size_t max_outer = 5000;
  double outer_rel_tol = 1e-6;
  int delta_H = 2;
  int delta_S = 2;
  std::size_t jobs = 1;
  /**
   * Cap each point at the best count found so far. Points are visited in grid
   * order in batches of `jobs`, so the argmin is unchanged but pruned points
   * show it = cap and converged = false.
   */
  bool prune = false;
};

class TraversalError : public Error {
public:
  TraversalError(const std::string& what, std::size_t n = 0) : Error(what), n_(n) {}
  /// Problem size that failed, 0 if unknown.
  std::size_t n() const noexcept { return n_; }

private:
  std::size_t n_;
};

/// Runs one point with the given cap; returns {iterations, converged}.
using PointEvaluator = std::function<std::pair<std::size_t, bool>(double alpha, double omega, std::size_t cap)>;

/**
 * Grid search minimizing IT, ties toward smaller alpha then smaller omega.
 * Solver errors at a point count as non-convergence. Throws TraversalError
 * if no point converges.
 */
TraversalResult traverse(const PointEvaluator& eval, std::span<const double> alphas, std::span<const double> omegas,
                         const TraversalOptions& opts = {});

/// Evaluator for `method` on `problem`; omega is ignored by hss, drs and ihss.
PointEvaluator make_evaluator(const ProblemInstance& problem, Method method, const TraversalOptions& opts);

TraversalResult traverse(const ProblemInstance& problem, Method method, std::span<const double> alphas,
                         std::span<const double> omegas, const TraversalOptions& opts = {});

ProblemInstance make_problem(Family family, std::size_t n, double r = 0.0);

struct TrainingPair {
  double n = 0.0;
  double alpha = 0.0;
  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

/// Best alpha per n; a failing n raises TraversalError carrying that n.
std::vector<TrainingPair> build_training_set(Family family, Method method, std::span<const std::size_t> schedule,
                                             std::span<const double> alphas, std::span<const double> omegas,
                                             const TraversalOptions& opts = {}, double r = 0.0);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

// CSV with header "n,alpha".
void write_training_csv(std::ostream& os, std::span<const TrainingPair> pairs);
std::vector<TrainingPair> read_training_csv(std::istream& is);

// CSV with header "alpha,omega,it,converged"; converged is 0 or 1.
void write_traversal_csv(std::ostream& os, const TraversalResult& r);

/**
 * Writes A.mtx, b.mtx, x_exact.mtx (linear families) or A.mtx, B.mtx, C.mtx,
 * X_exact.mtx (Sylvester) into `dir`. Returns the paths written.
 */
std::vector<std::filesystem::path> export_instance(const ProblemInstance& p, const std::filesystem::path& dir);

} // namespace gadi
