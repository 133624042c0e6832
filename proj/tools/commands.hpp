#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gadi::cli {

/// Bad flags or inputs; exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::filesystem::path output_dir = ".";
  int verbosity = 0;
};

// Problem selection shared by solve and traverse: family flags or matrix files.
struct ProblemArgs {
  std::string family;
  std::size_t n = 0;
  double r = 0.0;
  std::filesystem::path matrix, matrix_b, rhs;
};

struct GenArgs {
  std::string family;
  std::size_t n = 0;
  double r = 0.0;
  std::filesystem::path out;
};

struct SolveArgs {
  std::string method;
  ProblemArgs problem;
  std::optional<double> alpha, omega;
  std::string param_source;
  std::filesystem::path model;
  int delta_h = 2, delta_s = 2;
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  std::filesystem::path out;
};

struct TraverseArgs {
  std::string method;
  ProblemArgs problem;
  std::vector<double> alpha_grid{0.01, 3.0, 0.01};
  std::vector<double> omega_grid;
  std::optional<double> omega;
  int delta_h = 2, delta_s = 2;
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  std::size_t jobs = 1;
  bool prune = false;
  std::filesystem::path out;
};

struct GprFitArgs {
  std::filesystem::path training;
  double noise = 1e-4;
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  std::vector<double> retrain;
  std::filesystem::path out;
};

struct GprPredictArgs {
  std::filesystem::path model;
  std::vector<double> n;
  std::filesystem::path out;
};

struct ReproduceArgs {
  std::string table;
  std::size_t max_n = 0;
  std::filesystem::path out;
};

int cmd_gen(const Common& c, const GenArgs& a);
int cmd_solve(const Common& c, const SolveArgs& a);
int cmd_traverse(const Common& c, const TraverseArgs& a);
int cmd_gpr_fit(const Common& c, const GprFitArgs& a);
int cmd_gpr_predict(const Common& c, const GprPredictArgs& a);
int cmd_reproduce(const Common& c, const ReproduceArgs& a);

/// `explicit_path` if set, else output_dir / fallback; parent directories are created.
std::filesystem::path output_path(const Common& c, const std::filesystem::path& explicit_path,
                                  const std::filesystem::path& fallback);

} // namespace gadi::cli
