#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "gadi/dense.hpp"
#include "gadi/sparse_matrix.hpp"

namespace gadi {

enum class Family { conv_diff_3d, parabolic_2d, sylvester };

std::string to_string(Family f);
/// Accepts "convdiff3d", "parabolic2d", "sylvester".
Family parse_family(std::string_view s);

/**
 * A generated test problem with a manufactured solution.
 *
 * Linear-system families fill A, b, x_exact. The Sylvester family fills
 * A, B, C, X_exact for AX + XB = C and leaves b, x_exact empty.
 */
struct ProblemInstance {
  Family family = Family::conv_diff_3d;
  std::size_t n = 0;
  double r = 0.0;
  double beta = 0.0;
  SparseMatrix A;
  Vector b;
  Vector x_exact;
  SparseMatrix B;
  DenseMatrix C;
  DenseMatrix X_exact;
};

/// 3D convection-diffusion on an n^3 grid, x_exact = ones.
ProblemInstance conv_diff_3d(std::size_t n);

/// 2D parabolic model problem on an n^2 grid, x_exact = sin(pi x1) sin(pi x2).
ProblemInstance parabolic_2d(std::size_t n);

/// A = B = Tridiag(-1,2,-1) + 2r Tridiag(0.5,0,-0.5) + 100/(n+1)^2 I, X_exact = ones.
ProblemInstance sylvester_family(std::size_t n, double r);

/// Relative residual of the stored exact solution (linear or Sylvester).
double manufactured_residual(const ProblemInstance& p);

} // namespace gadi
