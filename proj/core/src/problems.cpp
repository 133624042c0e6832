#include "gadi/problems.hpp"

#include <cmath>
#include <numbers>

#include "gadi/error.hpp"

namespace gadi {

std::string to_string(Family f) {
  switch (f) {
  case Family::conv_diff_3d: return "convdiff3d";
  case Family::parabolic_2d: return "parabolic2d";
  case Family::sylvester: return "sylvester";
  }
  return "unknown";
}

Family parse_family(std::string_view s) {
  if (s == "convdiff3d") return Family::conv_diff_3d;
  if (s == "parabolic2d") return Family::parabolic_2d;
  if (s == "sylvester") return Family::sylvester;
  throw InvalidArgument("unknown family '" + std::string(s) +
                        "' (expected convdiff3d, parabolic2d or sylvester)");
}

ProblemInstance conv_diff_3d(std::size_t n) {
  if (n < 2) throw InvalidDimension("conv_diff_3d: n must be at least 2");
  const double beta = 1.0 / (2.0 * static_cast<double>(n) + 2.0);
  const double t2 = -1.0 - beta, t3 = -1.0 + beta;
  const auto T1 = tridiag(n, t2, 6.0, t3);
  const auto T2 = tridiag(n, t2, 0.0, t3);
  const auto I = identity(n);
  const auto II = kron(I, I);

  ProblemInstance p;
  p.family = Family::conv_diff_3d;
  p.n = n;
  p.beta = beta;
  p.A = add(1.0, add(1.0, kron(T1, II), 1.0, kron(I, kron(T2, I))), 1.0, kron(II, T2));
  p.x_exact.assign(p.A.rows(), 1.0);
  p.b = spmv(p.A, p.x_exact);
  return p;
}

ProblemInstance parabolic_2d(std::size_t n) {
  if (n < 2) throw InvalidDimension("parabolic_2d: n must be at least 2");
  const double beta = 1.0 / (2.0 * static_cast<double>(n) + 2.0);
  const auto T1 = tridiag(n, -1.0 - beta, 4.0, -1.0 + beta);
  const auto T2 = tridiag(n, -0.5, -1.0, 0.5);
  const auto T3 = tridiag(n, 0.5, -1.0, -0.5);
  const auto D1 = tridiag(n, 0.0, 0.0, 1.0);
  const auto D2 = tridiag(n, 1.0, 0.0, 0.0);

  ProblemInstance p;
  p.family = Family::parabolic_2d;
  p.n = n;
  p.beta = beta;
  p.A = add(1.0, add(1.0, kron(identity(n), T1), 1.0, kron(D1, T2)), 1.0, kron(D2, T3));
  const double h = 1.0 / (static_cast<double>(n) + 1.0);
  p.x_exact.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p.x_exact[i * n + j] = std::sin(std::numbers::pi * static_cast<double>(i + 1) * h) *
                             std::sin(std::numbers::pi * static_cast<double>(j + 1) * h);
  p.b = spmv(p.A, p.x_exact);
  return p;
}

ProblemInstance sylvester_family(std::size_t n, double r) {
  if (n < 2) throw InvalidDimension("sylvester_family: n must be at least 2");
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("sylvester_family: r must be nonnegative");
  const double np1 = static_cast<double>(n) + 1.0;
  const auto M = tridiag(n, -1.0, 2.0, -1.0);
  const auto N = tridiag(n, 0.5, 0.0, -0.5);

  ProblemInstance p;
  p.family = Family::sylvester;
  p.n = n;
  p.r = r;
  p.A = shifted(add(1.0, M, 2.0 * r, N), 100.0 / (np1 * np1));
  p.B = p.A;
  p.X_exact = DenseMatrix(n, n, 1.0);
  p.C = multiply(p.A, p.X_exact);
  const auto XB = multiply(p.X_exact, p.B);
  for (std::size_t k = 0; k < p.C.data().size(); ++k) p.C.data()[k] += XB.data()[k];
  return p;
}

double manufactured_residual(const ProblemInstance& p) {
  if (p.family == Family::sylvester) {
    auto R = multiply(p.A, p.X_exact);
    const auto XB = multiply(p.X_exact, p.B);
    for (std::size_t k = 0; k < R.data().size(); ++k)
      R.data()[k] = p.C.data()[k] - R.data()[k] - XB.data()[k];
    return R.frobenius_norm() / p.C.frobenius_norm();
  }
  const auto r = subtract(p.b, spmv(p.A, p.x_exact));
  return norm2(r) / norm2(p.b);
}

} // namespace gadi
