#include <cmath>
#include <random>

#include "convert.hpp"
#include "doctest.h"
#include "gadi/problems.hpp"
#include "gadi/sylvester.hpp"

using namespace gadi;

namespace {

DenseMatrix to_dm(const oracle::Mat& m) {
  DenseMatrix d(m.size(), m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) d(i, j) = m[i][j];
  return d;
}

oracle::Mat from_dm(const DenseMatrix& d) {
  oracle::Mat m = oracle::zeros(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) m[i][j] = d(i, j);
  return m;
}

} // namespace

TEST_CASE("banded LU on a manufactured tridiagonal system") {
  const auto A = tridiag(5, -1, 2, -1);
  const auto F = banded_lu_factor(A, 1, 1);
  const auto x = banded_lu_solve(F, spmv(A, Vector(5, 1.0)));
  for (double v : x) CHECK(std::abs(v - 1.0) <= 1e-12);
}

TEST_CASE("banded LU on a diagonal matrix divides entrywise") {
  const auto D = sparse_of({{2, 0, 0}, {0, -4, 0}, {0, 0, 0.5}});
  const auto x = banded_lu_solve(banded_lu_factor(D, 0, 0), Vector{1, 1, 1});
  CHECK(x == Vector{0.5, -0.25, 2.0});
}

TEST_CASE("banded LU against dense elimination") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t bw : {1u, 2u, 4u}) {
    oracle::Mat a = oracle::zeros(50, 50);
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = 0; j < 50; ++j)
        if ((i > j ? i - j : j - i) <= bw) a[i][j] = u(rng);
    const auto b = oracle::random_vec(50, rng);
    const auto ref = oracle::solve(a, b);
    const auto x = banded_lu_solve(banded_lu_factor(sparse_of(a), bw, bw), b);
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      err = std::max(err, std::abs(x[i] - ref[i]));
      scale = std::max(scale, std::abs(ref[i]));
    }
    CHECK(err <= 1e-10 * scale);
  }
}

TEST_CASE("banded LU errors") {
  CHECK_THROWS_AS(banded_lu_factor(sparse_of({{1, 1}, {1, 1}}), 1, 1), SingularMatrix);
  CHECK_THROWS_AS(banded_lu_factor(tridiag(4, 1, 2, 1), 0, 1), InvalidArgument);
  CHECK_THROWS_AS(banded_lu_factor(SparseMatrix(2, 3), 1, 1), DimensionMismatch);
  const auto F = banded_lu_factor(tridiag(4, 1, 3, 1), 1, 1);
  CHECK_THROWS_AS(F.solve(Vector{1, 2}), DimensionMismatch);
}

TEST_CASE("sylvester residual") {
  const auto p = sylvester_family(6, 0.3);
  CHECK(sylvester_residual(p.A, p.B, p.C, p.X_exact) <= 1e-10 * p.C.frobenius_norm());
  CHECK(sylvester_residual(p.A, p.B, p.C, DenseMatrix(6, 6)) == doctest::Approx(p.C.frobenius_norm()).epsilon(1e-15));

  std::mt19937_64 rng(53);
  DenseMatrix X = p.X_exact;
  for (double& v : X.data()) v += 0.1 * std::uniform_real_distribution<double>(-1, 1)(rng);
  const auto a = dense_of(p.A), b = dense_of(p.B), x = from_dm(X), c = from_dm(p.C);
  const auto R = oracle::lincomb(1.0, c, -1.0, oracle::lincomb(1.0, oracle::matmul(a, x), 1.0, oracle::matmul(x, b)));
  double f = 0;
  for (auto& row : R)
    for (double v : row) f += v * v;
  CHECK(sylvester_residual(p.A, p.B, p.C, X) == doctest::Approx(std::sqrt(f)).epsilon(1e-12));
  CHECK_THROWS_AS(sylvester_residual(p.A, p.B, p.C, DenseMatrix(5, 6)), DimensionMismatch);
}

TEST_CASE("one GADI-AB sweep matches dense half-step solves") {
  std::mt19937_64 rng(57);
  const auto a = random_pd(3, rng), b = random_pd(3, rng);
  const auto c = oracle::random_sparse(3, 3, 1.0, rng);
  const double al = 0.7, w = 0.6;
  const auto I = oracle::eye(3);
  // from X0 = 0: (aI + A) Xh = C, X1 (aI + B) = (2 - w) a Xh
  const auto xh = oracle::solve(oracle::lincomb(al, I, 1.0, a), c);
  const auto x1 = oracle::transpose(oracle::solve(oracle::transpose(oracle::lincomb(al, I, 1.0, b)),
                                                  oracle::transpose(oracle::lincomb((2 - w) * al, xh, 0.0, xh))));
  // second sweep from X1
  const auto rhs1 = oracle::lincomb(1.0, oracle::matmul(x1, oracle::lincomb(al, I, -1.0, b)), 1.0, c);
  const auto xh2 = oracle::solve(oracle::lincomb(al, I, 1.0, a), rhs1);
  const auto rhs2 = oracle::lincomb(1.0, oracle::matmul(x1, oracle::lincomb(1.0, b, -(1 - w) * al, I)), (2 - w) * al, xh2);
  const auto x2 = oracle::transpose(oracle::solve(oracle::transpose(oracle::lincomb(al, I, 1.0, b)), oracle::transpose(rhs2)));

  const auto A = sparse_of(a), B = sparse_of(b);
  const auto C = to_dm(c);
  const auto r1 = gadi_ab_solve(A, B, C, al, w, 1e-300 + 1e-30, 1);
  CHECK(oracle::max_abs_diff(from_dm(r1.final_X), x1) <= 1e-12);
  const auto r2 = gadi_ab_solve(A, B, C, al, w, 1e-30, 2);
  CHECK(oracle::max_abs_diff(from_dm(r2.final_X), x2) <= 1e-12);
}

TEST_CASE("identity coefficients reduce to a scalar recursion") {
  const auto I = identity(4);
  DenseMatrix C(4, 3);
  for (std::size_t k = 0; k < C.data().size(); ++k) C.data()[k] = 2.0 * (1.0 + static_cast<double>(k));
  const double a = 0.5, w = 0.5;
  const auto rep = gadi_ab_solve(I, identity(3), C, a, w, 1e-12, 200);
  REQUIRE(rep.converged());
  for (std::size_t k = 0; k < C.data().size(); ++k)
    CHECK(rep.final_X.data()[k] == doctest::Approx(C.data()[k] / 2.0).epsilon(1e-10));
  // each step scales the error by the same factor
  const double q = rep.residual_history[2] / rep.residual_history[1];
  for (std::size_t k = 2; k + 1 < rep.residual_history.size() && rep.residual_history[k + 1] > 1e-8; ++k)
    CHECK(rep.residual_history[k + 1] / rep.residual_history[k] == doctest::Approx(q).epsilon(1e-6));
}

TEST_CASE("converged solutions satisfy the equation") {
  for (double r : {0.0, 0.01, 1.0}) {
    const auto p = sylvester_family(12, r);
    const auto rep = gadi_ab_solve(p.A, p.B, p.C, 1.0, 0.5, 1e-6, 1000);
    REQUIRE(rep.converged());
    CHECK(sylvester_residual(p.A, p.B, p.C, rep.final_X) / p.C.frobenius_norm() <= 2e-6);
    CHECK(rep.residual_history.size() == rep.iterations + 1);
  }
}

TEST_CASE("sweep operator contracts for sampled parameters") {
  const auto p = sylvester_family(8, 0.5);
  for (double a : {0.1, 1.0, 5.0})
    for (double w : {0.0, 0.7, 1.5, 1.9}) {
      PowerOptions opts;
      opts.tol = 1e-7;
      opts.max_iter = 5000;
      const auto rho = spectral_radius_power(gadi_ab_sweep_operator(p.A, p.B, a, w), opts);
      CHECK(rho.value < 1.0);
    }
}

TEST_CASE("factor cache reuses factorizations") {
  const auto p = sylvester_family(10, 0.1);
  FactorCache cache;
  const auto r1 = gadi_ab_solve(p.A, p.B, p.C, 1.2, 0.0, 1e-6, 1000, &cache);
  CHECK(cache.size() == 2);
  const auto r2 = gadi_ab_solve(p.A, p.B, p.C, 1.2, 0.5, 1e-6, 1000, &cache);
  CHECK(cache.size() == 2);
  gadi_ab_solve(p.A, p.B, p.C, 1.3, 0.5, 1e-6, 1000, &cache);
  CHECK(cache.size() == 4);
  const auto r3 = gadi_ab_solve(p.A, p.B, p.C, 1.2, 0.0, 1e-6, 1000);
  CHECK(r1.final_X == r3.final_X);
  (void)r2;
}

TEST_CASE("non-banded matrices fall back to an iterative subsolve") {
  // tridiagonal plus corner couplings: sparse but with full bandwidth
  const std::size_t n = 400;
  std::vector<Triplet> t{{0, n - 1, 0.3}, {n - 1, 0, -0.3}};
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.2});
  }
  const auto A = SparseMatrix::from_triplets(n, n, t);
  CHECK_FALSE(ShiftedSolver(A, 1.0).banded());
  CHECK(ShiftedSolver(tridiag(40, -1, 2, -1), 1.0).banded());
  DenseMatrix X(n, 2, 1.0);
  const auto B = identity(2);
  const auto C = multiply(A, X);
  auto C2 = C;
  for (std::size_t k = 0; k < C2.data().size(); ++k) C2.data()[k] += X.data()[k];
  const auto rep = gadi_ab_solve(A, B, C2, 2.0, 1.0, 1e-8, 2000);
  CHECK(rep.converged());
}

TEST_CASE("gadi_ab argument checks") {
  const auto p = sylvester_family(4, 0.1);
  CHECK_THROWS_WITH_AS(gadi_ab_solve(p.A, p.B, p.C, 0.0, 0.0), "alpha must be positive", InvalidArgument);
  CHECK_THROWS_AS(gadi_ab_solve(p.A, p.B, p.C, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(gadi_ab_solve(p.A, p.B, DenseMatrix(3, 4), 1.0, 0.0), DimensionMismatch);
}

TEST_CASE("factor cache separates a matrix from its transpose") {
  // r = 1 zeroes the subdiagonal, so A and A^T hold the same values in swapped slots
  const auto p = sylvester_family(32, 1.0);
  const auto Bt = transpose(p.B);
  FactorCache cache;
  const auto a = cache.get(p.A, 1.28);
  const auto b = cache.get(Bt, 1.28);
  CHECK(cache.size() == 2);
  CHECK(a != b);
  CHECK(cache.get(p.A, 1.28) == a);
  const auto cached = gadi_ab_solve(p.A, p.B, p.C, 1.28, 0.1, 1e-6, 5000, &cache);
  const auto plain = gadi_ab_solve(p.A, p.B, p.C, 1.28, 0.1);
  CHECK(cached.iterations == plain.iterations);
  CHECK(cached.converged());
}
