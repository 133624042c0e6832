#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gadi/gpr.hpp"
#include "gadi/lbfgs.hpp"
#include "oracles.hpp"

using namespace gadi;

namespace {

oracle::Mat gram(const std::vector<double>& x, double iota, double sf, double noise) {
  oracle::Mat K = oracle::zeros(x.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      K[i][j] = sf * sf * std::exp(-std::abs(x[i] - x[j]) / (2 * iota * iota)) + (i == j ? noise * noise : 0.0);
  return K;
}

double brute_lml(const std::vector<double>& x, const std::vector<double>& y, double iota, double sf, double noise) {
  const auto K = gram(x, iota, sf, noise);
  const auto a = oracle::solve(K, y);
  double q = 0;
  for (std::size_t i = 0; i < y.size(); ++i) q += y[i] * a[i];
  return -0.5 * q - 0.5 * std::log(oracle::det(K)) - 0.5 * static_cast<double>(y.size()) * std::log(2 * std::numbers::pi);
}

} // namespace

TEST_CASE("exponential kernel") {
  CHECK(exp_kernel(3.0, 3.0, 0.4, 1.7) == doctest::Approx(1.7 * 1.7));
  CHECK(exp_kernel(0.0, 2.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(exp_kernel(a, b, 0.8, 2.0) == exp_kernel(b, a, 0.8, 2.0));
  }
}

TEST_CASE("log marginal likelihood") {
  const double sf = 1.5, s = 1e-2;
  const std::vector<double> x1{0.3}, y1{0.0};
  CHECK(log_marginal_likelihood(x1, y1, 1.0, sf, s) ==
        doctest::Approx(-0.5 * std::log(sf * sf + s * s) - 0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-14));

  const std::vector<double> x2{0.0, 0.5}, y2{1.0, -0.3};
  // closed-form 2x2 inverse and determinant
  const double k11 = sf * sf + s * s, k12 = sf * sf * std::exp(-0.5 / (2 * 0.7 * 0.7));
  const double det = k11 * k11 - k12 * k12;
  const double quad = (k11 * y2[0] * y2[0] - 2 * k12 * y2[0] * y2[1] + k11 * y2[1] * y2[1]) / det;
  const double ref = -0.5 * quad - 0.5 * std::log(det) - std::log(2 * std::numbers::pi);
  CHECK(std::abs(log_marginal_likelihood(x2, y2, 0.7, sf, s) - ref) <= 1e-12 * std::abs(ref));

  std::vector<double> y3{1.0, -0.3};
  double prev = log_marginal_likelihood(x2, y3, 0.7, sf, s);
  for (int k = 0; k < 5; ++k) {
    for (double& v : y3) v *= 2;
    const double cur = log_marginal_likelihood(x2, y3, 0.7, sf, s);
    CHECK(cur < prev);
    prev = cur;
  }

  const std::vector<double> dup{1.0, 1.0};
  CHECK_THROWS_AS(log_marginal_likelihood(dup, y2, 1.0, 1.0, 0.0), SingularMatrix);
  CHECK_THROWS_AS(log_marginal_likelihood(x2, y1, 1.0, 1.0, 0.1), DimensionMismatch);
}

TEST_CASE("posterior against brute force") {
  const std::vector<double> x{0.1, 0.45, 0.9}, y{0.3, -0.2, 0.7};
  const double iota = 0.6, sf = 1.2, noise = 1e-2;
  const auto m = GprModel::build(x, y, iota, sf, noise);
  const auto Kinv = oracle::inverse(gram(x, iota, sf, noise));
  for (double xs : {-0.3, 0.2, 0.45, 0.77, 2.0}) {
    oracle::Vec k(3);
    for (std::size_t i = 0; i < 3; ++i) k[i] = exp_kernel(xs, x[i], iota, sf);
    const auto Kk = oracle::matvec(Kinv, k);
    const auto Ky = oracle::matvec(Kinv, y);
    double mean = 0, quad = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      mean += k[i] * Ky[i];
      quad += k[i] * Kk[i];
    }
    const auto p = predict(m, xs);
    CHECK(std::abs(p.mean - mean) <= 1e-12);
    CHECK(std::abs(p.variance - (sf * sf - quad)) <= 1e-12);
    CHECK(p.ci_low == doctest::Approx(p.mean - 1.96 * std::sqrt(p.variance)).epsilon(1e-15));
    CHECK(p.ci_high == doctest::Approx(p.mean + 1.96 * std::sqrt(p.variance)).epsilon(1e-15));
    CHECK(p.variance >= 0.0);
    CHECK(p.variance <= sf * sf + 1e-10);
  }
  CHECK(std::abs(m.log_likelihood() - brute_lml(x, y, iota, sf, noise)) <= 1e-10);
}

TEST_CASE("cached factor reproduces the Gram matrix") {
  const std::vector<double> x{1, 2, 4, 8, 9}, y{1, 0, 1, 0, 1};
  const auto m = GprModel::build(x, y, 2.0, 0.5, 1e-4, 9.0);
  const std::size_t n = x.size();
  const auto& L = m.chol();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += L[k * n + i] * L[k * n + j];
      const double ref = exp_kernel(x[i] / 9.0, x[j] / 9.0, 2.0, 0.5) + (i == j ? 1e-8 : 0.0);
      CHECK(std::abs(s - ref) <= 1e-10 * std::abs(ref));
    }
}

TEST_CASE("prediction limits") {
  const std::vector<double> x{1, 2, 3}, y{0.5, 0.8, 0.6};
  const auto m = GprModel::build(x, y, 0.5, 1.0, 1e-4);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(m.predict(x[i]).mean - y[i]) <= 1e-2 * std::abs(y[i]) + 1e-4);
  const auto far = m.predict(1e4);
  CHECK(std::abs(far.mean) <= 1e-12);
  CHECK(far.variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prediction is linear in the targets") {
  const std::vector<double> x{0.0, 0.3, 0.5, 1.1};
  std::mt19937_64 rng(73);
  const auto y1 = oracle::random_vec(4, rng), y2 = oracle::random_vec(4, rng);
  std::vector<double> y3(4);
  for (std::size_t i = 0; i < 4; ++i) y3[i] = 1.5 * y1[i] - 0.25 * y2[i];
  const auto m1 = GprModel::build(x, y1, 0.9, 1.1, 1e-3), m2 = GprModel::build(x, y2, 0.9, 1.1, 1e-3),
             m3 = GprModel::build(x, y3, 0.9, 1.1, 1e-3);
  for (double xs : {0.1, 0.7, 2.0})
    CHECK(m3.predict(xs).mean == doctest::Approx(1.5 * m1.predict(xs).mean - 0.25 * m2.predict(xs).mean).epsilon(1e-12));
}

TEST_CASE("build rejects bad data") {
  CHECK_THROWS_AS(GprModel::build({1, 1}, {0, 0}, 1, 1, 1e-4), InvalidArgument);
  CHECK_THROWS_AS(GprModel::build({1, 2}, {0, 0}, 0, 1, 1e-4), InvalidArgument);
  CHECK_THROWS_AS(GprModel::build({1, 2}, {0}, 1, 1, 1e-4), DimensionMismatch);
  CHECK_THROWS_AS(gpr_fit({1.0}, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(GprModel().predict(1.0), InvalidArgument);
}

TEST_CASE("lbfgs minimizes the Rosenbrock function") {
  const Objective f = [](std::span<const double> x, std::span<double> g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  LbfgsOptions o;
  o.max_iter = 500;
  o.grad_tol = 1e-10;
  const auto r = lbfgs_minimize(f, Vector{-1.2, 1.0}, o);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));

  const auto fd = central_difference([](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3) + 2 * x[1] * x[1]; });
  const auto q = lbfgs_minimize(fd, Vector{0.0, 5.0});
  CHECK(q.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(std::abs(q.x[1]) <= 1e-6);
}

TEST_CASE("fit on constant targets") {
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(0.42);
  }
  const auto m = gpr_fit(x, y);
  for (double xs : {1.5, 4.0, 7.3, 9.9}) CHECK(std::abs(m.predict(xs).mean - 0.42) <= 1e-3);
}

TEST_CASE("fit at least matches the generating hyperparameters") {
  std::mt19937_64 rng(79);
  std::vector<double> x;
  for (int i = 0; i < 15; ++i) x.push_back(static_cast<double>(i) / 14.0);
  const double iota = 0.5, sf = 1.3, noise = 1e-4;
  // sample y = L z with L the Cholesky factor of the Gram matrix
  const auto K = gram(x, iota, sf, noise);
  oracle::Mat L = oracle::zeros(15, 15);
  for (std::size_t j = 0; j < 15; ++j) {
    double s = K[j][j];
    for (std::size_t k = 0; k < j; ++k) s -= L[j][k] * L[j][k];
    L[j][j] = std::sqrt(s);
    for (std::size_t i = j + 1; i < 15; ++i) {
      double t = K[i][j];
      for (std::size_t k = 0; k < j; ++k) t -= L[i][k] * L[j][k];
      L[i][j] = t / L[j][j];
    }
  }
  std::normal_distribution<double> nd;
  oracle::Vec z(15);
  for (double& v : z) v = nd(rng);
  const auto y = oracle::matvec(L, z);
  const auto m = gpr_fit(x, y);
  CHECK(m.input_scale() == 1.0);
  CHECK(m.log_likelihood() >= log_marginal_likelihood(x, y, iota, sf, noise) - 1e-6);
}

TEST_CASE("fit is deterministic") {
  const std::vector<double> x{2, 4, 6, 8, 10}, y{0.9, 0.6, 0.45, 0.4, 0.38};
  const auto a = gpr_fit(x, y), b = gpr_fit(x, y);
  CHECK(a.iota() == b.iota());
  CHECK(a.sigma_f() == b.sigma_f());
  CHECK(a.weights() == b.weights());
  GprFitOptions o;
  o.seed = 5;
  CHECK_NOTHROW(gpr_fit(x, y, o));
}

TEST_CASE("fitted model interpolates its training data") {
  const std::vector<double> x{2, 4, 6, 8, 10, 12}, y{0.8, 0.5, 0.35, 0.3, 0.27, 0.26};
  const auto m = gpr_fit(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(m.predict(x[i]).mean - y[i]) <= 1e-2 * y[i]);
}

TEST_CASE("retrain") {
  const std::vector<double> x{2, 4, 6, 8, 10}, y{0.9, 0.6, 0.45, 0.4, 0.38};
  const auto m = gpr_fit(x, y);

  const auto same = retrain(m, std::vector<double>{});
  CHECK(same.iota() == m.iota());
  CHECK(same.predict(5.0).mean == m.predict(5.0).mean);

  std::vector<double> skipped;
  const std::vector<double> extra{3, 5, 4, 7, 9};
  const auto r = retrain(m, extra, &skipped);
  CHECK(skipped == std::vector<double>{4});
  CHECK(r.inputs().size() == 9);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(r.predict(x[i]).mean - y[i]) <= 1e-2 * y[i]);
  for (double v : {3.0, 5.0, 7.0, 9.0}) {
    const auto before = m.predict(v), after = r.predict(v);
    CHECK(after.ci_high - after.ci_low <= before.ci_high - before.ci_low + 1e-12);
  }
}
