#include "gadi/gpr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gadi/lbfgs.hpp"

namespace gadi {

double exp_kernel(double x, double y, double iota, double sigma_f) {
  return sigma_f * sigma_f * std::exp(-std::abs(x - y) / (2.0 * iota * iota));
}

namespace {

constexpr double kCi = 1.96;
constexpr double kLogBound = 12.0; // |log iota|, |log sigma_f| search box

Eigen::MatrixXd gram(std::span<const double> x, double iota, double sigma_f, double noise) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k = exp_kernel(x[i], x[j], iota, sigma_f);
      K(i, j) = K(j, i) = k;
    }
  K.diagonal().array() += noise * noise;
  return K;
}

struct Factored {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd weights;
  double log_likelihood = 0.0;
};

bool factor(std::span<const double> x, std::span<const double> y, double iota, double sigma_f, double noise,
            Factored& out) {
  out.llt.compute(gram(x, iota, sigma_f, noise));
  if (out.llt.info() != Eigen::Success) return false;
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  out.weights = out.llt.solve(yv);
  const Eigen::MatrixXd& L = out.llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) return false;
    logdet += 2.0 * std::log(L(i, i));
  }
  out.log_likelihood = -0.5 * yv.dot(out.weights) - 0.5 * logdet -
                       0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  return std::isfinite(out.log_likelihood);
}

void check_data(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("gpr: inputs and targets differ in length");
  if (x.empty()) throw InvalidDimension("gpr: no training data");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("gpr: non-finite training data");
}

} // namespace

double log_marginal_likelihood(std::span<const double> inputs, std::span<const double> targets, double iota,
                               double sigma_f, double noise) {
  check_data(inputs, targets);
  if (!(iota > 0.0) || !(sigma_f > 0.0) || !(noise >= 0.0)) throw InvalidArgument("gpr: hyperparameters must be positive");
  Factored f;
  if (!factor(inputs, targets, iota, sigma_f, noise, f))
    throw SingularMatrix("gpr: K + noise^2 I is not positive definite (duplicate inputs with zero noise?)");
  return f.log_likelihood;
}

GprModel GprModel::build(std::vector<double> inputs, std::vector<double> targets, double iota, double sigma_f,
                         double noise, double input_scale) {
  check_data(inputs, targets);
  if (!(iota > 0.0) || !(sigma_f > 0.0)) throw InvalidArgument("gpr: iota and sigma_f must be positive");
  if (!(noise > 0.0)) throw InvalidArgument("gpr: noise must be positive");
  if (!(input_scale > 0.0) || !std::isfinite(input_scale)) throw InvalidArgument("gpr: input_scale must be positive");
  {
    auto sorted = inputs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("gpr: training inputs must be distinct");
  }
  GprModel m;
  m.inputs_ = std::move(inputs);
  m.targets_ = std::move(targets);
  m.iota_ = iota;
  m.sigma_f_ = sigma_f;
  m.noise_ = noise;
  m.input_scale_ = input_scale;
  std::vector<double> scaled(m.inputs_.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = m.inputs_[i] / input_scale;
  Factored f;
  if (!factor(scaled, m.targets_, iota, sigma_f, noise, f))
    throw SingularMatrix("gpr: K + noise^2 I is not positive definite");
  m.log_likelihood_ = f.log_likelihood;
  const Eigen::MatrixXd L = f.llt.matrixL();
  m.chol_.assign(L.data(), L.data() + L.size());
  m.weights_.assign(f.weights.data(), f.weights.data() + f.weights.size());
  return m;
}

Prediction GprModel::predict(double x) const {
  if (inputs_.empty()) throw InvalidArgument("gpr: model is not fitted");
  const auto n = static_cast<Eigen::Index>(inputs_.size());
  const double xs = x / input_scale_;
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = exp_kernel(xs, inputs_[i] / input_scale_, iota_, sigma_f_);
  const Eigen::Map<const Eigen::VectorXd> w(weights_.data(), n);
  const Eigen::Map<const Eigen::MatrixXd> L(chol_.data(), n, n);
  const Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(k);
  Prediction p;
  p.mean = k.dot(w);
  p.variance = std::max(0.0, sigma_f_ * sigma_f_ - v.squaredNorm());
  const double half = kCi * std::sqrt(p.variance);
  p.ci_low = p.mean - half;
  p.ci_high = p.mean + half;
  return p;
}

Prediction predict(const GprModel& model, double x) { return model.predict(x); }

namespace {

struct Candidate {
  double nll = std::numeric_limits<double>::infinity();
  double log_iota = 0.0, log_sf = 0.0;
};

Candidate optimize_from(std::span<const double> x, std::span<const double> y, double noise, double log_iota,
                        double log_sf) {
  auto nll = [&](std::span<const double> t) {
    if (std::abs(t[0]) > kLogBound || std::abs(t[1]) > kLogBound) return std::numeric_limits<double>::infinity();
    Factored f;
    if (!factor(x, y, std::exp(t[0]), std::exp(t[1]), noise, f)) return std::numeric_limits<double>::infinity();
    return -f.log_likelihood;
  };
  const Vector t0{log_iota, log_sf};
  Candidate c;
  if (!std::isfinite(nll(t0))) return c;
  const auto r = lbfgs_minimize(central_difference(nll, 1e-5), t0);
  c.nll = r.f;
  c.log_iota = r.x[0];
  c.log_sf = r.x[1];
  return c;
}

} // namespace

GprModel gpr_fit(std::vector<double> inputs, std::vector<double> targets, const GprFitOptions& opts) {
  check_data(inputs, targets);
  if (inputs.size() < 2) throw InvalidArgument("gpr_fit: need at least 2 training points");
  if (!(opts.noise > 0.0)) throw InvalidArgument("gpr_fit: noise must be positive");
  double scale = 1.0;
  if (opts.rescale_inputs) {
    for (double v : inputs) scale = std::max(scale, std::abs(v));
  }
  std::vector<double> xs(inputs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = inputs[i] / scale;

  std::vector<std::pair<double, double>> starts;
  if (opts.theta0) starts.emplace_back(std::log(opts.theta0->first), std::log(opts.theta0->second));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u_iota(std::log(0.1), std::log(100.0)), u_sf(std::log(0.01), std::log(10.0));
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    const double a = u_iota(rng);
    const double b = u_sf(rng);
    starts.emplace_back(a, b);
  }
  if (starts.empty()) throw InvalidArgument("gpr_fit: no starting points (restarts = 0 and no theta0)");

  Candidate best;
  for (const auto& [li, ls] : starts) {
    const Candidate c = optimize_from(xs, targets, opts.noise, li, ls);
    if (c.nll < best.nll) best = c;
  }
  if (!std::isfinite(best.nll)) {
    const auto& s = starts.front();
    throw GprFitError("gpr_fit: no restart produced a finite likelihood", std::exp(s.first), std::exp(s.second));
  }
  return GprModel::build(std::move(inputs), std::move(targets), std::exp(best.log_iota), std::exp(best.log_sf),
                         opts.noise, scale);
}

GprModel retrain(const GprModel& model, std::span<const double> new_inputs, std::vector<double>* skipped) {
  std::vector<double> x = model.inputs(), y = model.targets();
  bool added = false;
  for (double v : new_inputs) {
    if (std::find(x.begin(), x.end(), v) != x.end()) {
      if (skipped) skipped->push_back(v);
      continue;
    }
    x.push_back(v);
    y.push_back(model.predict(v).mean);
    added = true;
  }
  if (!added) return model;
  std::vector<double> xs(x.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x[i] / model.input_scale();
  const Candidate c = optimize_from(xs, y, model.noise(), std::log(model.iota()), std::log(model.sigma_f()));
  if (!std::isfinite(c.nll))
    throw GprFitError("retrain: refit failed from the previous optimum", model.iota(), model.sigma_f());
  return GprModel::build(std::move(x), std::move(y), std::exp(c.log_iota), std::exp(c.log_sf), model.noise(),
                         model.input_scale());
}

} // namespace gadi
