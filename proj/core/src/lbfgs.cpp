#include "gadi/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "gadi/error.hpp"

namespace gadi {

namespace {

struct Probe {
  double t, f, d; // step, value, directional derivative
};

double cubic_min(const Probe& a, const Probe& b) {
  const double d1 = a.d + b.d - 3.0 * (a.f - b.f) / (a.t - b.t);
  const double disc = d1 * d1 - a.d * b.d;
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.t - a.t);
    const double t = b.t - (b.t - a.t) * (b.d + d2 - d1) / (b.d - a.d + 2.0 * d2);
    const double lo = std::min(a.t, b.t), hi = std::max(a.t, b.t);
    const double margin = 0.1 * (hi - lo);
    if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
  }
  return 0.5 * (a.t + b.t);
}

} // namespace

LbfgsResult lbfgs_minimize(const Objective& fn, std::span<const double> x0, const LbfgsOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw InvalidDimension("lbfgs: empty parameter vector");
  LbfgsResult res;
  res.x.assign(x0.begin(), x0.end());
  Vector g(n), gn(n), xn(n), dir(n);
  double f = fn(res.x, g);
  if (!std::isfinite(f)) throw InvalidArgument("lbfgs: objective is not finite at the start point");
  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto eval = [&](double t) {
    for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + t * dir[i];
    const double fv = fn(xn, gn);
    return Probe{t, fv, std::isfinite(fv) ? dot(gn, dir) : std::numeric_limits<double>::quiet_NaN()};
  };

  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax <= opts.grad_tol * std::max(1.0, std::abs(f))) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    dir = g;
    std::vector<double> a(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      a[i] = rho_hist[i] * dot(s_hist[i], dir);
      axpy(-a[i], y_hist[i], dir);
    }
    if (!s_hist.empty()) scale(dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back()), dir);
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * dot(y_hist[i], dir);
      axpy(a[i] - b, s_hist[i], dir);
    }
    scale(-1.0, dir);
    double d0 = dot(g, dir);
    if (!(d0 < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = g;
      scale(-1.0, dir);
      d0 = dot(g, dir);
    }

    // strong Wolfe line search (bracket, then zoom)
    const Probe p0{0.0, f, d0};
    Probe prev = p0;
    double t = s_hist.empty() ? std::min(1.0, 1.0 / std::max(gmax, 1e-300)) : 1.0;
    bool found = false;
    Probe lo{}, hi{};
    bool zoom = false;
    Probe accepted{};
    for (std::size_t ls = 0; ls < opts.max_line_search; ++ls) {
      const Probe p = eval(t);
      if (!std::isfinite(p.f)) {
        t = 0.5 * (prev.t + t);
        continue;
      }
      if (p.f > f + opts.c1 * t * d0 || (ls > 0 && p.f >= prev.f)) {
        lo = prev;
        hi = p;
        zoom = true;
        break;
      }
      if (std::abs(p.d) <= -opts.c2 * d0) {
        accepted = p;
        found = true;
        break;
      }
      if (p.d >= 0.0) {
        lo = p;
        hi = prev;
        zoom = true;
        break;
      }
      prev = p;
      t *= 2.0;
    }
    if (zoom) {
      for (std::size_t ls = 0; ls < opts.max_line_search; ++ls) {
        const double tt = cubic_min(lo, hi);
        const Probe p = eval(tt);
        if (!std::isfinite(p.f) || p.f > f + opts.c1 * tt * d0 || p.f >= lo.f) {
          hi = std::isfinite(p.f) ? p : Probe{tt, std::numeric_limits<double>::infinity(), 0.0};
        } else {
          if (std::abs(p.d) <= -opts.c2 * d0) {
            accepted = p;
            found = true;
            break;
          }
          if (p.d * (hi.t - lo.t) >= 0.0) hi = lo;
          lo = p;
        }
        if (std::abs(hi.t - lo.t) < 1e-16 * std::max(1.0, std::abs(lo.t))) break;
      }
      if (!found && lo.t > 0.0) {
        accepted = lo;
        found = true;
      }
    }
    if (!found) break;
    const Probe fin = eval(accepted.t); // refresh xn, gn at the accepted step
    Vector s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - res.x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    const double f_old = f;
    res.x = xn;
    g = gn;
    f = fin.f;
    res.iterations = k + 1;
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (std::abs(f_old - f) <= opts.f_rel_tol * std::max(1.0, std::abs(f))) {
      res.converged = true;
      break;
    }
  }
  res.f = f;
  return res;
}

Objective central_difference(std::function<double(std::span<const double>)> f, double rel_step) {
  return [f = std::move(f), rel_step](std::span<const double> x, std::span<double> g) {
    const double fx = f(x);
    if (!std::isfinite(fx)) return fx;
    Vector xp(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = rel_step * std::max(1.0, std::abs(x[i]));
      xp[i] = x[i] + h;
      const double fp = f(xp);
      xp[i] = x[i] - h;
      const double fm = f(xp);
      xp[i] = x[i];
      if (!std::isfinite(fp) || !std::isfinite(fm)) return std::numeric_limits<double>::infinity();
      g[i] = (fp - fm) / (2.0 * h);
    }
    return fx;
  };
}

} // namespace gadi
