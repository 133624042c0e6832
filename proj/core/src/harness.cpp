#include "gadi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "gadi/gadi.hpp"
#include "gadi/inexact.hpp"
#include "gadi/matrix_market.hpp"
#include "gadi/sylvester.hpp"

namespace gadi {

namespace {

constexpr std::pair<Method, std::string_view> kMethods[] = {
    {Method::hss, "hss"},         {Method::drs, "drs"},   {Method::gadi_hs, "gadi-hs"},
    {Method::practical_gadi_hs, "practical-gadi-hs"}, {Method::ihss, "ihss"}, {Method::gadi_ab, "gadi-ab"}};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

} // namespace

std::string to_string(Method m) {
  for (const auto& [k, v] : kMethods)
    if (k == m) return std::string(v);
  return "unknown";
}

Method parse_method(std::string_view s) {
  for (const auto& [k, v] : kMethods)
    if (v == s) return k;
  throw InvalidArgument("unknown method '" + std::string(s) +
                        "' (expected hss, drs, gadi-hs, practical-gadi-hs, ihss or gadi-ab)");
}

std::vector<double> grid_values(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    throw InvalidArgument("grid needs finite lo <= hi and step > 0");
  std::vector<double> v;
  for (std::size_t i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi + 0.5 * step) break;
    v.push_back(x);
  }
  return v;
}

TraversalResult traverse(const PointEvaluator& eval, std::span<const double> alphas, std::span<const double> omegas,
                         const TraversalOptions& opts) {
  if (alphas.empty() || omegas.empty()) throw InvalidArgument("traverse: empty grid");
  for (double a : alphas)
    if (!(a > 0.0)) throw InvalidArgument("traverse: alpha grid must be positive");
  const std::size_t total = alphas.size() * omegas.size();
  const std::size_t jobs = std::max<std::size_t>(1, opts.jobs);

  TraversalResult res;
  res.grid.resize(total);
  std::size_t best_it = std::numeric_limits<std::size_t>::max();
  std::size_t best_idx = total;

  // batches keep the pruning cap independent of thread timing
  const std::size_t batch = opts.prune ? jobs : total;
  for (std::size_t start = 0; start < total; start += batch) {
    const std::size_t stop = std::min(total, start + batch);
    const std::size_t cap = opts.prune ? std::min(opts.max_outer, best_it) : opts.max_outer;
    std::atomic<std::size_t> next{start};
    auto work = [&] {
      for (std::size_t i = next++; i < stop; i = next++) {
        auto& pt = res.grid[i];
        pt.alpha = alphas[i / omegas.size()];
        pt.omega = omegas[i % omegas.size()];
        try {
          std::tie(pt.it, pt.converged) = eval(pt.alpha, pt.omega, cap);
        } catch (const Error&) {
          pt.it = cap;
          pt.converged = false;
        }
      }
    };
    const std::size_t nthreads = std::min(jobs, stop - start);
    if (nthreads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
    }
    for (std::size_t i = start; i < stop; ++i) {
      const auto& q = res.grid[i];
      if (!q.converged) continue;
      const bool better = best_idx == total || q.it < best_it ||
                          (q.it == best_it && std::pair{q.alpha, q.omega} <
                                                  std::pair{res.grid[best_idx].alpha, res.grid[best_idx].omega});
      if (better) {
        best_it = q.it;
        best_idx = i;
      }
    }
  }
  if (best_idx == total) throw TraversalError("traverse: no grid point converged");
  res.best_alpha = res.grid[best_idx].alpha;
  res.best_omega = res.grid[best_idx].omega;
  res.best_it = best_it;
  return res;
}

PointEvaluator make_evaluator(const ProblemInstance& problem, Method method, const TraversalOptions& opts) {
  const ProblemInstance* p = &problem;
  if (method == Method::gadi_ab) {
    if (problem.family != Family::sylvester) throw InvalidArgument("gadi-ab needs a Sylvester problem");
    auto cache = std::make_shared<FactorCache>();
    return [p, cache, tol = opts.outer_rel_tol](double a, double w, std::size_t cap) {
      const auto r = gadi_ab_solve(p->A, p->B, p->C, a, w, tol, cap, cache.get());
      return std::pair{r.iterations, r.converged()};
    };
  }
  if (problem.family == Family::sylvester) throw InvalidArgument(to_string(method) + " needs a linear-system problem");
  if (method == Method::practical_gadi_hs || method == Method::ihss) {
    return [p, method, opts](double a, double w, std::size_t cap) {
      InexactConfig c;
      c.alpha = a;
      c.omega = method == Method::ihss ? 0.0 : w;
      c.delta_H = opts.delta_H;
      c.delta_S = opts.delta_S;
      c.outer_rel_tol = opts.outer_rel_tol;
      c.max_outer = cap;
      const auto r = practical_gadi_hs(p->A, p->b, c);
      return std::pair{r.iterations, r.converged()};
    };
  }
  return [p, method, opts](double a, double w, std::size_t cap) {
    GadiConfig c;
    c.alpha = a;
    c.omega = w;
    c.outer_rel_tol = opts.outer_rel_tol;
    c.max_outer = cap;
    SolveReport r;
    switch (method) {
    case Method::hss: r = hss_solve(p->A, p->b, c); break;
    case Method::drs: r = drs_solve(p->A, p->b, c); break;
    default: r = gadi_hs_solve(p->A, p->b, c); break;
    }
    return std::pair{r.iterations, r.converged()};
  };
}

TraversalResult traverse(const ProblemInstance& problem, Method method, std::span<const double> alphas,
                         std::span<const double> omegas, const TraversalOptions& opts) {
  return traverse(make_evaluator(problem, method, opts), alphas, omegas, opts);
}

ProblemInstance make_problem(Family family, std::size_t n, double r) {
  switch (family) {
  case Family::conv_diff_3d: return conv_diff_3d(n);
  case Family::parabolic_2d: return parabolic_2d(n);
  case Family::sylvester: return sylvester_family(n, r);
  }
  throw InvalidArgument("unknown family");
}

std::vector<TrainingPair> build_training_set(Family family, Method method, std::span<const std::size_t> schedule,
                                             std::span<const double> alphas, std::span<const double> omegas,
                                             const TraversalOptions& opts, double r) {
  if (schedule.empty()) throw InvalidArgument("build_training_set: empty schedule");
  std::vector<TrainingPair> out;
  for (std::size_t n : schedule) {
    const auto p = make_problem(family, n, r);
    try {
      const auto t = traverse(p, method, alphas, omegas, opts);
      out.push_back({static_cast<double>(n), t.best_alpha});
    } catch (const TraversalError& e) {
      throw TraversalError("n = " + std::to_string(n) + ": " + e.what(), n);
    }
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void write_training_csv(std::ostream& os, std::span<const TrainingPair> pairs) {
  os << "n,alpha\n";
  for (const auto& q : pairs) os << format_double(q.n) << ',' << format_double(q.alpha) << '\n';
}

std::vector<TrainingPair> read_training_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty training CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,alpha") throw ParseError("training CSV header must be 'n,alpha'");
  std::vector<TrainingPair> out;
  for (std::size_t ln = 2; std::getline(is, line); ++ln) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 2) throw ParseError("line " + std::to_string(ln) + ": expected 2 fields");
    out.push_back({parse_double(f[0], ln), parse_double(f[1], ln)});
  }
  return out;
}

void write_traversal_csv(std::ostream& os, const TraversalResult& r) {
  os << "alpha,omega,it,converged\n";
  for (const auto& p : r.grid)
    os << format_double(p.alpha) << ',' << format_double(p.omega) << ',' << p.it << ',' << (p.converged ? 1 : 0)
       << '\n';
}

std::vector<std::filesystem::path> export_instance(const ProblemInstance& p, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  auto put = [&](const std::string& name, const auto& m) {
    out.push_back(dir / name);
    mm::write_file(out.back(), m);
  };
  auto column = [](const Vector& v) {
    DenseMatrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data().begin());
    return m;
  };
  put("A.mtx", p.A);
  if (p.family == Family::sylvester) {
    put("B.mtx", p.B);
    put("C.mtx", p.C);
    put("X_exact.mtx", p.X_exact);
  } else {
    put("b.mtx", column(p.b));
    put("x_exact.mtx", column(p.x_exact));
  }
  return out;
}

} // namespace gadi
