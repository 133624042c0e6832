#include "commands.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "gadi/harness.hpp"
#include "gadi/inexact.hpp"
#include "gadi/json_io.hpp"
#include "gadi/matrix_market.hpp"
#include "gadi/params.hpp"

namespace gadi::cli {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path output_path(const Common& c, const fs::path& explicit_path, const fs::path& fallback) {
  fs::path p = explicit_path.empty() ? c.output_dir / fallback : explicit_path;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

namespace {

Family family_arg(const std::string& s) {
  try {
    return parse_family(s);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

Method method_arg(const std::string& s) {
  try {
    return parse_method(s);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot open " + p.string() + " for writing");
  return os;
}

Vector read_vector(const fs::path& p) {
  const auto m = mm::read_dense_file(p);
  if (m.cols() != 1) throw UsageError(p.string() + ": right-hand side must have one column");
  return {m.data().begin(), m.data().end()};
}

ProblemInstance load_problem(const ProblemArgs& a, Method m) {
  const bool from_files = !a.matrix.empty();
  if (from_files == !a.family.empty())
    throw UsageError("give either --family with --n, or --matrix with --rhs");
  if (!from_files) {
    if (a.n == 0) throw UsageError("--n is required with --family");
    const Family f = family_arg(a.family);
    if (f == Family::sylvester && !(a.r > 0.0)) throw UsageError("--r must be positive for the sylvester family");
    if ((f == Family::sylvester) != (m == Method::gadi_ab))
      throw UsageError(to_string(m) + " cannot solve the " + a.family + " family");
    return make_problem(f, a.n, a.r);
  }
  if (a.rhs.empty()) throw UsageError("--rhs is required with --matrix");
  ProblemInstance p;
  p.n = a.n;
  p.A = mm::read_sparse_file(a.matrix);
  if (m == Method::gadi_ab) {
    if (a.matrix_b.empty()) throw UsageError("gadi-ab needs --matrix-b");
    p.family = Family::sylvester;
    p.B = mm::read_sparse_file(a.matrix_b);
    p.C = mm::read_dense_file(a.rhs);
  } else {
    if (!a.matrix_b.empty()) throw UsageError("--matrix-b is only used by gadi-ab");
    p.b = read_vector(a.rhs);
  }
  return p;
}

json problem_json(const ProblemArgs& a, const ProblemInstance& p) {
  json j{{"rows", p.A.rows()}, {"nnz", p.A.nnz()}};
  if (a.matrix.empty()) {
    j["family"] = to_string(p.family);
    j["n"] = p.n;
    if (p.family == Family::sylvester) j["r"] = p.r;
  } else {
    j["matrix"] = a.matrix.string();
    if (!a.matrix_b.empty()) j["matrix_b"] = a.matrix_b.string();
    j["rhs"] = a.rhs.string();
    if (a.n > 0) j["n"] = a.n;
  }
  return j;
}

std::optional<double> fixed_omega(Method m) {
  switch (m) {
  case Method::hss:
  case Method::ihss: return 0.0;
  case Method::drs: return 1.0;
  default: return std::nullopt;
  }
}

struct Resolved {
  double alpha = 0.0, omega = 0.0;
  json detail;
};

Resolved resolve_params(const SolveArgs& a, Method m, const ProblemInstance& p) {
  std::string src = a.param_source;
  if (src.empty()) src = a.model.empty() ? "explicit" : "gpr";
  if (src != "explicit" && src != "theory" && src != "gpr")
    throw UsageError("--param-source must be explicit, theory or gpr");
  if (src != "explicit" && a.alpha) throw UsageError("conflicting parameter sources: --alpha with --param-source " + src);
  if (src != "gpr" && !a.model.empty()) throw UsageError("conflicting parameter sources: --model with --param-source " + src);

  Resolved r;
  r.detail["source"] = src;
  const auto fixed = fixed_omega(m);
  if (fixed && a.omega && *a.omega != *fixed)
    throw UsageError("omega is fixed at " + format_double(*fixed) + " for " + to_string(m));

  if (src == "explicit") {
    if (!a.alpha) throw UsageError("no parameter source: give --alpha, --param-source theory or --model FILE");
    r.alpha = *a.alpha;
  } else if (src == "theory") {
    if (m == Method::gadi_ab) throw UsageError("no theoretical parameters are available for gadi-ab");
    if (a.omega && !fixed) throw UsageError("conflicting parameter sources: --omega with --param-source theory");
    const auto s = summarize_spectrum(p.A);
    r.detail["spectrum"] = s;
    if (m == Method::hss || m == Method::ihss) {
      r.alpha = hss_alpha(s);
    } else {
      const auto g = gadi_hs_params(s);
      r.alpha = g.alpha;
      r.omega = g.omega;
    }
  } else {
    if (a.model.empty()) throw UsageError("--param-source gpr needs --model FILE");
    if (p.n == 0) throw UsageError("--param-source gpr needs the problem size --n");
    const auto model = load_gpr_model(a.model);
    const auto pr = model.predict(static_cast<double>(p.n));
    r.alpha = pr.mean;
    r.detail["model"] = a.model.string();
    r.detail["prediction"] = {{"mean", pr.mean}, {"ci_low", pr.ci_low}, {"ci_high", pr.ci_high}};
  }
  if (fixed) {
    r.omega = *fixed;
  } else if (src != "theory") {
    if (!a.omega) throw UsageError("--omega is required for " + to_string(m));
    r.omega = *a.omega;
  }
  if (!(r.alpha > 0.0)) throw UsageError("alpha must be positive");
  if (!(r.omega >= 0.0 && r.omega < 2.0)) throw UsageError("omega must lie in [0, 2)");
  r.detail["alpha"] = r.alpha;
  r.detail["omega"] = r.omega;
  return r;
}

TraversalOptions traversal_options(const TraverseArgs& a) {
  TraversalOptions o;
  o.max_outer = a.max_iter;
  o.outer_rel_tol = a.tol;
  o.delta_H = a.delta_h;
  o.delta_S = a.delta_s;
  o.jobs = a.jobs;
  o.prune = a.prune;
  return o;
}

} // namespace

int cmd_gen(const Common& c, const GenArgs& a) {
  const Family f = family_arg(a.family);
  if (f == Family::sylvester && !(a.r > 0.0)) throw UsageError("--r must be positive for the sylvester family");
  const auto p = make_problem(f, a.n, a.r);
  fs::path dir = a.out.empty() ? c.output_dir / (a.family + "_n" + std::to_string(a.n)) : a.out;
  const auto files = export_instance(p, dir);
  json meta{{"family", a.family}, {"n", a.n},          {"beta", p.beta},
            {"rows", p.A.rows()}, {"cols", p.A.cols()}, {"nnz", p.A.nnz()}};
  if (f == Family::sylvester) meta["r"] = a.r;
  json names = json::array();
  for (const auto& file : files) names.push_back(file.filename().string());
  meta["files"] = names;
  open_out(dir / "meta.json") << meta.dump(2) << '\n';
  std::cout << "wrote " << files.size() + 1 << " files to " << dir.string() << '\n';
  return 0;
}

int cmd_solve(const Common& c, const SolveArgs& a) {
  const Method m = method_arg(a.method);
  const auto p = load_problem(a.problem, m);
  const auto par = resolve_params(a, m, p);
  json doc{{"command", "solve"},
           {"method", to_string(m)},
           {"problem", problem_json(a.problem, p)},
           {"parameters", par.detail},
           {"settings", {{"tol", a.tol}, {"max_iter", a.max_iter}}}};

  bool converged = false;
  std::size_t it = 0;
  double res = 0.0;
  if (m == Method::gadi_ab) {
    const auto r = gadi_ab_solve(p.A, p.B, p.C, par.alpha, par.omega, a.tol, a.max_iter);
    doc["report"] = r;
    converged = r.converged();
    it = r.iterations;
    res = r.residual_history.back();
  } else {
    SolveReport r;
    if (m == Method::practical_gadi_hs || m == Method::ihss) {
      InexactConfig cfg;
      cfg.alpha = par.alpha;
      cfg.omega = par.omega;
      cfg.delta_H = a.delta_h;
      cfg.delta_S = a.delta_s;
      cfg.outer_rel_tol = a.tol;
      cfg.max_outer = a.max_iter;
      doc["settings"]["delta_h"] = a.delta_h;
      doc["settings"]["delta_s"] = a.delta_s;
      r = practical_gadi_hs(p.A, p.b, cfg);
    } else {
      GadiConfig cfg;
      cfg.alpha = par.alpha;
      cfg.omega = par.omega;
      cfg.outer_rel_tol = a.tol;
      cfg.max_outer = a.max_iter;
      r = m == Method::hss ? hss_solve(p.A, p.b, cfg) : m == Method::drs ? drs_solve(p.A, p.b, cfg)
                                                                         : gadi_hs_solve(p.A, p.b, cfg);
    }
    doc["report"] = r;
    converged = r.converged();
    it = r.iterations;
    res = r.residual_history.back();
  }
  const auto path = output_path(c, a.out, "solve_" + to_string(m) + ".json");
  open_out(path) << doc.dump(2) << '\n';
  std::cout << to_string(m) << " alpha=" << format_double(par.alpha) << " omega=" << format_double(par.omega)
            << " it=" << it << " res=" << res << (converged ? " converged" : " NOT converged") << " report="
            << path.string() << '\n';
  return converged ? 0 : 1;
}

int cmd_traverse(const Common& c, const TraverseArgs& a) {
  const Method m = method_arg(a.method);
  if (a.alpha_grid.size() != 3) throw UsageError("--alpha-grid takes LO HI STEP");
  if (!(a.alpha_grid[0] > 0.0)) throw UsageError("alpha grid must start above 0");
  const auto p = load_problem(a.problem, m);
  std::vector<double> omegas;
  if (const auto fixed = fixed_omega(m)) {
    if ((a.omega && *a.omega != *fixed) || !a.omega_grid.empty())
      throw UsageError("omega is fixed at " + format_double(*fixed) + " for " + to_string(m));
    omegas = {*fixed};
  } else if (a.omega) {
    if (!a.omega_grid.empty()) throw UsageError("give --omega or --omega-grid, not both");
    omegas = {*a.omega};
  } else {
    const auto g = a.omega_grid.empty() ? std::vector<double>{0.0, 1.9, 0.1} : a.omega_grid;
    if (g.size() != 3) throw UsageError("--omega-grid takes LO HI STEP");
    omegas = grid_values(g[0], g[1], g[2]);
  }
  const auto alphas = grid_values(a.alpha_grid[0], a.alpha_grid[1], a.alpha_grid[2]);
  const auto opts = traversal_options(a);
  const auto r = traverse(p, m, alphas, omegas, opts);

  const auto path = output_path(c, a.out, "traverse_" + to_string(m) + ".csv");
  {
    auto os = open_out(path);
    write_traversal_csv(os, r);
  }
  json doc{{"command", "traverse"},
           {"method", to_string(m)},
           {"problem", problem_json(a.problem, p)},
           {"alpha_grid", a.alpha_grid},
           {"omegas", omegas},
           {"settings",
            {{"tol", a.tol}, {"max_iter", a.max_iter}, {"delta_h", a.delta_h}, {"delta_s", a.delta_s}, {"jobs", a.jobs}, {"prune", a.prune}}},
           {"best", {{"alpha", r.best_alpha}, {"omega", r.best_omega}, {"it", r.best_it}}},
           {"grid_csv", path.filename().string()}};
  fs::path side = path;
  side.replace_extension(".json");
  open_out(side) << doc.dump(2) << '\n';
  std::cout << "best alpha=" << format_double(r.best_alpha) << " omega=" << format_double(r.best_omega)
            << " it=" << r.best_it << " grid=" << path.string() << '\n';
  return 0;
}

int cmd_gpr_fit(const Common& c, const GprFitArgs& a) {
  std::ifstream is(a.training);
  if (!is) throw UsageError("cannot open training set " + a.training.string());
  const auto pairs = read_training_csv(is);
  std::vector<double> x, y;
  for (const auto& q : pairs) {
    x.push_back(q.n);
    y.push_back(q.alpha);
  }
  GprFitOptions o;
  o.noise = a.noise;
  o.restarts = a.restarts;
  o.seed = a.seed;
  auto model = gpr_fit(x, y, o);
  if (!a.retrain.empty()) {
    std::vector<double> skipped;
    model = retrain(model, a.retrain, &skipped);
    for (double s : skipped) std::cerr << "retrain: skipped duplicate input " << format_double(s) << '\n';
  }
  const auto path = output_path(c, a.out, "gpr_model.json");
  save_gpr_model(path, model);
  std::cout << "iota=" << format_double(model.iota()) << " sigma_f=" << format_double(model.sigma_f())
            << " log_likelihood=" << format_double(model.log_likelihood()) << " model=" << path.string() << '\n';
  return 0;
}

int cmd_gpr_predict(const Common& c, const GprPredictArgs& a) {
  const auto model = load_gpr_model(a.model);
  const auto path = output_path(c, a.out, "gpr_predict.csv");
  auto os = open_out(path);
  os << "n,mean,ci_low,ci_high\n";
  for (double n : a.n) {
    const auto p = model.predict(n);
    os << format_double(n) << ',' << format_double(p.mean) << ',' << format_double(p.ci_low) << ','
       << format_double(p.ci_high) << '\n';
  }
  std::cout << "wrote " << a.n.size() << " predictions to " << path.string() << '\n';
  return 0;
}

} // namespace gadi::cli
