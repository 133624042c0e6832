// gadi: generate problems, solve, traverse parameters, fit/predict GPR models,
// reproduce published tables. Exit codes: 0 ok, 1 numerical failure, 2 usage error.
#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "gadi/error.hpp"
#include "gadi/harness.hpp"

using namespace gadi::cli;

namespace {

void add_problem_options(CLI::App* sub, ProblemArgs& p) {
  sub->add_option("--family", p.family, "convdiff3d, parabolic2d or sylvester");
  sub->add_option("--n", p.n, "Grid size per dimension")->check(CLI::PositiveNumber);
  sub->add_option("--r", p.r, "Sylvester dominance parameter");
  sub->add_option("--matrix", p.matrix, "Matrix Market file for A")->check(CLI::ExistingFile);
  sub->add_option("--matrix-b", p.matrix_b, "Matrix Market file for B (gadi-ab)")->check(CLI::ExistingFile);
  sub->add_option("--rhs", p.rhs, "Matrix Market array file for b (or C)")->check(CLI::ExistingFile);
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return gadi::format_double(v.get<double>());
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw UsageError("config values must be scalars or arrays of scalars");
}

// Appends "--key value" for every config key not already given as a flag.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  CLI::App* sub = nullptr;
  for (const auto& a : args)
    if (auto* s = app.get_subcommand_no_throw(a)) {
      sub = s;
      break;
    }
  if (!sub) throw UsageError("--config needs a command");

  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config file " + path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError(path + ": config must be a JSON object");

  for (const auto& [key, value] : cfg.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt && name != "output-dir" && name != "verbose")
      throw UsageError(path + ": unknown key '" + key + "' for command " + sub->get_name());
    if (given(args, flag)) continue;
    if (name == "verbose") {
      for (int k = 0; k < value.get<int>(); ++k) args.emplace_back("-v");
      continue;
    }
    if (value.is_boolean() && opt && opt->get_expected_max() == 0) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    if (value.is_array())
      for (const auto& e : value) args.push_back(scalar_text(e));
    else
      args.push_back(scalar_text(value));
  }
  return args;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"GADI solvers, parameter traversal and GPR parameter prediction"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  std::string config_path;
  app.add_option("--config", config_path, "JSON file of option values; flags take precedence");
  app.add_option("--output-dir", common.output_dir, "Default output directory")->envname("GADI_OUTPUT_DIR");
  app.add_flag("-v,--verbose", common.verbosity, "Progress on stderr (repeat for more)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a test problem as Matrix Market files plus meta.json");
  g->add_option("--family", gen.family, "convdiff3d, parabolic2d or sylvester")->required();
  g->add_option("--n", gen.n, "Grid size per dimension")->required()->check(CLI::PositiveNumber);
  g->add_option("--r", gen.r, "Sylvester dominance parameter");
  g->add_option("--out", gen.out, "Output directory");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run one solver and write a JSON report");
  s->add_option("--method", solve.method, "hss, drs, gadi-hs, practical-gadi-hs, ihss or gadi-ab")->required();
  add_problem_options(s, solve.problem);
  s->add_option("--alpha", solve.alpha, "Splitting parameter");
  s->add_option("--omega", solve.omega, "Relaxation parameter in [0, 2)");
  s->add_option("--param-source", solve.param_source, "explicit, theory or gpr");
  s->add_option("--model", solve.model, "GPR model JSON (param-source gpr)")->check(CLI::ExistingFile);
  s->add_option("--delta-h", solve.delta_h, "CG tolerance exponent")->check(CLI::Range(1, 15));
  s->add_option("--delta-s", solve.delta_s, "CGNE tolerance exponent")->check(CLI::Range(1, 15));
  s->add_option("--tol", solve.tol, "Outer relative residual tolerance")->check(CLI::Range(0.0, 1.0));
  s->add_option("--max-iter", solve.max_iter, "Outer iteration cap")->check(CLI::PositiveNumber);
  s->add_option("--out", solve.out, "Report path");

  TraverseArgs trav;
  auto* t = app.add_subcommand("traverse", "Grid search of (alpha, omega) minimizing iteration count");
  t->add_option("--method", trav.method, "Solver")->required();
  add_problem_options(t, trav.problem);
  t->add_option("--alpha-grid", trav.alpha_grid, "LO HI STEP")->expected(3);
  t->add_option("--omega-grid", trav.omega_grid, "LO HI STEP")->expected(3);
  t->add_option("--omega", trav.omega, "Fixed omega");
  t->add_option("--delta-h", trav.delta_h, "CG tolerance exponent")->check(CLI::Range(1, 15));
  t->add_option("--delta-s", trav.delta_s, "CGNE tolerance exponent")->check(CLI::Range(1, 15));
  t->add_option("--tol", trav.tol, "Outer relative residual tolerance")->check(CLI::Range(0.0, 1.0));
  t->add_option("--max-iter", trav.max_iter, "Per-point outer iteration cap")->check(CLI::PositiveNumber);
  t->add_option("--jobs", trav.jobs, "Worker threads")->check(CLI::PositiveNumber);
  t->add_flag("--prune", trav.prune, "Cap each point at the best count so far");
  t->add_option("--out", trav.out, "Grid CSV path (a .json summary is written beside it)");

  GprFitArgs fit;
  auto* f = app.add_subcommand("gpr-fit", "Fit a GPR model to an n,alpha training CSV");
  f->add_option("--training", fit.training, "Training CSV")->required()->check(CLI::ExistingFile);
  f->add_option("--noise", fit.noise, "Observation noise sigma")->check(CLI::Range(1e-6, 1e-2));
  f->add_option("--restarts", fit.restarts, "Random optimizer starts");
  f->add_option("--seed", fit.seed, "Seed for the restarts");
  f->add_option("--retrain", fit.retrain, "Inputs to add as pseudo-observations, then refit")->delimiter(',');
  f->add_option("--out", fit.out, "Model JSON path");

  GprPredictArgs pred;
  auto* p = app.add_subcommand("gpr-predict", "Predict alpha with 95% intervals");
  p->add_option("--model", pred.model, "Model JSON")->required()->check(CLI::ExistingFile);
  p->add_option("--n", pred.n, "Comma-separated problem sizes")->delimiter(',');
  p->add_option("--out", pred.out, "CSV path");

  ReproduceArgs rep;
  auto* r = app.add_subcommand("reproduce", "Rerun a published table at desk scale");
  r->add_option("--table", rep.table, "t4.1, t4.2, sylvester or a4")->required();
  r->add_option("--max-n", rep.max_n, "Largest n to run (table default if 0)");
  r->add_option("--out", rep.out, "CSV path");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*g) return cmd_gen(common, gen);
    if (*s) return cmd_solve(common, solve);
    if (*t) return cmd_traverse(common, trav);
    if (*f) return cmd_gpr_fit(common, fit);
    if (*p) return cmd_gpr_predict(common, pred);
    if (*r) return cmd_reproduce(common, rep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gadi::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gadi::InvalidDimension& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gadi::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
