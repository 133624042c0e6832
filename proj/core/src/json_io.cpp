#include "gadi/json_io.hpp"

#include <fstream>

namespace gadi {

using nlohmann::json;

void to_json(json& j, const SolveReport& r) {
  j = json{{"method", r.method},
           {"alpha", r.alpha},
           {"omega", r.omega},
           {"iterations", r.iterations},
           {"termination", to_string(r.termination)},
           {"residual_history", r.residual_history},
           {"inner_cg_mean", r.inner_cg_mean},
           {"inner_cgne_mean", r.inner_cgne_mean},
           {"inner_cap_hits", r.inner_cap_hits},
           {"wall_time", r.wall_time}};
}

void to_json(json& j, const SylvesterReport& r) {
  j = json{{"method", "gadi-ab"},
           {"alpha", r.alpha},
           {"omega", r.omega},
           {"iterations", r.iterations},
           {"termination", to_string(r.termination)},
           {"residual_history", r.residual_history},
           {"wall_time", r.wall_time}};
}

void to_json(json& j, const SpectralSummary& s) {
  j = json{{"lambda_min", s.lambda_min}, {"lambda_max", s.lambda_max}, {"sigma_max", s.sigma_max},
           {"norm_A", s.norm_A}};
}

void from_json(const json& j, SpectralSummary& s) {
  j.at("lambda_min").get_to(s.lambda_min);
  j.at("lambda_max").get_to(s.lambda_max);
  j.at("sigma_max").get_to(s.sigma_max);
  j.at("norm_A").get_to(s.norm_A);
  s.validate();
}

void to_json(json& j, const GprModel& m) {
  j = json{{"kernel", "exponential"},   {"inputs", m.inputs()}, {"targets", m.targets()},
           {"iota", m.iota()},          {"sigma_f", m.sigma_f()}, {"noise", m.noise()},
           {"input_scale", m.input_scale()}, {"log_likelihood", m.log_likelihood()}};
}

void from_json(const json& j, GprModel& m) {
  if (j.value("kernel", std::string("exponential")) != "exponential")
    throw ParseError("unsupported kernel '" + j.at("kernel").get<std::string>() + "'");
  m = GprModel::build(j.at("inputs").get<std::vector<double>>(), j.at("targets").get<std::vector<double>>(),
                      j.at("iota").get<double>(), j.at("sigma_f").get<double>(), j.at("noise").get<double>(),
                      j.value("input_scale", 1.0));
}

void save_gpr_model(const std::filesystem::path& path, const GprModel& m) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << json(m).dump(2) << '\n';
}

GprModel load_gpr_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  try {
    return json::parse(is).get<GprModel>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

} // namespace gadi
