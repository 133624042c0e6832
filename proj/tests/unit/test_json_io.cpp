#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gadi/json_io.hpp"
#include "gadi/problems.hpp"

using namespace gadi;

TEST_CASE("solve report serializes its fields") {
  const auto p = conv_diff_3d(3);
  GadiConfig c;
  c.alpha = 2.0;
  const auto r = gadi_hs_solve(p.A, p.b, c);
  const nlohmann::json j = r;
  CHECK(j.at("method") == "gadi-hs");
  CHECK(j.at("iterations") == r.iterations);
  CHECK(j.at("termination") == "converged");
  CHECK(j.at("residual_history").size() == r.iterations + 1);
  CHECK(j.at("residual_history").back().get<double>() == r.residual_history.back());
}

TEST_CASE("sylvester report") {
  const auto p = sylvester_family(6, 0.1);
  const nlohmann::json j = gadi_ab_solve(p.A, p.B, p.C, 1.0, 0.0);
  CHECK(j.at("method") == "gadi-ab");
  CHECK(j.at("alpha") == 1.0);
}

TEST_CASE("spectral summary round trip") {
  const SpectralSummary s{0.1 + 0.2, 11.638156, 0.3132, 11.64};
  const nlohmann::json j = s;
  CHECK(nlohmann::json::parse(j.dump()).get<SpectralSummary>() == s);
  nlohmann::json bad = j;
  bad["lambda_min"] = -1.0;
  CHECK_THROWS_AS(bad.get<SpectralSummary>(), InvalidArgument);
}

TEST_CASE("GPR model reload reproduces predictions") {
  const std::vector<double> x{2, 4, 6, 8, 10}, y{1.01, 0.55, 0.33, 0.24, 0.18};
  const auto m = gpr_fit(x, y);
  const auto path = std::filesystem::temp_directory_path() / "gadi_gpr_model_test.json";
  save_gpr_model(path, m);
  const auto back = load_gpr_model(path);
  CHECK(back.iota() == m.iota());
  CHECK(back.sigma_f() == m.sigma_f());
  CHECK(back.input_scale() == m.input_scale());
  for (double xs : {1.0, 3.0, 5.5, 10.0, 14.0, 24.0}) {
    const auto a = m.predict(xs), b = back.predict(xs);
    CHECK(std::abs(a.mean - b.mean) <= 1e-12);
    CHECK(std::abs(a.variance - b.variance) <= 1e-12);
  }
  {
    std::ofstream os(path);
    os << "{\"inputs\": [1, 2], \"targets\": [1]}";
  }
  CHECK_THROWS_AS(load_gpr_model(path), Error);
  {
    std::ofstream os(path);
    os << "not json";
  }
  CHECK_THROWS_AS(load_gpr_model(path), ParseError);
  std::filesystem::remove(path);
}
