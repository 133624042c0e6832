#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("gadi_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Run gadi(const std::string& args, const std::string& env = "") {
  const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = "cd '" + scratch().string() + "' && " + env + " '" GADI_CLI_PATH "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

} // namespace

TEST_CASE("help and usage") {
  CHECK(gadi("--help").code == 0);
  CHECK(gadi("").code == 2);
  CHECK(gadi("solve --family convdiff3d --n 4").code == 2);
}

TEST_CASE("gen writes matrices and metadata deterministically") {
  REQUIRE(gadi("gen --family convdiff3d --n 8 --out g1").code == 0);
  const auto meta = read_json(scratch() / "g1" / "meta.json");
  CHECK(meta.at("rows") == 512);
  CHECK(meta.at("cols") == 512);
  CHECK(slurp(scratch() / "g1" / "A.mtx").find("512 512 3200") != std::string::npos);
  REQUIRE(gadi("gen --family convdiff3d --n 8 --out g2").code == 0);
  for (const char* f : {"A.mtx", "b.mtx", "x_exact.mtx", "meta.json"})
    CHECK(slurp(scratch() / "g1" / f) == slurp(scratch() / "g2" / f));

  REQUIRE(gadi("gen --family sylvester --n 16 --r 0.01 --out s").code == 0);
  for (const char* f : {"A.mtx", "B.mtx", "C.mtx"}) CHECK(fs::exists(scratch() / "s" / f));
  CHECK(gadi("gen --family heat --n 4").code == 2);
  CHECK(gadi("gen --family convdiff3d --n 1").code == 2);
}

TEST_CASE("solve reports") {
  auto r = gadi("solve --method hss --family convdiff3d --n 8 --alpha 0");
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha must be positive") != std::string::npos);

  r = gadi("solve --method gadi-ab --family sylvester --n 16 --r 1 --alpha 1.87 --omega 0 --out ab.json");
  REQUIRE(r.code == 0);
  auto j = read_json(scratch() / "ab.json");
  const int it = j.at("report").at("iterations");
  CHECK(std::abs(it - 8) <= 2);
  CHECK(j.at("parameters").at("source") == "explicit");

  r = gadi("solve --method hss --family convdiff3d --n 8 --param-source theory --out hss.json");
  REQUIRE(r.code == 0);
  j = read_json(scratch() / "hss.json");
  CHECK(std::abs(j.at("parameters").at("alpha").get<double>() - 2.0521) <= 1e-3);
  CHECK(j.at("parameters").contains("spectrum"));
  CHECK(j.at("report").at("residual_history").size() == j.at("report").at("iterations").get<std::size_t>() + 1);

  CHECK(gadi("solve --method hss --family convdiff3d --n 8 --param-source theory --alpha 1").code == 2);
  CHECK(gadi("solve --method gadi-hs --family convdiff3d --n 8 --alpha 1").code == 2); // omega missing
  CHECK(gadi("solve --method hss --family convdiff3d --n 8 --alpha 1 --omega 1").code == 2);
  CHECK(gadi("solve --method gadi-ab --family convdiff3d --n 4 --alpha 1 --omega 0").code == 2);
  CHECK(gadi("solve --method gadi-ab --family sylvester --n 8 --r 1 --param-source theory").code == 2);
  CHECK(gadi("solve --method hss --family convdiff3d --n 8 --alpha 0.001 --max-iter 5").code == 1);
}

TEST_CASE("solve from Matrix Market files") {
  REQUIRE(gadi("gen --family convdiff3d --n 4 --out f").code == 0);
  const auto r = gadi("solve --method drs --matrix f/A.mtx --rhs f/b.mtx --alpha 1.5 --out f.json");
  REQUIRE(r.code == 0);
  CHECK(read_json(scratch() / "f.json").at("parameters").at("omega") == 1.0);
}

TEST_CASE("config files") {
  {
    std::ofstream os(scratch() / "c.json");
    os << R"({"method": "hss", "family": "convdiff3d", "n": 4, "alpha": 2.0, "max_iter": 300})";
  }
  REQUIRE(gadi("solve --config c.json --alpha 1.25 --out c_out.json").code == 0);
  const auto j = read_json(scratch() / "c_out.json");
  CHECK(j.at("parameters").at("alpha") == 1.25);
  CHECK(j.at("settings").at("max_iter") == 300);
  {
    std::ofstream os(scratch() / "bad.json");
    os << R"({"method": "hss", "colour": "red"})";
  }
  const auto r = gadi("solve --config bad.json");
  CHECK(r.code == 2);
  CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch() / "envout";
  REQUIRE(gadi("solve --method hss --family convdiff3d --n 4 --alpha 1", "GADI_OUTPUT_DIR='" + dir.string() + "'").code == 0);
  CHECK(fs::exists(dir / "solve_hss.json"));
}

TEST_CASE("traverse writes a grid") {
  REQUIRE(gadi("traverse --method gadi-hs --family convdiff3d --n 4 --alpha-grid 0.2 2 0.2 --omega 1 --out t.csv").code == 0);
  const auto csv = slurp(scratch() / "t.csv");
  CHECK(csv.rfind("alpha,omega,it,converged\n", 0) == 0);
  CHECK(count_lines(csv) == 11);
  const auto j = read_json(scratch() / "t.json");
  CHECK(j.at("best").at("it").get<int>() > 0);
}

TEST_CASE("gpr fit and predict") {
  {
    std::ofstream os(scratch() / "train.csv");
    os << "n,alpha\n2,1.01\n4,0.55\n6,0.33\n8,0.24\n10,0.18\n";
  }
  REQUIRE(gadi("gpr-fit --training train.csv --out m.json").code == 0);
  REQUIRE(gadi("gpr-predict --model m.json --n 4,8 --out p.csv").code == 0);
  std::istringstream is(slurp(scratch() / "p.csv"));
  std::string line;
  std::getline(is, line);
  CHECK(line == "n,mean,ci_low,ci_high");
  for (double target : {0.55, 0.24}) {
    REQUIRE(std::getline(is, line));
    const double mean = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(mean - target) <= 1e-2 * target);
  }
  REQUIRE(gadi("gpr-predict --model m.json --out empty.csv").code == 0);
  CHECK(slurp(scratch() / "empty.csv") == "n,mean,ci_low,ci_high\n");
  CHECK(gadi("gpr-fit --training train.csv --noise 1").code == 2);
  REQUIRE(gadi("solve --method gadi-hs --family convdiff3d --n 8 --model m.json --omega 1 --out g.json").code == 0);
  CHECK(read_json(scratch() / "g.json").at("parameters").at("source") == "gpr");
}

TEST_CASE("reproduce") {
  auto r = gadi("reproduce --table t4.7");
  CHECK(r.code == 2);
  CHECK(r.err.find("t4.1, t4.2, sylvester, a4") != std::string::npos);

  REQUIRE(gadi("reproduce --table t4.1 --max-n 12 --out t41.csv").code == 0);
  const auto csv = slurp(scratch() / "t41.csv");
  for (const char* row : {"t4.1,8,0,hss,theory", "t4.1,8,0,gadi-hs,", "t4.1,12,0,hss,theory", "t4.1,12,0,gadi-hs,"})
    CHECK(csv.find(row) != std::string::npos);
  CHECK(csv.find("t4.1,16,") == std::string::npos);
  fs::remove_all(scratch());
}
