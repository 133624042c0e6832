#include <random>
#include <sstream>

#include "convert.hpp"
#include "doctest.h"
#include "gadi/matrix_market.hpp"

using namespace gadi;

TEST_CASE("sparse round trip is bit exact") {
  std::mt19937_64 rng(21);
  auto a = oracle::random_sparse(13, 9, 0.3, rng);
  a[0][0] = 1.0 / 3.0;
  a[2][5] = 5e-310; // subnormal
  a[4][1] = -1.7976931348623157e308;
  const auto A = sparse_of(a);
  std::stringstream ss;
  mm::write(ss, A);
  CHECK(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  const auto B = mm::read_sparse(ss);
  CHECK(B == A);
}

TEST_CASE("explicit zeros survive the round trip") {
  const auto A = add(1.0, identity(3), -1.0, identity(3));
  std::stringstream ss;
  mm::write(ss, A);
  CHECK(mm::read_sparse(ss) == A);
}

TEST_CASE("dense round trip is bit exact") {
  DenseMatrix X(3, 2);
  X(0, 0) = 0.1;
  X(1, 0) = -2.0 / 7.0;
  X(2, 1) = 1e-300;
  std::stringstream ss;
  mm::write(ss, X);
  CHECK(mm::read_dense(ss) == X);
}

TEST_CASE("reader accepts comments and integer fields") {
  std::istringstream is("%%MatrixMarket matrix coordinate integer general\n% comment\n2 2 2\n1 1 3\n2 1 -4\n");
  const auto A = mm::read_sparse(is);
  CHECK(A.at(0, 0) == 3.0);
  CHECK(A.at(1, 0) == -4.0);
}

TEST_CASE("reader rejects malformed input") {
  std::istringstream bad_header("%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 1\n");
  CHECK_THROWS_AS(mm::read_sparse(bad_header), ParseError);
  std::istringstream out_of_range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  CHECK_THROWS_AS(mm::read_sparse(out_of_range), ParseError);
  std::istringstream truncated("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
  CHECK_THROWS_AS(mm::read_sparse(truncated), ParseError);
  std::istringstream garbage("%%MatrixMarket matrix array real general\n2 1\n1.0\nabc\n");
  CHECK_THROWS_AS(mm::read_dense(garbage), ParseError);
}
