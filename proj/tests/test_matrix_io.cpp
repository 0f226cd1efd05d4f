#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "rmlab/matrix_io.hpp"

using namespace rmlab;

TEST_CASE("matrix files round-trip exactly") {
  const auto x = sample_iid_matrix(EnsembleConfig{7, 3, EntryLaw::make(LawFamily::ComplexCircularGaussian), 4});
  std::stringstream ss;
  io::write_matrix(ss, x);
  CHECK(io::read_matrix(ss) == x);

  const auto path = std::filesystem::temp_directory_path() / "rmlab_io_test.txt";
  io::save_matrix(path, x);
  CHECK(io::load_matrix(path) == x);
  std::filesystem::remove(path);
}

TEST_CASE("matrix file header and layout") {
  DenseComplexMatrix m(1, 2);
  m << cplx(1.5, -2.0), cplx(0.1, 0.0);
  std::stringstream ss;
  io::write_matrix(ss, m);
  CHECK(ss.str() == "1 2\n1.5 -2\n0.10000000000000001 0\n");
}

TEST_CASE("malformed matrix files") {
  std::istringstream bad_header("x y\n");
  CHECK_THROWS_AS(io::read_matrix(bad_header), ConfigError);
  std::istringstream truncated("2 2\n1 0\n2 0\n3 0\n");
  CHECK_THROWS_AS(io::read_matrix(truncated), ConfigError);
  CHECK_THROWS_AS(io::load_matrix("/nonexistent/matrix.txt"), ConfigError);
}

TEST_CASE("deformation files round-trip exactly") {
  const auto d = spiked_deformation(6, {2.0, {1.5, 0.8}}, 9);
  std::stringstream ss;
  io::write_deformation(ss, d);
  const auto back = io::read_deformation(ss);
  REQUIRE(back.rank() == 2);
  for (std::size_t t = 0; t < 2; ++t) {
    CHECK(back.pairs[t].first == d.pairs[t].first);
    CHECK(back.pairs[t].second == d.pairs[t].second);
  }
}

TEST_CASE("malformed deformation files") {
  std::istringstream not_json("{u:");
  CHECK_THROWS_AS(io::read_deformation(not_json), ConfigError);
  std::istringstream mismatch(R"({"u": [[[1,0]]], "v": []})");
  CHECK_THROWS_AS(io::read_deformation(mismatch), ConfigError);
  std::istringstream lengths(R"({"u": [[[1,0],[0,0]]], "v": [[[1,0]]]})");
  CHECK_THROWS_AS(io::read_deformation(lengths), ConfigError);
}

TEST_CASE("spectrum files") {
  const std::vector<cplx> values{{1, 2}, {-0.5, 0}, {3e-300, -1e300}};
  std::stringstream ss;
  io::write_spectrum(ss, values);
  CHECK(io::read_spectrum(ss) == values);
  std::istringstream bad("1 2\nfoo\n");
  CHECK_THROWS_AS(io::read_spectrum(bad), ConfigError);
}
