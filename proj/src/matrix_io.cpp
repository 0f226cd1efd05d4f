#include "rmlab/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace rmlab::io {

namespace {

std::string format_pair(double re, double im) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", re, im);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

void write_matrix(std::ostream& out, const DenseComplexMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << format_pair(m(i, j).real(), m(i, j).imag()) << '\n';
}

DenseComplexMatrix read_matrix(std::istream& in) {
  long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) throw ConfigError("matrix file: bad header");
  DenseComplexMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      if (!(in >> re >> im))
        throw ConfigError("matrix file: expected " + std::to_string(rows * cols) + " entries, truncated at " +
                          std::to_string(i * cols + j));
      m(i, j) = {re, im};
    }
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const DenseComplexMatrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
}

DenseComplexMatrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

namespace {

nlohmann::json vector_to_json(const ComplexVector& x) {
  auto arr = nlohmann::json::array();
  for (const auto& c : x) arr.push_back({c.real(), c.imag()});
  return arr;
}

ComplexVector vector_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ConfigError("deformation file: vector must be an array of [re, im] pairs");
  ComplexVector x(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& p = arr[i];
    if (!p.is_array() || p.size() != 2) throw ConfigError("deformation file: entries must be [re, im] pairs");
    x(static_cast<Eigen::Index>(i)) = {p[0].get<double>(), p[1].get<double>()};
  }
  return x;
}

}  // namespace

void write_deformation(std::ostream& out, const Deformation& defm) {
  nlohmann::json j;
  j["u"] = nlohmann::json::array();
  j["v"] = nlohmann::json::array();
  for (const auto& [u, v] : defm.pairs) {
    j["u"].push_back(vector_to_json(u));
    j["v"].push_back(vector_to_json(v));
  }
  out << j.dump(1) << '\n';
}

Deformation read_deformation(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("deformation file: ") + e.what());
  }
  if (!j.contains("u") || !j.contains("v") || !j["u"].is_array() || !j["v"].is_array())
    throw ConfigError("deformation file: expected arrays 'u' and 'v'");
  if (j["u"].size() != j["v"].size()) throw ConfigError("deformation file: 'u' and 'v' differ in length");
  Deformation d;
  for (std::size_t t = 0; t < j["u"].size(); ++t)
    d.pairs.emplace_back(vector_from_json(j["u"][t]), vector_from_json(j["v"][t]));
  d.validate();
  return d;
}

void save_deformation(const std::filesystem::path& path, const Deformation& defm) {
  auto out = open_out(path);
  write_deformation(out, defm);
}

Deformation load_deformation(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_deformation(in);
}

void write_spectrum(std::ostream& out, const std::vector<cplx>& values) {
  for (const auto& v : values) out << format_pair(v.real(), v.imag()) << '\n';
}

std::vector<cplx> read_spectrum(std::istream& in) {
  std::vector<cplx> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    if (!(ls >> re >> im)) throw ConfigError("spectrum file: malformed line '" + line + "'");
    values.emplace_back(re, im);
  }
  return values;
}

void write_singular_values(std::ostream& out, const std::vector<double>& values) {
  char buf[32];
  for (double s : values) {
    std::snprintf(buf, sizeof buf, "%.17g", s);
    out << buf << '\n';
  }
}

}  // namespace rmlab::io
