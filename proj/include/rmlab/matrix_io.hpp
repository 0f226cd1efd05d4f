#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rmlab/ensemble.hpp"
#include "rmlab/types.hpp"

namespace rmlab::io {

// Matrix file: header line "n m", then n*m lines "re im" in row-major order.
// Values are written with 17 significant digits, which round-trips doubles.
void write_matrix(std::ostream& out, const DenseComplexMatrix& m);
DenseComplexMatrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const DenseComplexMatrix& m);
DenseComplexMatrix load_matrix(const std::filesystem::path& path);

// Deformation file: JSON object {"u": [[[re, im], ...], ...], "v": [...]}, one
// inner array per rank-one term.
void write_deformation(std::ostream& out, const Deformation& defm);
Deformation read_deformation(std::istream& in);
void save_deformation(const std::filesystem::path& path, const Deformation& defm);
Deformation load_deformation(const std::filesystem::path& path);

// Spectrum file: one "re im" line per eigenvalue. Singular values: one per line.
void write_spectrum(std::ostream& out, const std::vector<cplx>& values);
std::vector<cplx> read_spectrum(std::istream& in);
void write_singular_values(std::ostream& out, const std::vector<double>& values);

}  // namespace rmlab::io
