#pragma once

#include <filesystem>
#include <iosfwd>

#include "gadi/dense.hpp"
#include "gadi/sparse_matrix.hpp"

namespace gadi::mm {

// Coordinate format: "%%MatrixMarket matrix coordinate real general", 1-based
// indices, one entry per line in row-major order. Values are written in the
// shortest form that parses back to the same double.
void write(std::ostream& os, const SparseMatrix& A);
SparseMatrix read_sparse(std::istream& is);

// Array format: "%%MatrixMarket matrix array real general", column-major.
void write(std::ostream& os, const DenseMatrix& X);
DenseMatrix read_dense(std::istream& is);

void write_file(const std::filesystem::path& path, const SparseMatrix& A);
void write_file(const std::filesystem::path& path, const DenseMatrix& X);
SparseMatrix read_sparse_file(const std::filesystem::path& path);
DenseMatrix read_dense_file(const std::filesystem::path& path);

} // namespace gadi::mm
