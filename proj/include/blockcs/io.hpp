#ifndef BLOCKCS_IO_HPP
#define BLOCKCS_IO_HPP

#include "blockcs/block_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace blockcs::io {

/// Shortest decimal text that round-trips, '.' radix, locale independent.
/// Infinity prints as "inf".
std::string format_double(double v);

/// Parses a full decimal token; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

/// One value per line. Blank lines are skipped.
Vector read_vector(std::istream& in);
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::filesystem::path& path, const Vector& v);

/// Plain CSV, one matrix row per line, no header.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const Matrix& A);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& A);

}  // namespace blockcs::io

#endif  // BLOCKCS_IO_HPP
