#pragma once

#include <string>

#include "alsq/types.hpp"

namespace alsq {

enum class MatrixFormat { Binary, Csv };

/// Binary layout: magic "ALSM", version byte 0x01, little-endian u64 n and d,
/// then n*d little-endian f64 entries in row-major order.
Matrix read_matrix(const std::string& path, MatrixFormat format);
void write_matrix(const std::string& path, const Matrix& a, MatrixFormat format);

Vector read_vector(const std::string& path, MatrixFormat format);
void write_vector(const std::string& path, const Vector& v, MatrixFormat format);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace alsq
