#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "graphon/types.hpp"

namespace graphon::io {

// Dense CSV: one matrix row per line, comma separated, 17 significant digits.
void write_csv(std::ostream& out, const Matrix& m);
Matrix read_csv(std::istream& in);

// Binary: magic "GRL1", little-endian u32 n, then n*n little-endian f64 in
// row-major order.
void write_binary(std::ostream& out, const Matrix& m);
Matrix read_binary(std::istream& in);

// Edge list: one "i j" line per undirected edge (i < j, 1-based).
void write_edge_list(std::ostream& out, const Adjacency& a);
/// When n is absent it is the largest index seen. Self-loops are rejected.
Adjacency read_edge_list(std::istream& in, std::optional<Index> n = std::nullopt);

enum class MatrixFormat { Csv, Binary, EdgeList };

/// From the extension: .csv, .grl/.bin, .edges/.txt.
MatrixFormat format_from_path(const std::filesystem::path& path);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
/// Dense formats only.
Matrix load_matrix(const std::filesystem::path& path);

void save_adjacency(const std::filesystem::path& path, const Adjacency& a);
Adjacency load_adjacency(const std::filesystem::path& path, std::optional<Index> n = std::nullopt);

}  // namespace graphon::io
