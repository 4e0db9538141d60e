#pragma once

#include <string>

#include "asl/network.hpp"

namespace asl {

// Plain-text dense matrix format: a header line with n, then n rows of n
// whitespace-separated values, row-major.
void write_matrix_file(const std::string& path, const CombinationMatrix& m);
CombinationMatrix read_matrix_file(const std::string& path);

void write_adjacency_file(const std::string& path, const Adjacency& adj);
Adjacency read_adjacency_file(const std::string& path);

std::string format_matrix(const CombinationMatrix& m);
std::string format_adjacency(const Adjacency& adj);

// Vector files share the layout: header line with n, then n values.
void write_vector_file(const std::string& path, const std::vector<double>& v);
std::vector<double> read_vector_file(const std::string& path);

}  // namespace asl
