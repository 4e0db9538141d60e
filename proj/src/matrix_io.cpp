#include "asl/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "asl/error.hpp"

namespace asl {
namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(Errc::invalid_config, "cannot open " + path + " for writing");
  out << text;
  if (!out) raise(Errc::invalid_config, "failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::invalid_config, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<double> parse_values(const std::string& text, int& n) {
  std::istringstream in(text);
  if (!(in >> n) || n < 1) {
    raise(Errc::invalid_config, "matrix file must start with the dimension n");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * n);
  double v;
  while (in >> v) values.push_back(v);
  if (values.size() != static_cast<std::size_t>(n) * n) {
    raise(Errc::invalid_config, "matrix file does not hold n*n values");
  }
  return values;
}

}  // namespace

std::string format_matrix(const CombinationMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  out << m.n << "\n";
  for (int l = 0; l < m.n; ++l) {
    for (int k = 0; k < m.n; ++k) {
      out << m.at(l, k) << (k + 1 == m.n ? "\n" : " ");
    }
  }
  return out.str();
}

std::string format_adjacency(const Adjacency& adj) {
  std::ostringstream out;
  out << adj.n << "\n";
  for (int l = 0; l < adj.n; ++l) {
    for (int k = 0; k < adj.n; ++k) {
      out << (adj.at(l, k) ? 1 : 0) << (k + 1 == adj.n ? "\n" : " ");
    }
  }
  return out.str();
}

void write_matrix_file(const std::string& path, const CombinationMatrix& m) {
  write_text(path, format_matrix(m));
}

CombinationMatrix read_matrix_file(const std::string& path) {
  int n = 0;
  std::vector<double> values = parse_values(read_text(path), n);
  CombinationMatrix m = CombinationMatrix::zero(n);
  m.a = std::move(values);
  m.validate(1e-9);
  return m;
}

void write_adjacency_file(const std::string& path, const Adjacency& adj) {
  write_text(path, format_adjacency(adj));
}

void write_vector_file(const std::string& path, const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  out << v.size() << "\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << v[i] << (i + 1 == v.size() ? "\n" : " ");
  }
  write_text(path, out.str());
}

std::vector<double> read_vector_file(const std::string& path) {
  std::istringstream in(read_text(path));
  int n = 0;
  if (!(in >> n) || n < 1) {
    raise(Errc::invalid_config, "vector file must start with the dimension n");
  }
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (values.size() != static_cast<std::size_t>(n)) {
    raise(Errc::invalid_config, "vector file does not hold n values");
  }
  return values;
}

Adjacency read_adjacency_file(const std::string& path) {
  int n = 0;
  std::vector<double> values = parse_values(read_text(path), n);
  Adjacency adj = Adjacency::empty(n);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0 && values[i] != 1.0) {
      raise(Errc::invalid_config, "adjacency entries must be 0 or 1");
    }
    adj.edges[i] = values[i] != 0.0 ? 1 : 0;
  }
  return adj;
}

}  // namespace asl
