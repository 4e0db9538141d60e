#include "asl/network.hpp"

#include <algorithm>
#include <cmath>

#include "asl/error.hpp"

namespace asl {
namespace {

// Reachability from `start` following edges in the given direction.
std::vector<std::uint8_t> reachable(const Adjacency& adj, int start,
                                    bool forward) {
  std::vector<std::uint8_t> seen(adj.n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < adj.n; ++v) {
      const bool edge = forward ? adj.at(u, v) : adj.at(v, u);
      if (edge && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

Adjacency Adjacency::empty(int n) {
  if (n < 1) raise(Errc::invalid_config, "agent count must be at least 1");
  Adjacency adj;
  adj.n = n;
  adj.edges.assign(static_cast<std::size_t>(n) * n, 0);
  return adj;
}

bool Adjacency::symmetric() const {
  for (int l = 0; l < n; ++l) {
    for (int k = l + 1; k < n; ++k) {
      if (at(l, k) != at(k, l)) return false;
    }
  }
  return true;
}

bool Adjacency::all_self_loops() const {
  for (int k = 0; k < n; ++k) {
    if (!at(k, k)) return false;
  }
  return true;
}

Adjacency complete_adjacency(int n) {
  Adjacency adj = Adjacency::empty(n);
  std::fill(adj.edges.begin(), adj.edges.end(), 1);
  return adj;
}

Adjacency star_adjacency(int n) {
  Adjacency adj = Adjacency::empty(n);
  for (int k = 0; k < n; ++k) {
    adj.set(k, k, true);
    adj.set(0, k, true);
    adj.set(k, 0, true);
  }
  return adj;
}

CombinationMatrix CombinationMatrix::zero(int n) {
  CombinationMatrix m;
  m.n = n;
  m.a.assign(static_cast<std::size_t>(n) * n, 0.0);
  return m;
}

void CombinationMatrix::validate(double tol) const {
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    for (int l = 0; l < n; ++l) {
      const double w = at(l, k);
      if (w < 0.0 || !std::isfinite(w)) {
        raise(Errc::invalid_config, "combination weights must be nonnegative");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol) {
      raise(Errc::invalid_config, "combination matrix is not left-stochastic");
    }
  }
}

bool CombinationMatrix::matches_support(const Adjacency& adj) const {
  if (adj.n != n) return false;
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      if ((at(l, k) > 0.0) != adj.at(l, k)) return false;
    }
  }
  return true;
}

Adjacency CombinationMatrix::support() const {
  Adjacency adj = Adjacency::empty(n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) adj.set(l, k, at(l, k) > 0.0);
  }
  return adj;
}

void PerronVector::validate(double tol) const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) raise(Errc::invalid_config, "Perron entries must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) {
    raise(Errc::invalid_config, "Perron vector must sum to 1");
  }
}

PerronVector uniform_pi(int n) {
  return PerronVector{std::vector<double>(n, 1.0 / n)};
}

bool check_strong_connectivity(const Adjacency& adj) {
  bool has_loop = false;
  for (int k = 0; k < adj.n; ++k) has_loop = has_loop || adj.self_loop(k);
  if (!has_loop) return false;
  const auto fwd = reachable(adj, 0, true);
  const auto bwd = reachable(adj, 0, false);
  for (int k = 0; k < adj.n; ++k) {
    if (!fwd[k] || !bwd[k]) return false;
  }
  return true;
}

PerronVector perron_eigenvector(const CombinationMatrix& A, double tol,
                                int max_iter) {
  A.validate(1e-9);
  if (!check_strong_connectivity(A.support())) {
    raise(Errc::not_primitive,
          "matrix support is not strongly connected with a self-loop");
  }
  const int n = A.n;
  std::vector<double> x(n, 1.0 / n);
  std::vector<double> next(n, 0.0);
  for (int iter = 0; iter < max_iter; ++iter) {
    double norm = 0.0;
    for (int l = 0; l < n; ++l) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += A.at(l, k) * x[k];
      next[l] = acc;
      norm += acc;
    }
    double residual = 0.0;
    for (int l = 0; l < n; ++l) {
      next[l] /= norm;
      residual = std::max(residual, std::abs(next[l] - x[l]));
    }
    x.swap(next);
    if (residual <= tol) {
      // Residual is measured against A x = x directly for the final word.
      double fixed_point_residual = 0.0;
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += A.at(l, k) * x[k];
        fixed_point_residual = std::max(fixed_point_residual, std::abs(acc - x[l]));
      }
      if (fixed_point_residual <= 10 * tol + 1e-15) {
        for (double w : x) {
          if (!(w > 0.0)) {
            raise(Errc::not_primitive, "eigenvector has a nonpositive entry");
          }
        }
        return PerronVector{x};
      }
    }
  }
  raise(Errc::non_convergence, "power iteration exceeded max_iter");
}

CombinationMatrix gen_left_stochastic(const Adjacency& adj, RandomStream& rng) {
  if (!check_strong_connectivity(adj)) {
    raise(Errc::topology_invalid, "adjacency is not strongly connected");
  }
  CombinationMatrix m = CombinationMatrix::zero(adj.n);
  for (int k = 0; k < adj.n; ++k) {
    double sum = 0.0;
    for (int l = 0; l < adj.n; ++l) {
      if (adj.at(l, k)) {
        m.at(l, k) = rng.uniform(0.1, 1.0);
        sum += m.at(l, k);
      }
    }
    for (int l = 0; l < adj.n; ++l) m.at(l, k) /= sum;
  }
  return m;
}

CombinationMatrix gen_doubly_stochastic(const Adjacency& adj, RandomStream& rng,
                                        double tol, int max_iter) {
  if (!check_strong_connectivity(adj)) {
    raise(Errc::topology_invalid, "adjacency is not strongly connected");
  }
  const int n = adj.n;
  CombinationMatrix m = CombinationMatrix::zero(n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      if (adj.at(l, k)) m.at(l, k) = rng.uniform(0.1, 1.0);
    }
  }
  auto max_deviation = [&]() {
    double dev = 0.0;
    for (int l = 0; l < n; ++l) {
      double row = 0.0, col = 0.0;
      for (int k = 0; k < n; ++k) {
        row += m.at(l, k);
        col += m.at(k, l);
      }
      dev = std::max({dev, std::abs(row - 1.0), std::abs(col - 1.0)});
    }
    return dev;
  };
  int iter = 0;
  // Aim a decade below tol so the exact column pass at the end keeps row sums
  // inside tol.
  while (max_deviation() > 0.1 * tol) {
    if (iter++ >= max_iter) {
      raise(Errc::non_convergence,
            "row/column normalization did not converge for this support");
    }
    for (int l = 0; l < n; ++l) {
      double row = 0.0;
      for (int k = 0; k < n; ++k) row += m.at(l, k);
      for (int k = 0; k < n; ++k) m.at(l, k) /= row;
    }
    for (int k = 0; k < n; ++k) {
      double col = 0.0;
      for (int l = 0; l < n; ++l) col += m.at(l, k);
      for (int l = 0; l < n; ++l) m.at(l, k) /= col;
    }
  }
  for (int k = 0; k < n; ++k) {
    double col = 0.0;
    for (int l = 0; l < n; ++l) col += m.at(l, k);
    for (int l = 0; l < n; ++l) m.at(l, k) /= col;
  }
  return m;
}

CombinationMatrix uniform_averaging(const Adjacency& adj) {
  if (!check_strong_connectivity(adj)) {
    raise(Errc::topology_invalid, "adjacency is not strongly connected");
  }
  CombinationMatrix m = CombinationMatrix::zero(adj.n);
  for (int k = 0; k < adj.n; ++k) {
    int degree = 0;
    for (int l = 0; l < adj.n; ++l) degree += adj.at(l, k) ? 1 : 0;
    for (int l = 0; l < adj.n; ++l) {
      if (adj.at(l, k)) m.at(l, k) = 1.0 / degree;
    }
  }
  return m;
}

CombinationMatrix matrix_from_eigenvector(const Adjacency& adj,
                                          const PerronVector& pi) {
  if (pi.size() != adj.n) raise(Errc::invalid_config, "dimension mismatch");
  if (!adj.symmetric()) {
    raise(Errc::invalid_config, "eigenvector synthesis needs an undirected topology");
  }
  if (!adj.all_self_loops()) {
    raise(Errc::invalid_config, "eigenvector synthesis needs all self-loops");
  }
  pi.validate(1e-9);
  CombinationMatrix m = CombinationMatrix::zero(adj.n);
  std::string offending;
  for (int k = 0; k < adj.n; ++k) {
    double off_diagonal = 0.0;
    for (int l = 0; l < adj.n; ++l) {
      if (l != k && adj.at(l, k)) {
        m.at(l, k) = pi[l];
        off_diagonal += pi[l];
      }
    }
    const double diagonal = 1.0 - off_diagonal;
    if (diagonal <= 0.0) {
      if (!offending.empty()) offending += ", ";
      offending += std::to_string(k + 1);
    }
    m.at(k, k) = diagonal;
  }
  if (!offending.empty()) {
    raise(Errc::eigenvector_incompatible,
          "eigenvector too concentrated; nonpositive diagonal at agents " +
              offending);
  }
  return m;
}

Adjacency gen_erdos_renyi(int n, double p, RandomStream& rng) {
  if (!(p > 0.0) || p > 1.0) {
    raise(Errc::invalid_config, "edge probability must be in (0, 1]");
  }
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Adjacency adj = Adjacency::empty(n);
    for (int k = 0; k < n; ++k) adj.set(k, k, true);
    for (int l = 0; l < n; ++l) {
      for (int k = l + 1; k < n; ++k) {
        if (rng.uniform01() < p) {
          adj.set(l, k, true);
          adj.set(k, l, true);
        }
      }
    }
    if (check_strong_connectivity(adj)) return adj;
  }
  raise(Errc::topology_invalid,
        "no strongly connected draw within the retry budget");
}

}  // namespace asl
