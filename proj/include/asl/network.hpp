#pragma once

#include <cstdint>
#include <vector>

#include "asl/rng.hpp"

namespace asl {

// Directed adjacency; entry (l, k) true iff agent l may send to agent k.
// Self-loops sit on the diagonal.
struct Adjacency {
  int n = 0;
  std::vector<std::uint8_t> edges;  // row-major, edges[l * n + k]

  static Adjacency empty(int n);
  bool at(int l, int k) const { return edges[static_cast<std::size_t>(l) * n + k] != 0; }
  void set(int l, int k, bool value) {
    edges[static_cast<std::size_t>(l) * n + k] = value ? 1 : 0;
  }
  bool self_loop(int k) const { return at(k, k); }
  bool symmetric() const;
  bool all_self_loops() const;
};

Adjacency complete_adjacency(int n);
Adjacency star_adjacency(int n);  // hub is agent 0; all self-loops

// Left-stochastic combination weights, a[l][k] = weight agent k puts on l.
struct CombinationMatrix {
  int n = 0;
  std::vector<double> a;  // row-major

  static CombinationMatrix zero(int n);
  double at(int l, int k) const { return a[static_cast<std::size_t>(l) * n + k]; }
  double& at(int l, int k) { return a[static_cast<std::size_t>(l) * n + k]; }

  // Column sums within tol of one, nonnegative entries. Throws invalid_config.
  void validate(double tol = 1e-12) const;
  // True where a[l][k] > 0 exactly matches the adjacency (and positive on all
  // allowed entries).
  bool matches_support(const Adjacency& adj) const;
  Adjacency support() const;
};

struct PerronVector {
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
  double operator[](int k) const { return weights[k]; }
  void validate(double tol = 1e-12) const;  // positive, sums to one
};

PerronVector uniform_pi(int n);

// Strong connectivity plus at least one self-loop (primitivity of any
// conforming combination matrix).
bool check_strong_connectivity(const Adjacency& adj);

// Power iteration for A pi = pi, normalized to sum one. Throws not_primitive
// when the support fails the connectivity requirement and non_convergence
// when max_iter is exhausted.
PerronVector perron_eigenvector(const CombinationMatrix& A, double tol = 1e-12,
                                int max_iter = 100000);

// Random left-stochastic matrix conforming to the adjacency: uniform (0.1, 1)
// weights on allowed entries, column-normalized.
CombinationMatrix gen_left_stochastic(const Adjacency& adj, RandomStream& rng);

// Sinkhorn-style alternating row/column normalization until every row and
// column sum is within tol of one.
CombinationMatrix gen_doubly_stochastic(const Adjacency& adj, RandomStream& rng,
                                        double tol = 1e-10, int max_iter = 10000);

// Column-k weights 1/|N_k| on each in-neighbor.
CombinationMatrix uniform_averaging(const Adjacency& adj);

// Combination policy with a prescribed Perron eigenvector on an undirected
// topology with all self-loops: off-diagonal column entries pi_l, diagonal
// takes the remainder. Throws eigenvector_incompatible if a diagonal entry
// would be nonpositive.
CombinationMatrix matrix_from_eigenvector(const Adjacency& adj,
                                          const PerronVector& pi);

// Symmetric Erdos-Renyi adjacency with all self-loops; redraws until strongly
// connected (at most 100 attempts).
Adjacency gen_erdos_renyi(int n, double p, RandomStream& rng);

}  // namespace asl
