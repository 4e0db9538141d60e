#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "asl/design.hpp"
#include "asl/models.hpp"
#include "asl/network.hpp"
#include "asl/simulate.hpp"

namespace asl {

// A single config file fully specifies an experiment: hypotheses, agents,
// topology, combination policy, numeric tolerances, and simulation protocol.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  HypothesisSet hypotheses;
  std::vector<AgentModel> agents;

  enum class NetworkType { none, erdos_renyi, complete, star, file };
  NetworkType network_type = NetworkType::none;
  int network_n = 0;
  double edge_probability = 0.5;
  std::string adjacency_path;

  enum class CombinationType {
    none,
    left_stochastic,
    doubly_stochastic,
    uniform_averaging,
    from_eigenvector,
    file,
  };
  CombinationType combination_type = CombinationType::none;
  double sinkhorn_tol = 1e-10;
  int sinkhorn_max_iter = 10000;
  std::vector<double> eigenvector;  // from_eigenvector with explicit pi
  bool eigenvector_from_design = false;
  std::string matrix_path;

  LmgfOptions lmgf;
  ExponentOptions exponent;
  DesignOptions design;
  double local_truth_tol = 1e-9;

  std::vector<double> delta_grid;
  int replications = 1000;
  int horizon = 1000;
  std::vector<double> omega;
  std::vector<TruthChange> schedule = {{0, 0}};
  std::vector<std::vector<double>> initial_lambda;  // empty = uniform
  int threads = 0;
  bool emit_plots = false;
  bool emit_trajectory = false;
};

// Parses and validates the JSON text. Unknown keys are rejected; parse errors
// carry 1-based line numbers.
ExperimentConfig parse_experiment(const std::string& text);
ExperimentConfig load_experiment_file(const std::string& path);

// Canonical serialized form: defaults materialized, keys sorted.
nlohmann::json canonical_config(const ExperimentConfig& cfg);

struct BuiltNetwork {
  Adjacency adjacency;
  CombinationMatrix matrix;
  PerronVector pi;
};

// Deterministically builds the adjacency and combination matrix from the
// config (and, for the designed eigenvector, from the agent models).
BuiltNetwork build_network(const ExperimentConfig& cfg);

struct PiSource {
  enum class Kind { matrix, design, uniform, file };
  Kind kind = Kind::matrix;
  std::string path;  // file kind
};

nlohmann::json run_classify(const ExperimentConfig& cfg);
nlohmann::json run_exponent(const ExperimentConfig& cfg, const PiSource& source);
nlohmann::json run_design(const ExperimentConfig& cfg, bool emit_matrix);

// Runs the delta grid, writes CSV curves (and optional SVG plots and a
// trajectory dump) into output_dir, and returns the JSON summary.
nlohmann::json run_simulate(const ExperimentConfig& cfg);

// Writes the adjacency and seeded combination matrices to output_dir.
nlohmann::json run_graph_gen(const ExperimentConfig& cfg, int num_left,
                             int num_doubly, bool uniform);

std::string hypothesis_label(int theta);  // 0-based index -> "theta_1"

}  // namespace asl
