#pragma once

#include <cstdint>
#include <vector>

#include "asl/models.hpp"
#include "asl/network.hpp"

namespace asl {

struct TruthChange {
  int step = 0;
  int truth = 0;  // 0-based hypothesis index
};

struct SimulationConfig {
  double delta = 0.01;
  int horizon = 1000;
  int replications = 1;
  std::uint64_t seed = 0;
  std::vector<TruthChange> schedule = {{0, 0}};
  // Empty means uniform initial beliefs (all log-ratios zero); otherwise one
  // row per agent with H-1 entries.
  std::vector<std::vector<double>> initial_lambda;
  int threads = 0;  // 0 = hardware concurrency
  bool collect_terminal_lambda = false;
  int record_stride = 0;  // 0 = every step up to 5000, then horizon/5000
};

void validate_config(const SimulationConfig& cfg, int num_agents,
                     int num_hypotheses);

// Log-belief ratios lambda[agent][theta-1], referenced to hypothesis 0.
struct BeliefState {
  std::vector<std::vector<double>> lambda;

  static BeliefState uniform(int num_agents, int num_hypotheses);
  // Belief simplex per agent, derived from the log-ratios.
  std::vector<std::vector<double>> beliefs() const;
};

// One step of the log-ratio recursion: adapt with the new signals, then
// combine along the columns of A. delta = 0 leaves the state unchanged.
BeliefState asl_step(const BeliefState& state,
                     const std::vector<double>& signals,
                     const std::vector<AgentModel>& agents,
                     const CombinationMatrix& A, double delta);

// Same step on the belief simplex directly; used to cross-check the two
// representations.
std::vector<std::vector<double>> asl_step_beliefs(
    const std::vector<std::vector<double>>& beliefs,
    const std::vector<double>& signals, const std::vector<AgentModel>& agents,
    const CombinationMatrix& A, double delta);

struct ReplicationTrajectory {
  std::vector<int> steps;  // 1..horizon
  // lambda[step_index][agent][theta-1]
  std::vector<std::vector<std::vector<double>>> lambda;
  std::vector<std::vector<int>> decision;       // argmax belief, ties to lowest
  std::vector<std::vector<std::uint8_t>> error; // vs the scheduled truth
};

// Single replication with full per-step output. Deterministic in
// (cfg.seed, replication_index).
ReplicationTrajectory run_replication(const std::vector<AgentModel>& agents,
                                      const CombinationMatrix& A,
                                      const SimulationConfig& cfg,
                                      int replication_index);

struct ErrorCurve {
  std::vector<int> steps;                   // recorded steps, starting at 0
  std::vector<std::vector<double>> p_agent; // [recorded][agent]
  std::vector<double> p_ave;                // network average per recorded step
  int replications = 0;

  // Present when collect_terminal_lambda was set: [agent][theta-1]
  std::vector<std::vector<double>> terminal_lambda_mean;
  std::vector<std::vector<double>> terminal_lambda_stddev;

  static double standard_error(double p, int replications);
  const std::vector<double>& terminal_p_agent() const { return p_agent.back(); }
  double terminal_p_ave() const { return p_ave.back(); }
};

// Monte Carlo estimate of the per-agent instantaneous error probability.
// Replications run in parallel; results are independent of the thread count.
ErrorCurve estimate_error_prob(const std::vector<AgentModel>& agents,
                               const CombinationMatrix& A,
                               const SimulationConfig& cfg);

struct SteadyStateResult {
  std::vector<double> p_agent;
  double p_ave = 0.0;
  bool horizon_warning = false;  // (1-delta)^horizon >= 1e-3
  ErrorCurve curve;
};

SteadyStateResult steady_state_error(const std::vector<AgentModel>& agents,
                                     const CombinationMatrix& A,
                                     const SimulationConfig& cfg);

// log(1 - sqrt(1 - omega)) / log(1 - delta); omega in (0, 1], delta in (0, 1).
double adaptation_time_theory(double omega, double delta);

// Smallest recorded step i0 with p_ave,i <= p_ave^(1-omega) for all recorded
// i >= i0. The steady-state probability defaults to the curve's terminal
// value; pass an explicit estimate (for instance from a longer run) to
// override. Throws not_reached when the tail never satisfies the condition.
int adaptation_time_simulated(const ErrorCurve& curve, double omega,
                              double steady_state_p = -1.0);

// [1 - (1-delta)^i]^2
double eta(double delta, int i);

}  // namespace asl
