#pragma once

// Shared model configurations used across the test suites.

#include <vector>

#include "asl/models.hpp"

namespace asl::testing {

// Four Gaussian agents with a mismatched signal model and two hypotheses.
// All signals are N(0,1) while the reference likelihood is N(0.1,1); the
// second-hypothesis likelihoods differ per agent so the classification
// exercises all three agent classes.
inline std::vector<AgentModel> mismatched_gaussian_agents() {
  auto gaussian = [](double mean) { return DistributionModel::gaussian(mean, 1.0); };
  std::vector<AgentModel> agents(4);
  const double alt_means[4] = {-0.1, 0.2, 0.0, 0.1};
  for (int k = 0; k < 4; ++k) {
    agents[k].signal = gaussian(0.0);
    agents[k].likelihoods = {gaussian(0.1), gaussian(alt_means[k])};
  }
  return agents;
}

// Ten noisy shift-in-mean Gaussian agents in three groups: per-group means
// for the three hypotheses, likelihood variance, and noise level
// (noise_variance = level * variance).
inline std::vector<AgentModel> noisy_gaussian_agents() {
  struct Group {
    double m1, m2, m3, variance, noise_level;
    int count;
  };
  const Group groups[3] = {
      {0.0, 0.1, 0.1, 1.0, 1.0, 3},
      {0.2, 0.0, 0.2, 2.0, 0.1, 3},
      {0.3, 0.3, 0.0, 3.0, 3.3e-3, 4},
  };
  std::vector<AgentModel> agents;
  for (const Group& g : groups) {
    AgentModel agent;
    agent.likelihoods = {DistributionModel::gaussian(g.m1, g.variance),
                         DistributionModel::gaussian(g.m2, g.variance),
                         DistributionModel::gaussian(g.m3, g.variance)};
    agent.signal = agent.likelihoods[0];
    agent.noise_variance = g.noise_level * g.variance;
    for (int c = 0; c < g.count; ++c) agents.push_back(agent);
  }
  return agents;
}

// Accurate-model Laplace network: unit scale, likelihood locations 0, 0.1,
// 0.2, signal equal to the reference likelihood.
inline std::vector<AgentModel> laplace_accurate_agents(int n = 10) {
  AgentModel agent;
  agent.likelihoods = {DistributionModel::laplace(0.0, 1.0),
                       DistributionModel::laplace(0.1, 1.0),
                       DistributionModel::laplace(0.2, 1.0)};
  agent.signal = agent.likelihoods[0];
  return std::vector<AgentModel>(n, agent);
}

// Single agent over a two-symbol alphabet with a mismatched signal pmf.
inline AgentModel binary_pmf_agent() {
  AgentModel agent;
  agent.signal = DistributionModel::finite_pmf({0.55, 0.45});
  agent.likelihoods = {DistributionModel::finite_pmf({0.6, 0.4}),
                       DistributionModel::finite_pmf({0.3, 0.7})};
  return agent;
}

}  // namespace asl::testing
