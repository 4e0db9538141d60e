#pragma once

#include <utility>
#include <vector>

#include "asl/rng.hpp"

namespace asl {

// Tagged distribution family. For the discrete family, observations are the
// symbol indices 0..K-1 carried as doubles.
class DistributionModel {
 public:
  enum class Family { gaussian, laplace, finite_pmf };

  DistributionModel() = default;  // standard normal

  static DistributionModel gaussian(double mean, double variance);
  static DistributionModel laplace(double location, double scale);
  static DistributionModel finite_pmf(std::vector<double> probabilities);

  Family family() const { return family_; }
  bool discrete() const { return family_ == Family::finite_pmf; }

  double mean() const;      // gaussian mean / laplace location / pmf mean index
  double location() const { return param1_; }
  double variance_param() const { return param2_; }  // gaussian only
  double scale() const { return param2_; }            // laplace only
  const std::vector<double>& probabilities() const { return probs_; }

  double log_density(double x) const;
  double density(double x) const;
  double sample(RandomStream& rng) const;

  // Interval outside which the density falls below `floor_ratio` times its
  // peak; used to truncate quadrature domains.
  std::pair<double, double> truncated_support(double floor_ratio = 1e-16) const;

  bool same_parameters(const DistributionModel& other, double tol = 0.0) const;

 private:
  Family family_ = Family::gaussian;
  double param1_ = 0.0;  // mean / location
  double param2_ = 1.0;  // variance / scale
  std::vector<double> probs_;
};

struct AgentModel {
  DistributionModel signal;                   // data-generating model
  std::vector<DistributionModel> likelihoods; // one per hypothesis
  double noise_variance = 0.0;                // additive zero-mean Gaussian

  // Signal distribution with the measurement noise folded in.
  DistributionModel effective_signal() const;
};

struct HypothesisSet {
  int count = 2;
  int true_index = 0;  // 0-based; hypothesis 0 is the reference
};

void validate_agent(const AgentModel& agent, int num_hypotheses);
void validate_hypotheses(const HypothesisSet& hypotheses);

// log L(xi | theta_ref) - log L(xi | theta), with theta_ref the reference
// hypothesis (index 0). Throws support_violation when either likelihood
// vanishes at xi.
double log_likelihood_ratio(const AgentModel& agent, int theta, double xi);

double kl_divergence(const DistributionModel& p, const DistributionModel& q);

// d_k(theta): mean of the log-likelihood ratio under the (noise-adjusted)
// signal model. Exactly zero for the reference hypothesis.
double expected_llr(const AgentModel& agent, int theta);

// rho_k(theta): variance of the log-likelihood ratio.
double llr_variance(const AgentModel& agent, int theta);

double sample_signal(const AgentModel& agent, RandomStream& rng);

// Hypotheses whose KL divergence from the signal model is within tol of the
// minimum.
std::vector<int> local_truth_set(const AgentModel& agent, double tol = 1e-9);

}  // namespace asl
