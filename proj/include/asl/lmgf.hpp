#pragma once

#include <vector>

#include "asl/models.hpp"

namespace asl {

struct LmgfOptions {
  double quad_tol = 1e-12;   // tolerance of the inner expectation integral
  double probe_tol = 1e-10;  // |Lambda| threshold on the probe grid
};

// Log-moment-generating function of the log-likelihood ratio of one agent
// against one wrong hypothesis. Moments d_k(theta) and rho_k(theta) are
// cached at construction, and the evaluator detects the identically-zero
// case on a fixed probe grid.
class LmgfEvaluator {
 public:
  enum class Method { closed_form_gaussian, quadrature, exact_sum };

  LmgfEvaluator(const AgentModel& agent, int theta, LmgfOptions opts = {});

  // Lambda_k(t; theta). Throws divergent when the defining integral blows up.
  double operator()(double t) const;

  double mean() const { return d_; }        // d_k(theta)
  double variance() const { return rho_; }  // rho_k(theta)
  bool identically_zero() const { return identically_zero_; }
  Method method() const { return method_; }
  int theta() const { return theta_; }

 private:
  double evaluate(double t) const;

  int theta_ = 1;
  Method method_ = Method::quadrature;
  double d_ = 0.0;
  double rho_ = 0.0;
  bool identically_zero_ = false;
  LmgfOptions opts_;

  // exact_sum state: support atoms of the signal pmf
  std::vector<double> log_probs_;
  std::vector<double> llr_values_;

  // quadrature state
  DistributionModel signal_ = DistributionModel::gaussian(0.0, 1.0);
  DistributionModel ref_ = DistributionModel::gaussian(0.0, 1.0);
  DistributionModel alt_ = DistributionModel::gaussian(0.0, 1.0);
  double support_lo_ = 0.0;
  double support_hi_ = 0.0;
  std::vector<double> breakpoints_;
};

// Per-(agent, wrong hypothesis) evaluators for a whole network.
class EvaluatorTable {
 public:
  EvaluatorTable() = default;
  EvaluatorTable(const std::vector<AgentModel>& agents, int num_hypotheses,
                 LmgfOptions opts = {});

  int num_agents() const { return num_agents_; }
  int num_hypotheses() const { return num_hypotheses_; }

  // theta in [1, num_hypotheses)
  const LmgfEvaluator& at(int agent, int theta) const;

 private:
  int num_agents_ = 0;
  int num_hypotheses_ = 0;
  std::vector<LmgfEvaluator> evals_;
};

// Lambda_ave(t; pi, theta) = sum_k Lambda_k(pi_k t; theta).
double lmgf_ave(const EvaluatorTable& table, const std::vector<double>& pi,
                int theta, double t);

enum class AgentClass { uninformative, informative, conflicting };

struct ClassifyOptions {
  double tol = 1e-10;           // probe threshold and d_k sign threshold
  double uninformative_M = 1.0; // placeholder |t| for uninformative agents
  double root_tol = 1e-12;
  double quad_tol = 1e-10;      // phi-integral tolerance
};

struct ThetaClassification {
  int theta = 1;
  std::vector<AgentClass> agent_class;
  std::vector<int> uninformative;
  std::vector<int> informative;
  std::vector<int> conflicting;
  std::vector<double> t_nc;    // t_k^nc(theta)
  std::vector<double> phi_nc;  // Phi_k^nc(theta)
  double phi_nc_sum = 0.0;
  double phi_nc_min = 0.0;
};

ThetaClassification classify_agents(const EvaluatorTable& table, int theta,
                                    const ClassifyOptions& opts = {});

// t_k^nc(theta): the negative zero of Lambda_k for informative agents, 0 for
// conflicting agents, -M for uninformative agents.
double noncoop_critical_t(const LmgfEvaluator& eval, AgentClass cls,
                          const ClassifyOptions& opts = {});

// Phi_k^nc(theta) = -phi_k(t_k^nc; theta) for informative agents, else 0.
double noncoop_exponent(const LmgfEvaluator& eval, AgentClass cls, double t_nc,
                        double quad_tol = 1e-10);

}  // namespace asl
