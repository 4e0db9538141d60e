#pragma once

#include <vector>

#include "asl/exponent.hpp"
#include "asl/network.hpp"

namespace asl {

struct DesignOptions {
  double epsilon = 1e-4;    // budget for the conflicting-agent construction
  double pi1_tol = 1e-9;    // slack when comparing theta-related exponents
  double optimal_rel_tol = 1e-6;  // achieved vs upper bound, relative
  double t_eps_tol = 1e-12;
  ExponentOptions exponent;
};

enum class DesignStatus {
  optimal_upper_bound_achieved,
  epsilon_optimal,
  upper_bound_unachievable,
};

const char* design_status_name(DesignStatus status);

struct EigenvectorDesign {
  int theta_dagger = 1;
  std::vector<int> theta_dagger_ties;  // all hypotheses attaining the minimum
  PerronVector pi;
  DesignStatus status = DesignStatus::upper_bound_unachievable;
  double achieved_exponent = 0.0;  // numeric Phi(pi); NaN when infeasible
  double upper_bound = 0.0;        // Phi_sum^nc(theta_dagger)
  bool pi1_member = false;
  double epsilon = 0.0;  // 0 when the exact construction applied
};

// Wrong hypotheses minimizing Phi_sum^nc, ties within tie_tol (lowest index
// first).
std::vector<int> theta_dagger(const EvaluatorTable& table,
                              const ClassifyOptions& opts = {},
                              double tie_tol = 1e-12);

// pi_k = t_k^nc / sum_l t_l^nc. Requires no conflicting agents for this
// hypothesis. Theta_dagger-uninformative agents have a free weight; they
// borrow the mean critical value from hypotheses where they are informative
// (the -M placeholder applies only when uninformative everywhere), which
// keeps one eigenvector optimal across hypotheses in the shift-in-mean
// Gaussian family.
PerronVector candidate_pi(const EvaluatorTable& table,
                          const ThetaClassification& cls,
                          const ClassifyOptions& opts = {});

// Membership in Pi_1: pi feasible and the theta_dagger-related exponent is
// minimal across wrong hypotheses within tol. Infeasible pi reports false.
bool check_pi1_membership(const EvaluatorTable& table,
                          const std::vector<double>& pi, int theta_dagger,
                          double tol, const ExponentOptions& opts = {});

// t_epsilon: least-negative t at which every conflicting agent's phi stays
// within epsilon / |conflicting set|.
double epsilon_t(const EvaluatorTable& table, const ThetaClassification& cls,
                 double epsilon, const DesignOptions& opts = {});

// pi built from t_k^nc off the conflicting set and t_epsilon on it.
PerronVector epsilon_pi(const EvaluatorTable& table,
                        const ThetaClassification& cls, double epsilon,
                        const DesignOptions& opts = {});

// Case split on the conflicting set of theta_dagger; evaluates every tied
// hypothesis and returns the design with the largest verified exponent.
EigenvectorDesign optimal_design(const EvaluatorTable& table,
                                 const DesignOptions& opts = {});

// Pi_2 membership: cross products pi_k t_l = pi_l t_k for all informative
// pairs, within tol.
bool proportionality_check(const std::vector<double>& pi,
                           const ThetaClassification& cls, double tol);

}  // namespace asl
