#pragma once

#include <utility>
#include <vector>

#include "asl/lmgf.hpp"

namespace asl {

struct ExponentOptions {
  double quad_tol = 1e-10;          // phi-integral absolute tolerance
  double root_tol = 1e-12;          // critical-point tolerance
  double feasibility_margin = 1e-12;  // m_ave must exceed this
  double tie_tol = 1e-12;           // argmin ties over hypotheses
  ClassifyOptions classify;
};

// m_ave(pi, theta) = sum_k pi_k d_k(theta)
double m_ave(const EvaluatorTable& table, const std::vector<double>& pi,
             int theta);

// c_ave(pi, theta) = sum_k pi_k^2 rho_k(theta)
double c_ave(const EvaluatorTable& table, const std::vector<double>& pi,
             int theta);

// t_star_theta(pi): unique negative zero of Lambda_ave. Throws
// no_negative_root when m_ave <= feasibility margin.
double critical_t(const EvaluatorTable& table, const std::vector<double>& pi,
                  int theta, const ExponentOptions& opts = {});

// Phi(pi, theta) = -phi(t_star; pi, theta). Zero when every agent is
// theta-uninformative.
double theta_exponent(const EvaluatorTable& table, const std::vector<double>& pi,
                      int theta, const ExponentOptions& opts = {});

// (t_hat, phi_hat) = (-2 m/c, m^2/c); phi_hat is returned as the positive
// exponent magnitude. Throws degenerate_variance when c_ave vanishes.
std::pair<double, double> parabolic_approx(const EvaluatorTable& table,
                                           const std::vector<double>& pi,
                                           int theta);

// (min_k Phi_k^nc(theta), sum_k Phi_k^nc(theta))
std::pair<double, double> exponent_bounds(const EvaluatorTable& table, int theta,
                                          const ClassifyOptions& opts = {});

struct HypothesisExponent {
  int theta = 1;
  double phi = 0.0;
  double t_star = 0.0;
  double m = 0.0;
  double c = 0.0;
  double t_hat = 0.0;
  double phi_hat = 0.0;
  bool feasible = false;         // m_ave above the margin
  bool all_uninformative = false;
};

struct ExponentReport {
  std::vector<HypothesisExponent> per_theta;  // thetas 1..H-1 in order
  bool feasible = false;  // m_ave > margin for every wrong hypothesis
  double phi = 0.0;       // min over theta; NaN when infeasible
  int argmin_theta = -1;
  std::vector<int> argmin_set;  // hypotheses within tie_tol of the minimum
};

// Full per-hypothesis evaluation. Infeasibility is reported in the flags
// rather than thrown.
ExponentReport error_exponent(const EvaluatorTable& table,
                              const std::vector<double>& pi,
                              const ExponentOptions& opts = {});

}  // namespace asl
