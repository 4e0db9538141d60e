#include "asl/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asl/error.hpp"
#include "asl/numeric.hpp"

namespace asl {
namespace {

// Lambda_ave with uninformative agents skipped; they contribute exactly zero
// and skipping them keeps quadrature noise out of the sum.
double lambda_ave_active(const EvaluatorTable& table,
                         const std::vector<double>& pi, int theta, double t) {
  double sum = 0.0;
  for (int k = 0; k < table.num_agents(); ++k) {
    const LmgfEvaluator& eval = table.at(k, theta);
    if (eval.identically_zero()) continue;
    sum += eval(pi[k] * t);
  }
  return sum;
}

bool all_uninformative(const EvaluatorTable& table, int theta) {
  for (int k = 0; k < table.num_agents(); ++k) {
    if (!table.at(k, theta).identically_zero()) return false;
  }
  return true;
}

void check_pi(const EvaluatorTable& table, const std::vector<double>& pi) {
  if (static_cast<int>(pi.size()) != table.num_agents()) {
    raise(Errc::invalid_config, "pi dimension mismatch");
  }
}

}  // namespace

double m_ave(const EvaluatorTable& table, const std::vector<double>& pi,
             int theta) {
  check_pi(table, pi);
  double sum = 0.0;
  for (int k = 0; k < table.num_agents(); ++k) {
    sum += pi[k] * table.at(k, theta).mean();
  }
  return sum;
}

double c_ave(const EvaluatorTable& table, const std::vector<double>& pi,
             int theta) {
  check_pi(table, pi);
  double sum = 0.0;
  for (int k = 0; k < table.num_agents(); ++k) {
    sum += pi[k] * pi[k] * table.at(k, theta).variance();
  }
  return sum;
}

double critical_t(const EvaluatorTable& table, const std::vector<double>& pi,
                  int theta, const ExponentOptions& opts) {
  const double m = m_ave(table, pi, theta);
  if (m <= opts.feasibility_margin) {
    raise(Errc::no_negative_root,
          "m_ave(pi, theta) <= 0: pi is infeasible for this hypothesis");
  }
  const double c = c_ave(table, pi, theta);
  const double guess = (c > 0.0) ? -2.0 * m / c : -1.0;
  return negative_root(
      [&](double t) { return lambda_ave_active(table, pi, theta, t); }, guess,
      opts.root_tol);
}

double theta_exponent(const EvaluatorTable& table, const std::vector<double>& pi,
                      int theta, const ExponentOptions& opts) {
  if (all_uninformative(table, theta)) return 0.0;
  const double t_star = critical_t(table, pi, theta, opts);
  const double phi = phi_integral(
      [&](double t) { return lambda_ave_active(table, pi, theta, t); },
      m_ave(table, pi, theta), c_ave(table, pi, theta), t_star, opts.quad_tol);
  return std::max(-phi, 0.0);
}

std::pair<double, double> parabolic_approx(const EvaluatorTable& table,
                                           const std::vector<double>& pi,
                                           int theta) {
  const double m = m_ave(table, pi, theta);
  const double c = c_ave(table, pi, theta);
  if (c <= 0.0) {
    raise(Errc::degenerate_variance, "c_ave vanishes for this hypothesis");
  }
  return {-2.0 * m / c, m * m / c};
}

std::pair<double, double> exponent_bounds(const EvaluatorTable& table, int theta,
                                          const ClassifyOptions& opts) {
  const ThetaClassification cls = classify_agents(table, theta, opts);
  return {cls.phi_nc_min, cls.phi_nc_sum};
}

ExponentReport error_exponent(const EvaluatorTable& table,
                              const std::vector<double>& pi,
                              const ExponentOptions& opts) {
  check_pi(table, pi);
  for (double w : pi) {
    if (!(w > 0.0)) raise(Errc::invalid_config, "pi must be strictly positive");
  }
  ExponentReport report;
  report.feasible = true;
  const int H = table.num_hypotheses();
  for (int theta = 1; theta < H; ++theta) {
    HypothesisExponent entry;
    entry.theta = theta;
    entry.m = m_ave(table, pi, theta);
    entry.c = c_ave(table, pi, theta);
    entry.all_uninformative = all_uninformative(table, theta);
    entry.feasible = entry.m > opts.feasibility_margin;
    if (entry.c > 0.0) {
      entry.t_hat = -2.0 * entry.m / entry.c;
      entry.phi_hat = entry.m * entry.m / entry.c;
    }
    if (entry.all_uninformative) {
      entry.phi = 0.0;
      entry.t_star = 0.0;
    } else if (entry.feasible) {
      entry.t_star = critical_t(table, pi, theta, opts);
      const double phi = phi_integral(
          [&](double t) { return lambda_ave_active(table, pi, theta, t); },
          entry.m, entry.c, entry.t_star, opts.quad_tol);
      entry.phi = std::max(-phi, 0.0);
    } else {
      entry.phi = std::numeric_limits<double>::quiet_NaN();
      entry.t_star = std::numeric_limits<double>::quiet_NaN();
    }
    report.feasible = report.feasible && entry.feasible;
    report.per_theta.push_back(entry);
  }

  if (report.feasible) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& entry : report.per_theta) best = std::min(best, entry.phi);
    report.phi = best;
    for (const auto& entry : report.per_theta) {
      if (entry.phi <= best + opts.tie_tol) {
        report.argmin_set.push_back(entry.theta);
      }
    }
    report.argmin_theta = report.argmin_set.front();
  } else {
    report.phi = std::numeric_limits<double>::quiet_NaN();
    report.argmin_theta = -1;
  }
  return report;
}

}  // namespace asl
