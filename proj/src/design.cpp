#include "asl/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asl/error.hpp"
#include "asl/numeric.hpp"

namespace asl {
namespace {

PerronVector normalize_from_t(const std::vector<double>& t_values) {
  double sum = 0.0;
  for (double t : t_values) sum += t;
  if (!(sum < 0.0)) {
    raise(Errc::domain_error, "critical values must be strictly negative");
  }
  std::vector<double> weights(t_values.size());
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    weights[k] = t_values[k] / sum;
    if (!(weights[k] > 0.0)) {
      raise(Errc::domain_error, "constructed eigenvector is not positive");
    }
  }
  return PerronVector{std::move(weights)};
}

}  // namespace

const char* design_status_name(DesignStatus status) {
  switch (status) {
    case DesignStatus::optimal_upper_bound_achieved:
      return "optimal_upper_bound_achieved";
    case DesignStatus::epsilon_optimal:
      return "epsilon_optimal";
    case DesignStatus::upper_bound_unachievable:
      return "upper_bound_unachievable";
  }
  return "unknown";
}

std::vector<int> theta_dagger(const EvaluatorTable& table,
                              const ClassifyOptions& opts, double tie_tol) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> sums(table.num_hypotheses(), 0.0);
  for (int theta = 1; theta < table.num_hypotheses(); ++theta) {
    sums[theta] = classify_agents(table, theta, opts).phi_nc_sum;
    best = std::min(best, sums[theta]);
  }
  std::vector<int> ties;
  for (int theta = 1; theta < table.num_hypotheses(); ++theta) {
    if (sums[theta] <= best + tie_tol) ties.push_back(theta);
  }
  return ties;
}

namespace {

// Critical values with the free uninformative slots resolved: borrow the
// average root from hypotheses where the agent is informative, if any.
std::vector<double> resolved_t_values(const EvaluatorTable& table,
                                      const ThetaClassification& cls,
                                      const ClassifyOptions& opts) {
  std::vector<double> t_values = cls.t_nc;
  for (int k : cls.uninformative) {
    double sum = 0.0;
    int found = 0;
    for (int theta = 1; theta < table.num_hypotheses(); ++theta) {
      if (theta == cls.theta) continue;
      const LmgfEvaluator& eval = table.at(k, theta);
      if (eval.identically_zero() || eval.mean() <= opts.tol) continue;
      sum += noncoop_critical_t(eval, AgentClass::informative, opts);
      ++found;
    }
    if (found > 0) t_values[k] = sum / found;
  }
  return t_values;
}

}  // namespace

PerronVector candidate_pi(const EvaluatorTable& table,
                          const ThetaClassification& cls,
                          const ClassifyOptions& opts) {
  if (!cls.conflicting.empty()) {
    raise(Errc::conflicting_agents_present,
          "candidate eigenvector requires an empty conflicting set");
  }
  return normalize_from_t(resolved_t_values(table, cls, opts));
}

bool check_pi1_membership(const EvaluatorTable& table,
                          const std::vector<double>& pi, int theta_dagger,
                          double tol, const ExponentOptions& opts) {
  const ExponentReport report = error_exponent(table, pi, opts);
  if (!report.feasible) return false;
  double phi_dagger = 0.0;
  for (const auto& entry : report.per_theta) {
    if (entry.theta == theta_dagger) phi_dagger = entry.phi;
  }
  for (const auto& entry : report.per_theta) {
    if (entry.phi + tol < phi_dagger) return false;
  }
  return true;
}

double epsilon_t(const EvaluatorTable& table, const ThetaClassification& cls,
                 double epsilon, const DesignOptions& opts) {
  if (cls.conflicting.empty()) {
    raise(Errc::no_conflicting_agents,
          "epsilon construction applies only with conflicting agents");
  }
  if (!(epsilon > 0.0)) raise(Errc::domain_error, "epsilon must be positive");
  const double target = epsilon / static_cast<double>(cls.conflicting.size());

  double t_eps = -std::numeric_limits<double>::infinity();
  for (int k : cls.conflicting) {
    const LmgfEvaluator& eval = table.at(k, cls.theta);
    auto phi_k = [&](double t) {
      return phi_integral([&](double tau) { return eval(tau); }, eval.mean(),
                          eval.variance(), t, opts.exponent.quad_tol);
    };
    // phi_k is zero at t = 0 and grows monotonically as t decreases; find the
    // point where it reaches the per-agent budget.
    double lo = -1e-3;
    int guard = 0;
    while (phi_k(lo) < target) {
      lo *= 2.0;
      if (++guard > 80) {
        raise(Errc::root_not_bracketed, "phi budget not reached by t = -1e21");
      }
    }
    double hi = 0.0;
    while (lo < hi - opts.t_eps_tol) {
      const double mid = 0.5 * (lo + hi);
      if (phi_k(mid) >= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    t_eps = std::max(t_eps, 0.5 * (lo + hi));
  }
  return t_eps;
}

PerronVector epsilon_pi(const EvaluatorTable& table,
                        const ThetaClassification& cls, double epsilon,
                        const DesignOptions& opts) {
  if (cls.conflicting.empty()) {
    return candidate_pi(table, cls, opts.exponent.classify);
  }
  const double t_eps = epsilon_t(table, cls, epsilon, opts);
  std::vector<double> t_values =
      resolved_t_values(table, cls, opts.exponent.classify);
  for (int k : cls.conflicting) t_values[k] = t_eps;
  return normalize_from_t(t_values);
}

EigenvectorDesign optimal_design(const EvaluatorTable& table,
                                 const DesignOptions& opts) {
  const std::vector<int> ties =
      theta_dagger(table, opts.exponent.classify, opts.exponent.tie_tol);

  EigenvectorDesign best;
  bool have_best = false;
  for (int theta : ties) {
    const ThetaClassification cls =
        classify_agents(table, theta, opts.exponent.classify);

    EigenvectorDesign design;
    design.theta_dagger = theta;
    design.theta_dagger_ties = ties;
    design.upper_bound = cls.phi_nc_sum;

    if (cls.conflicting.empty()) {
      design.pi = candidate_pi(table, cls, opts.exponent.classify);
      design.epsilon = 0.0;
    } else {
      design.pi = epsilon_pi(table, cls, opts.epsilon, opts);
      design.epsilon = opts.epsilon;
    }

    const ExponentReport report =
        error_exponent(table, design.pi.weights, opts.exponent);
    design.achieved_exponent =
        report.feasible ? report.phi : std::numeric_limits<double>::quiet_NaN();
    design.pi1_member =
        check_pi1_membership(table, design.pi.weights, theta, opts.pi1_tol,
                             opts.exponent);

    if (!design.pi1_member || !report.feasible) {
      design.status = DesignStatus::upper_bound_unachievable;
    } else if (cls.conflicting.empty()) {
      const double gap = std::abs(design.achieved_exponent - design.upper_bound);
      const double scale = std::max(design.upper_bound, 1e-300);
      design.status = (gap <= opts.optimal_rel_tol * scale)
                          ? DesignStatus::optimal_upper_bound_achieved
                          : DesignStatus::upper_bound_unachievable;
    } else {
      design.status = DesignStatus::epsilon_optimal;
    }

    const double score = std::isnan(design.achieved_exponent)
                             ? -std::numeric_limits<double>::infinity()
                             : design.achieved_exponent;
    const double best_score =
        !have_best || std::isnan(best.achieved_exponent)
            ? -std::numeric_limits<double>::infinity()
            : best.achieved_exponent;
    if (!have_best || score > best_score) {
      best = design;
      have_best = true;
    }
  }
  return best;
}

bool proportionality_check(const std::vector<double>& pi,
                           const ThetaClassification& cls, double tol) {
  const auto& informative = cls.informative;
  for (std::size_t i = 0; i < informative.size(); ++i) {
    for (std::size_t j = i + 1; j < informative.size(); ++j) {
      const int k = informative[i];
      const int l = informative[j];
      if (std::abs(pi[k] * cls.t_nc[l] - pi[l] * cls.t_nc[k]) > tol) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace asl
