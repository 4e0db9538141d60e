#include "asl/lmgf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asl/error.hpp"
#include "asl/numeric.hpp"

namespace asl {
namespace {

constexpr double kProbeGrid[6] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

double log_sum_exp(const std::vector<double>& terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : terms) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

}  // namespace

LmgfEvaluator::LmgfEvaluator(const AgentModel& agent, int theta,
                             LmgfOptions opts)
    : theta_(theta), opts_(opts) {
  if (theta <= 0 || theta >= static_cast<int>(agent.likelihoods.size())) {
    raise(Errc::invalid_config, "theta must name a wrong hypothesis");
  }
  const DistributionModel f = agent.effective_signal();
  const DistributionModel& ref = agent.likelihoods[0];
  const DistributionModel& alt = agent.likelihoods[theta];
  using Family = DistributionModel::Family;

  d_ = expected_llr(agent, theta);
  rho_ = llr_variance(agent, theta);

  if (f.discrete()) {
    method_ = Method::exact_sum;
    const auto& probs = f.probabilities();
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (probs[j] <= 0.0) continue;
      const double lr = ref.log_density(static_cast<double>(j));
      const double la = alt.log_density(static_cast<double>(j));
      if (!std::isfinite(lr) || !std::isfinite(la)) {
        raise(Errc::support_violation,
              "likelihood vanishes on the signal support");
      }
      log_probs_.push_back(std::log(probs[j]));
      llr_values_.push_back(lr - la);
    }
  } else if (f.family() == Family::gaussian &&
             ref.family() == Family::gaussian &&
             alt.family() == Family::gaussian &&
             ref.variance_param() == alt.variance_param()) {
    // Shift-in-mean Gaussian model: the ratio is Gaussian, so
    // Lambda(t) = d t + rho t^2 / 2 exactly.
    method_ = Method::closed_form_gaussian;
  } else {
    method_ = Method::quadrature;
    signal_ = f;
    ref_ = ref;
    alt_ = alt;
    const auto [lo, hi] = f.truncated_support();
    support_lo_ = lo;
    support_hi_ = hi;
    for (const DistributionModel* m : {&signal_, &ref_, &alt_}) {
      if (!m->discrete()) breakpoints_.push_back(m->location());
    }
  }

  identically_zero_ = true;
  for (double t : kProbeGrid) {
    if (std::abs(evaluate(t)) > opts_.probe_tol) {
      identically_zero_ = false;
      break;
    }
  }
}

double LmgfEvaluator::evaluate(double t) const {
  switch (method_) {
    case Method::closed_form_gaussian:
      return d_ * t + 0.5 * rho_ * t * t;
    case Method::exact_sum: {
      std::vector<double> terms(log_probs_.size());
      for (std::size_t j = 0; j < terms.size(); ++j) {
        terms[j] = log_probs_[j] + t * llr_values_[j];
      }
      const double value = log_sum_exp(terms);
      if (!std::isfinite(value)) {
        raise(Errc::divergent, "moment generating function is infinite");
      }
      return value;
    }
    case Method::quadrature: {
      QuadratureOptions qopts;
      qopts.abs_tol = opts_.quad_tol;
      const double mgf = integrate(
          [&](double xi) {
            const double x = ref_.log_density(xi) - alt_.log_density(xi);
            return std::exp(t * x) * signal_.density(xi);
          },
          support_lo_, support_hi_, qopts, breakpoints_);
      if (!(mgf > 0.0) || !std::isfinite(mgf) || mgf > 1e290) {
        raise(Errc::divergent, "moment generating function is infinite");
      }
      return std::log(mgf);
    }
  }
  return 0.0;
}

double LmgfEvaluator::operator()(double t) const {
  if (t == 0.0) return 0.0;
  if (identically_zero_) return 0.0;
  return evaluate(t);
}

EvaluatorTable::EvaluatorTable(const std::vector<AgentModel>& agents,
                               int num_hypotheses, LmgfOptions opts)
    : num_agents_(static_cast<int>(agents.size())),
      num_hypotheses_(num_hypotheses) {
  if (num_hypotheses < 2) {
    raise(Errc::invalid_config, "at least two hypotheses are required");
  }
  evals_.reserve(static_cast<std::size_t>(num_agents_) * (num_hypotheses - 1));
  for (const AgentModel& agent : agents) {
    validate_agent(agent, num_hypotheses);
    for (int theta = 1; theta < num_hypotheses; ++theta) {
      evals_.emplace_back(agent, theta, opts);
    }
  }
}

const LmgfEvaluator& EvaluatorTable::at(int agent, int theta) const {
  return evals_[static_cast<std::size_t>(agent) * (num_hypotheses_ - 1) +
                (theta - 1)];
}

double lmgf_ave(const EvaluatorTable& table, const std::vector<double>& pi,
                int theta, double t) {
  double sum = 0.0;
  for (int k = 0; k < table.num_agents(); ++k) {
    sum += table.at(k, theta)(pi[k] * t);
  }
  return sum;
}

ThetaClassification classify_agents(const EvaluatorTable& table, int theta,
                                    const ClassifyOptions& opts) {
  ThetaClassification out;
  out.theta = theta;
  const int n = table.num_agents();
  out.agent_class.resize(n);
  out.t_nc.resize(n);
  out.phi_nc.resize(n);
  out.phi_nc_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const LmgfEvaluator& eval = table.at(k, theta);
    AgentClass cls;
    if (eval.identically_zero()) {
      cls = AgentClass::uninformative;
      out.uninformative.push_back(k);
    } else if (eval.mean() > opts.tol) {
      cls = AgentClass::informative;
      out.informative.push_back(k);
    } else {
      cls = AgentClass::conflicting;
      out.conflicting.push_back(k);
    }
    out.agent_class[k] = cls;
    out.t_nc[k] = noncoop_critical_t(eval, cls, opts);
    out.phi_nc[k] = noncoop_exponent(eval, cls, out.t_nc[k], opts.quad_tol);
    out.phi_nc_sum += out.phi_nc[k];
    out.phi_nc_min = std::min(out.phi_nc_min, out.phi_nc[k]);
  }
  return out;
}

double noncoop_critical_t(const LmgfEvaluator& eval, AgentClass cls,
                          const ClassifyOptions& opts) {
  switch (cls) {
    case AgentClass::uninformative:
      return -opts.uninformative_M;
    case AgentClass::conflicting:
      return 0.0;
    case AgentClass::informative:
      break;
  }
  if (eval.method() == LmgfEvaluator::Method::closed_form_gaussian) {
    return -2.0 * eval.mean() / eval.variance();
  }
  const double guess =
      (eval.variance() > 0.0) ? -2.0 * eval.mean() / eval.variance() : -1.0;
  return negative_root([&](double t) { return eval(t); }, guess, opts.root_tol);
}

double noncoop_exponent(const LmgfEvaluator& eval, AgentClass cls, double t_nc,
                        double quad_tol) {
  if (cls != AgentClass::informative) return 0.0;
  const double phi = phi_integral([&](double t) { return eval(t); },
                                  eval.mean(), eval.variance(), t_nc, quad_tol);
  return std::max(-phi, 0.0);
}

}  // namespace asl
