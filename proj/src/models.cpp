#include "asl/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asl/error.hpp"
#include "asl/numeric.hpp"

namespace asl {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int pmf_index(const std::vector<double>& probs, double x) {
  const long idx = std::lround(x);
  if (idx < 0 || idx >= static_cast<long>(probs.size())) return -1;
  return static_cast<int>(idx);
}

// Breakpoints for piecewise-smooth integrands: the location parameters of all
// involved densities (Laplace log-densities kink there).
std::vector<double> location_breakpoints(
    std::initializer_list<const DistributionModel*> models) {
  std::vector<double> pts;
  for (const auto* m : models) {
    if (!m->discrete()) pts.push_back(m->location());
  }
  return pts;
}

double expectation_under(const DistributionModel& weight,
                         const std::function<double(double)>& g,
                         const std::vector<double>& breakpoints,
                         double abs_tol) {
  if (weight.discrete()) {
    const auto& probs = weight.probabilities();
    double sum = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (probs[j] > 0.0) sum += probs[j] * g(static_cast<double>(j));
    }
    return sum;
  }
  const auto [lo, hi] = weight.truncated_support();
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  return integrate([&](double x) { return weight.density(x) * g(x); }, lo, hi,
                   opts, breakpoints);
}

}  // namespace

DistributionModel DistributionModel::gaussian(double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance)) {
    raise(Errc::invalid_config, "gaussian requires finite mean and variance > 0");
  }
  DistributionModel m;
  m.family_ = Family::gaussian;
  m.param1_ = mean;
  m.param2_ = variance;
  return m;
}

DistributionModel DistributionModel::laplace(double location, double scale) {
  if (!(scale > 0.0) || !std::isfinite(location) || !std::isfinite(scale)) {
    raise(Errc::invalid_config, "laplace requires finite location and scale > 0");
  }
  DistributionModel m;
  m.family_ = Family::laplace;
  m.param1_ = location;
  m.param2_ = scale;
  return m;
}

DistributionModel DistributionModel::finite_pmf(std::vector<double> probabilities) {
  if (probabilities.empty()) raise(Errc::invalid_config, "empty pmf");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      raise(Errc::invalid_config, "pmf entries must be nonnegative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    raise(Errc::invalid_config, "pmf entries must sum to 1 within 1e-12");
  }
  DistributionModel m;
  m.family_ = Family::finite_pmf;
  m.probs_ = std::move(probabilities);
  return m;
}

double DistributionModel::mean() const {
  switch (family_) {
    case Family::gaussian:
    case Family::laplace:
      return param1_;
    case Family::finite_pmf: {
      double s = 0.0;
      for (std::size_t j = 0; j < probs_.size(); ++j) s += probs_[j] * j;
      return s;
    }
  }
  return 0.0;
}

double DistributionModel::log_density(double x) const {
  switch (family_) {
    case Family::gaussian:
      return -0.5 * std::log(2.0 * kPi * param2_) -
             (x - param1_) * (x - param1_) / (2.0 * param2_);
    case Family::laplace:
      return -std::log(2.0 * param2_) - std::abs(x - param1_) / param2_;
    case Family::finite_pmf: {
      const int j = pmf_index(probs_, x);
      if (j < 0 || probs_[j] <= 0.0) return kNegInf;
      return std::log(probs_[j]);
    }
  }
  return kNegInf;
}

double DistributionModel::density(double x) const {
  return std::exp(log_density(x));
}

double DistributionModel::sample(RandomStream& rng) const {
  switch (family_) {
    case Family::gaussian:
      return param1_ + std::sqrt(param2_) * rng.gaussian();
    case Family::laplace: {
      const double u = rng.uniform01() - 0.5;
      const double s = (u < 0.0) ? -1.0 : 1.0;
      return param1_ - param2_ * s * std::log(1.0 - 2.0 * std::abs(u));
    }
    case Family::finite_pmf: {
      double u = rng.uniform01();
      for (std::size_t j = 0; j + 1 < probs_.size(); ++j) {
        if (u < probs_[j]) return static_cast<double>(j);
        u -= probs_[j];
      }
      return static_cast<double>(probs_.size() - 1);
    }
  }
  return 0.0;
}

std::pair<double, double> DistributionModel::truncated_support(
    double floor_ratio) const {
  const double log_floor = std::log(floor_ratio);
  switch (family_) {
    case Family::gaussian: {
      const double half = std::sqrt(-2.0 * log_floor * param2_);
      return {param1_ - half, param1_ + half};
    }
    case Family::laplace: {
      const double half = -log_floor * param2_;
      return {param1_ - half, param1_ + half};
    }
    case Family::finite_pmf:
      return {0.0, static_cast<double>(probs_.size() - 1)};
  }
  return {0.0, 0.0};
}

bool DistributionModel::same_parameters(const DistributionModel& other,
                                        double tol) const {
  if (family_ != other.family_) return false;
  if (family_ == Family::finite_pmf) {
    if (probs_.size() != other.probs_.size()) return false;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      if (std::abs(probs_[j] - other.probs_[j]) > tol) return false;
    }
    return true;
  }
  return std::abs(param1_ - other.param1_) <= tol &&
         std::abs(param2_ - other.param2_) <= tol;
}

DistributionModel AgentModel::effective_signal() const {
  if (noise_variance <= 0.0) return signal;
  return DistributionModel::gaussian(signal.mean(),
                                     signal.variance_param() + noise_variance);
}

void validate_agent(const AgentModel& agent, int num_hypotheses) {
  if (static_cast<int>(agent.likelihoods.size()) != num_hypotheses) {
    raise(Errc::invalid_config, "agent needs one likelihood per hypothesis");
  }
  const bool signal_discrete = agent.signal.discrete();
  for (const auto& lk : agent.likelihoods) {
    if (lk.discrete() != signal_discrete) {
      raise(Errc::invalid_config,
            "likelihoods must share the signal's support class");
    }
    if (signal_discrete &&
        lk.probabilities().size() != agent.signal.probabilities().size()) {
      raise(Errc::invalid_config, "pmf alphabets must match");
    }
  }
  if (agent.noise_variance < 0.0) {
    raise(Errc::invalid_config, "noise variance must be nonnegative");
  }
  if (agent.noise_variance > 0.0) {
    if (agent.signal.family() != DistributionModel::Family::gaussian) {
      raise(Errc::invalid_config,
            "additive noise requires a Gaussian signal model");
    }
    for (const auto& lk : agent.likelihoods) {
      if (lk.family() != DistributionModel::Family::gaussian) {
        raise(Errc::invalid_config,
              "additive noise requires Gaussian likelihood families");
      }
    }
  }
}

void validate_hypotheses(const HypothesisSet& hypotheses) {
  if (hypotheses.count < 2) {
    raise(Errc::invalid_config, "at least two hypotheses are required");
  }
  if (hypotheses.true_index < 0 || hypotheses.true_index >= hypotheses.count) {
    raise(Errc::invalid_config, "true hypothesis index out of range");
  }
}

double log_likelihood_ratio(const AgentModel& agent, int theta, double xi) {
  const double log_ref = agent.likelihoods[0].log_density(xi);
  const double log_alt = agent.likelihoods[theta].log_density(xi);
  if (!std::isfinite(log_ref) || !std::isfinite(log_alt)) {
    raise(Errc::support_violation,
          "likelihood vanishes at the observed signal");
  }
  return log_ref - log_alt;
}

double kl_divergence(const DistributionModel& p, const DistributionModel& q) {
  using Family = DistributionModel::Family;
  if (p.discrete() != q.discrete()) {
    raise(Errc::invalid_config,
          "KL divergence requires compatible support classes");
  }
  if (p.discrete()) {
    const auto& pp = p.probabilities();
    const auto& qq = q.probabilities();
    if (pp.size() != qq.size()) {
      raise(Errc::invalid_config, "pmf alphabets must match");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < pp.size(); ++j) {
      if (pp[j] <= 0.0) continue;
      if (qq[j] <= 0.0) {
        raise(Errc::support_violation, "q vanishes where p does not");
      }
      sum += pp[j] * std::log(pp[j] / qq[j]);
    }
    return std::max(sum, 0.0);
  }
  if (p.family() == Family::gaussian && q.family() == Family::gaussian) {
    const double vp = p.variance_param();
    const double vq = q.variance_param();
    const double dm = p.mean() - q.mean();
    return 0.5 * (std::log(vq / vp) + (vp + dm * dm) / vq - 1.0);
  }
  if (p.family() == Family::laplace && q.family() == Family::laplace &&
      p.scale() == q.scale()) {
    const double r = std::abs(p.location() - q.location()) / p.scale();
    return r + std::exp(-r) - 1.0;
  }
  const double value = expectation_under(
      p, [&](double x) { return p.log_density(x) - q.log_density(x); },
      location_breakpoints({&p, &q}), 1e-12);
  return std::max(value, 0.0);
}

double expected_llr(const AgentModel& agent, int theta) {
  if (theta == 0) return 0.0;
  const DistributionModel f = agent.effective_signal();
  return kl_divergence(f, agent.likelihoods[theta]) -
         kl_divergence(f, agent.likelihoods[0]);
}

double llr_variance(const AgentModel& agent, int theta) {
  if (theta == 0) return 0.0;
  using Family = DistributionModel::Family;
  const DistributionModel f = agent.effective_signal();
  const DistributionModel& ref = agent.likelihoods[0];
  const DistributionModel& alt = agent.likelihoods[theta];

  if (f.family() == Family::gaussian && ref.family() == Family::gaussian &&
      alt.family() == Family::gaussian &&
      ref.variance_param() == alt.variance_param()) {
    // Equal-variance shift-in-mean model: the ratio is linear in the signal.
    const double slope = (ref.mean() - alt.mean()) / ref.variance_param();
    return slope * slope * f.variance_param();
  }
  if (f.discrete()) {
    const auto& probs = f.probabilities();
    double d = 0.0;
    std::vector<double> x(probs.size(), 0.0);
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (probs[j] <= 0.0) continue;
      const double lr = ref.log_density(static_cast<double>(j));
      const double la = alt.log_density(static_cast<double>(j));
      if (!std::isfinite(lr) || !std::isfinite(la)) {
        raise(Errc::support_violation, "likelihood vanishes on the support");
      }
      x[j] = lr - la;
      d += probs[j] * x[j];
    }
    double var = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (probs[j] > 0.0) var += probs[j] * (x[j] - d) * (x[j] - d);
    }
    return var;
  }
  const double d = expected_llr(agent, theta);
  auto centered = [&](double xi) {
    const double x = ref.log_density(xi) - alt.log_density(xi);
    return (x - d) * (x - d);
  };
  const double var = expectation_under(
      f, centered, location_breakpoints({&f, &ref, &alt}), 1e-12);
  return std::max(var, 0.0);
}

double sample_signal(const AgentModel& agent, RandomStream& rng) {
  double xi = agent.signal.sample(rng);
  if (agent.noise_variance > 0.0) {
    xi += std::sqrt(agent.noise_variance) * rng.gaussian();
  }
  return xi;
}

std::vector<int> local_truth_set(const AgentModel& agent, double tol) {
  const DistributionModel f = agent.effective_signal();
  std::vector<double> kls(agent.likelihoods.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < agent.likelihoods.size(); ++h) {
    kls[h] = kl_divergence(f, agent.likelihoods[h]);
    best = std::min(best, kls[h]);
  }
  std::vector<int> result;
  for (std::size_t h = 0; h < kls.size(); ++h) {
    if (kls[h] <= best + tol) result.push_back(static_cast<int>(h));
  }
  return result;
}

}  // namespace asl
