#include "asl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "asl/error.hpp"

namespace asl {
namespace {

// Precomputed log-likelihood ratio x_k(theta) as a function of the signal.
struct LlrFn {
  enum class Kind { quadratic, abs_diff, table, generic };
  Kind kind = Kind::generic;
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;        // quadratic in xi
  double a_ref = 0.0, b_ref_inv = 1.0;        // abs_diff parameters
  double a_alt = 0.0, b_alt_inv = 1.0, c = 0.0;
  std::vector<double> tab;                    // per-symbol values
  DistributionModel ref = DistributionModel::gaussian(0.0, 1.0);
  DistributionModel alt = DistributionModel::gaussian(0.0, 1.0);

  double operator()(double xi) const {
    switch (kind) {
      case Kind::quadratic:
        return q0 + xi * (q1 + xi * q2);
      case Kind::abs_diff:
        return std::abs(xi - a_alt) * b_alt_inv -
               std::abs(xi - a_ref) * b_ref_inv + c;
      case Kind::table:
        return tab[static_cast<std::size_t>(xi)];
      case Kind::generic:
        return ref.log_density(xi) - alt.log_density(xi);
    }
    return 0.0;
  }
};

LlrFn make_llr(const DistributionModel& ref, const DistributionModel& alt) {
  using Family = DistributionModel::Family;
  LlrFn fn;
  if (ref.family() == Family::gaussian && alt.family() == Family::gaussian) {
    const double v0 = ref.variance_param();
    const double v1 = alt.variance_param();
    const double m0 = ref.mean();
    const double m1 = alt.mean();
    fn.kind = LlrFn::Kind::quadratic;
    fn.q2 = 0.5 * (1.0 / v1 - 1.0 / v0);
    fn.q1 = m0 / v0 - m1 / v1;
    fn.q0 = 0.5 * std::log(v1 / v0) + 0.5 * (m1 * m1 / v1 - m0 * m0 / v0);
  } else if (ref.family() == Family::laplace &&
             alt.family() == Family::laplace) {
    fn.kind = LlrFn::Kind::abs_diff;
    fn.a_ref = ref.location();
    fn.b_ref_inv = 1.0 / ref.scale();
    fn.a_alt = alt.location();
    fn.b_alt_inv = 1.0 / alt.scale();
    fn.c = std::log(alt.scale() / ref.scale());
  } else if (ref.discrete() && alt.discrete()) {
    fn.kind = LlrFn::Kind::table;
    const std::size_t size = ref.probabilities().size();
    fn.tab.resize(size);
    for (std::size_t j = 0; j < size; ++j) {
      fn.tab[j] = ref.log_density(static_cast<double>(j)) -
                  alt.log_density(static_cast<double>(j));
    }
  } else {
    fn.kind = LlrFn::Kind::generic;
    fn.ref = ref;
    fn.alt = alt;
  }
  return fn;
}

struct SignalSampler {
  DistributionModel dist = DistributionModel::gaussian(0.0, 1.0);
  double sample(RandomStream& rng) const { return dist.sample(rng); }
};

// Signal distribution for a given scheduled truth: the configured signal
// model under the reference truth, the truth-conditioned likelihood
// otherwise, with measurement noise folded in either way.
DistributionModel signal_for_truth(const AgentModel& agent, int truth) {
  if (truth == 0) return agent.effective_signal();
  const DistributionModel& base = agent.likelihoods[truth];
  if (agent.noise_variance <= 0.0) return base;
  return DistributionModel::gaussian(base.mean(),
                                     base.variance_param() + agent.noise_variance);
}

struct SimPlan {
  int n = 0;
  int H = 0;
  std::vector<double> a_transposed;          // [k*n + l] = A(l, k)
  std::vector<LlrFn> llr;                    // [k*(H-1) + theta-1]
  std::vector<SignalSampler> samplers;       // [truth*n + k]
  std::vector<double> initial;               // [k*(H-1) + theta-1]
};

SimPlan build_plan(const std::vector<AgentModel>& agents,
                   const CombinationMatrix& A, const SimulationConfig& cfg) {
  SimPlan plan;
  plan.n = static_cast<int>(agents.size());
  plan.H = static_cast<int>(agents.front().likelihoods.size());
  plan.a_transposed.resize(static_cast<std::size_t>(plan.n) * plan.n);
  for (int k = 0; k < plan.n; ++k) {
    for (int l = 0; l < plan.n; ++l) {
      plan.a_transposed[static_cast<std::size_t>(k) * plan.n + l] = A.at(l, k);
    }
  }
  plan.llr.reserve(static_cast<std::size_t>(plan.n) * (plan.H - 1));
  for (const AgentModel& agent : agents) {
    for (int theta = 1; theta < plan.H; ++theta) {
      plan.llr.push_back(make_llr(agent.likelihoods[0], agent.likelihoods[theta]));
    }
  }
  plan.samplers.resize(static_cast<std::size_t>(plan.H) * plan.n);
  for (int truth = 0; truth < plan.H; ++truth) {
    for (int k = 0; k < plan.n; ++k) {
      plan.samplers[static_cast<std::size_t>(truth) * plan.n + k].dist =
          signal_for_truth(agents[k], truth);
    }
  }
  plan.initial.assign(static_cast<std::size_t>(plan.n) * (plan.H - 1), 0.0);
  if (!cfg.initial_lambda.empty()) {
    for (int k = 0; k < plan.n; ++k) {
      for (int t = 0; t + 1 < plan.H; ++t) {
        plan.initial[static_cast<std::size_t>(k) * (plan.H - 1) + t] =
            cfg.initial_lambda[k][t];
      }
    }
  }
  return plan;
}

// Error event per the lambda <= 0 convention: some wrong hypothesis is
// believed at least as much as the scheduled truth. Ties count as errors.
bool is_error(const double* lambda, int H, int truth) {
  const double truth_level = (truth == 0) ? 0.0 : lambda[truth - 1];
  if (truth != 0 && 0.0 <= truth_level) return true;
  for (int theta = 1; theta < H; ++theta) {
    if (theta == truth) continue;
    if (lambda[theta - 1] <= truth_level) return true;
  }
  return false;
}

int decision_of(const double* lambda, int H) {
  int best = 0;
  double best_level = 0.0;
  for (int theta = 1; theta < H; ++theta) {
    if (lambda[theta - 1] < best_level) {
      best_level = lambda[theta - 1];
      best = theta;
    }
  }
  return best;
}

// Runs one replication, invoking sink(step, lambda_flat, truth) after every
// combination step. lambda is indexed [k*(H-1) + theta-1].
template <typename Sink>
void run_core(const SimPlan& plan, const SimulationConfig& cfg,
              int replication, Sink&& sink) {
  const int n = plan.n;
  const int H = plan.H;
  const int width = H - 1;
  const double delta = cfg.delta;

  std::vector<RandomStream> streams;
  streams.reserve(n);
  for (int k = 0; k < n; ++k) {
    streams.emplace_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(replication),
                                     static_cast<std::uint64_t>(k)));
  }

  std::vector<double> lambda = plan.initial;
  std::vector<double> nu(lambda.size(), 0.0);
  std::vector<double> next(lambda.size(), 0.0);

  std::size_t schedule_pos = 0;
  int truth = cfg.schedule.front().truth;
  for (int i = 1; i <= cfg.horizon; ++i) {
    while (schedule_pos < cfg.schedule.size() &&
           cfg.schedule[schedule_pos].step <= i) {
      truth = cfg.schedule[schedule_pos].truth;
      ++schedule_pos;
    }
    const SignalSampler* samplers = &plan.samplers[static_cast<std::size_t>(truth) * n];
    for (int k = 0; k < n; ++k) {
      const double xi = samplers[k].sample(streams[k]);
      const LlrFn* llr = &plan.llr[static_cast<std::size_t>(k) * width];
      double* nu_k = &nu[static_cast<std::size_t>(k) * width];
      const double* lambda_k = &lambda[static_cast<std::size_t>(k) * width];
      for (int t = 0; t < width; ++t) {
        nu_k[t] = (1.0 - delta) * lambda_k[t] + delta * llr[t](xi);
      }
    }
    for (int k = 0; k < n; ++k) {
      const double* weights = &plan.a_transposed[static_cast<std::size_t>(k) * n];
      double* out = &next[static_cast<std::size_t>(k) * width];
      for (int t = 0; t < width; ++t) out[t] = 0.0;
      for (int l = 0; l < n; ++l) {
        const double w = weights[l];
        if (w == 0.0) continue;
        const double* nu_l = &nu[static_cast<std::size_t>(l) * width];
        for (int t = 0; t < width; ++t) out[t] += w * nu_l[t];
      }
    }
    lambda.swap(next);
    sink(i, lambda.data(), truth);
  }
}

std::vector<int> recorded_steps(const SimulationConfig& cfg) {
  int stride = cfg.record_stride;
  if (stride <= 0) stride = (cfg.horizon <= 5000) ? 1 : cfg.horizon / 5000;
  std::vector<int> steps;
  for (int i = 0; i <= cfg.horizon; i += stride) steps.push_back(i);
  if (steps.back() != cfg.horizon) steps.push_back(cfg.horizon);
  return steps;
}

}  // namespace

void validate_config(const SimulationConfig& cfg, int num_agents,
                     int num_hypotheses) {
  if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) {
    raise(Errc::invalid_config, "step-size delta must lie in (0, 1)");
  }
  if (cfg.horizon < 0) raise(Errc::invalid_config, "horizon must be >= 0");
  if (cfg.replications < 1) {
    raise(Errc::invalid_config, "replications must be >= 1");
  }
  if (cfg.schedule.empty() || cfg.schedule.front().step != 0) {
    raise(Errc::invalid_config, "truth schedule must start at step 0");
  }
  int prev = -1;
  for (const TruthChange& change : cfg.schedule) {
    if (change.step <= prev) {
      raise(Errc::invalid_config, "truth schedule steps must increase");
    }
    if (change.truth < 0 || change.truth >= num_hypotheses) {
      raise(Errc::invalid_config, "scheduled truth out of range");
    }
    prev = change.step;
  }
  if (!cfg.initial_lambda.empty()) {
    if (static_cast<int>(cfg.initial_lambda.size()) != num_agents) {
      raise(Errc::invalid_config, "initial beliefs need one row per agent");
    }
    for (const auto& row : cfg.initial_lambda) {
      if (static_cast<int>(row.size()) != num_hypotheses - 1) {
        raise(Errc::invalid_config, "initial belief rows need H-1 entries");
      }
    }
  }
  if (cfg.threads < 0) raise(Errc::invalid_config, "threads must be >= 0");
}

BeliefState BeliefState::uniform(int num_agents, int num_hypotheses) {
  BeliefState state;
  state.lambda.assign(num_agents, std::vector<double>(num_hypotheses - 1, 0.0));
  return state;
}

std::vector<std::vector<double>> BeliefState::beliefs() const {
  std::vector<std::vector<double>> out;
  out.reserve(lambda.size());
  for (const auto& row : lambda) {
    const int H = static_cast<int>(row.size()) + 1;
    std::vector<double> log_mu(H, 0.0);
    for (int theta = 1; theta < H; ++theta) log_mu[theta] = -row[theta - 1];
    const double peak = *std::max_element(log_mu.begin(), log_mu.end());
    double norm = 0.0;
    for (double v : log_mu) norm += std::exp(v - peak);
    const double log_norm = peak + std::log(norm);
    std::vector<double> mu(H);
    for (int h = 0; h < H; ++h) mu[h] = std::exp(log_mu[h] - log_norm);
    out.push_back(std::move(mu));
  }
  return out;
}

BeliefState asl_step(const BeliefState& state,
                     const std::vector<double>& signals,
                     const std::vector<AgentModel>& agents,
                     const CombinationMatrix& A, double delta) {
  const int n = static_cast<int>(agents.size());
  const int H = static_cast<int>(agents.front().likelihoods.size());
  std::vector<std::vector<double>> nu(n, std::vector<double>(H - 1, 0.0));
  for (int k = 0; k < n; ++k) {
    for (int theta = 1; theta < H; ++theta) {
      const double x = log_likelihood_ratio(agents[k], theta, signals[k]);
      nu[k][theta - 1] = (1.0 - delta) * state.lambda[k][theta - 1] + delta * x;
    }
  }
  BeliefState next = BeliefState::uniform(n, H);
  for (int k = 0; k < n; ++k) {
    for (int theta = 1; theta < H; ++theta) {
      double acc = 0.0;
      for (int l = 0; l < n; ++l) acc += A.at(l, k) * nu[l][theta - 1];
      next.lambda[k][theta - 1] = acc;
    }
  }
  return next;
}

std::vector<std::vector<double>> asl_step_beliefs(
    const std::vector<std::vector<double>>& beliefs,
    const std::vector<double>& signals, const std::vector<AgentModel>& agents,
    const CombinationMatrix& A, double delta) {
  const int n = static_cast<int>(agents.size());
  const int H = static_cast<int>(agents.front().likelihoods.size());
  // Adaptation in log space: log psi = (1-delta) log mu + delta log L - lse.
  std::vector<std::vector<double>> log_psi(n, std::vector<double>(H, 0.0));
  for (int k = 0; k < n; ++k) {
    std::vector<double> raw(H);
    for (int h = 0; h < H; ++h) {
      raw[h] = (1.0 - delta) * std::log(beliefs[k][h]) +
               delta * agents[k].likelihoods[h].log_density(signals[k]);
    }
    const double peak = *std::max_element(raw.begin(), raw.end());
    double norm = 0.0;
    for (double v : raw) norm += std::exp(v - peak);
    const double log_norm = peak + std::log(norm);
    for (int h = 0; h < H; ++h) log_psi[k][h] = raw[h] - log_norm;
  }
  std::vector<std::vector<double>> out(n, std::vector<double>(H, 0.0));
  for (int k = 0; k < n; ++k) {
    std::vector<double> raw(H, 0.0);
    for (int h = 0; h < H; ++h) {
      for (int l = 0; l < n; ++l) raw[h] += A.at(l, k) * log_psi[l][h];
    }
    const double peak = *std::max_element(raw.begin(), raw.end());
    double norm = 0.0;
    for (double v : raw) norm += std::exp(v - peak);
    const double log_norm = peak + std::log(norm);
    for (int h = 0; h < H; ++h) out[k][h] = std::exp(raw[h] - log_norm);
  }
  return out;
}

ReplicationTrajectory run_replication(const std::vector<AgentModel>& agents,
                                      const CombinationMatrix& A,
                                      const SimulationConfig& cfg,
                                      int replication_index) {
  const int n = static_cast<int>(agents.size());
  const int H = static_cast<int>(agents.front().likelihoods.size());
  validate_config(cfg, n, H);
  const SimPlan plan = build_plan(agents, A, cfg);

  ReplicationTrajectory traj;
  traj.steps.reserve(cfg.horizon);
  run_core(plan, cfg, replication_index, [&](int step, const double* lambda, int truth) {
    traj.steps.push_back(step);
    std::vector<std::vector<double>> snapshot(n, std::vector<double>(H - 1));
    std::vector<int> decisions(n);
    std::vector<std::uint8_t> errors(n);
    for (int k = 0; k < n; ++k) {
      const double* row = lambda + static_cast<std::size_t>(k) * (H - 1);
      for (int t = 0; t + 1 < H; ++t) snapshot[k][t] = row[t];
      decisions[k] = decision_of(row, H);
      errors[k] = is_error(row, H, truth) ? 1 : 0;
    }
    traj.lambda.push_back(std::move(snapshot));
    traj.decision.push_back(std::move(decisions));
    traj.error.push_back(std::move(errors));
  });
  return traj;
}

double ErrorCurve::standard_error(double p, int replications) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / replications);
}

ErrorCurve estimate_error_prob(const std::vector<AgentModel>& agents,
                               const CombinationMatrix& A,
                               const SimulationConfig& cfg) {
  const int n = static_cast<int>(agents.size());
  const int H = static_cast<int>(agents.front().likelihoods.size());
  validate_config(cfg, n, H);
  const SimPlan plan = build_plan(agents, A, cfg);
  const std::vector<int> steps = recorded_steps(cfg);

  std::vector<int> record_index(cfg.horizon + 1, -1);
  for (std::size_t idx = 0; idx < steps.size(); ++idx) {
    record_index[steps[idx]] = static_cast<int>(idx);
  }

  int num_threads = cfg.threads > 0
                        ? cfg.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
  num_threads = std::clamp(num_threads, 1, std::max(1, cfg.replications));

  const std::size_t cells = steps.size() * static_cast<std::size_t>(n);
  std::vector<std::vector<std::int64_t>> counts(
      num_threads, std::vector<std::int64_t>(cells, 0));
  std::vector<double> terminal;
  if (cfg.collect_terminal_lambda) {
    terminal.assign(static_cast<std::size_t>(cfg.replications) * n * (H - 1), 0.0);
  }

  const int initial_truth = cfg.schedule.front().truth;
  auto worker = [&](int tid, int rep_begin, int rep_end) {
    std::vector<std::int64_t>& local = counts[tid];
    for (int rep = rep_begin; rep < rep_end; ++rep) {
      // Initial state counts as recorded step 0.
      for (int k = 0; k < n; ++k) {
        const double* row = plan.initial.data() + static_cast<std::size_t>(k) * (H - 1);
        if (is_error(row, H, initial_truth)) {
          local[static_cast<std::size_t>(k)] += 1;
        }
      }
      run_core(plan, cfg, rep, [&](int step, const double* lambda, int truth) {
        const int idx = record_index[step];
        if (idx >= 0) {
          const std::size_t base = static_cast<std::size_t>(idx) * n;
          for (int k = 0; k < n; ++k) {
            const double* row = lambda + static_cast<std::size_t>(k) * (H - 1);
            if (is_error(row, H, truth)) local[base + k] += 1;
          }
        }
        if (step == cfg.horizon && cfg.collect_terminal_lambda) {
          std::copy(lambda, lambda + static_cast<std::size_t>(n) * (H - 1),
                    terminal.begin() +
                        static_cast<std::size_t>(rep) * n * (H - 1));
        }
      });
    }
  };

  if (num_threads == 1) {
    worker(0, 0, cfg.replications);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < num_threads; ++tid) {
      const int begin = static_cast<int>(
          static_cast<std::int64_t>(cfg.replications) * tid / num_threads);
      const int end = static_cast<int>(
          static_cast<std::int64_t>(cfg.replications) * (tid + 1) / num_threads);
      pool.emplace_back(worker, tid, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  ErrorCurve curve;
  curve.steps = steps;
  curve.replications = cfg.replications;
  curve.p_agent.assign(steps.size(), std::vector<double>(n, 0.0));
  curve.p_ave.assign(steps.size(), 0.0);
  for (std::size_t idx = 0; idx < steps.size(); ++idx) {
    double ave = 0.0;
    for (int k = 0; k < n; ++k) {
      std::int64_t total = 0;
      for (int tid = 0; tid < num_threads; ++tid) {
        total += counts[tid][idx * n + k];
      }
      curve.p_agent[idx][k] = static_cast<double>(total) / cfg.replications;
      ave += curve.p_agent[idx][k];
    }
    curve.p_ave[idx] = ave / n;
  }

  if (cfg.collect_terminal_lambda) {
    curve.terminal_lambda_mean.assign(n, std::vector<double>(H - 1, 0.0));
    curve.terminal_lambda_stddev.assign(n, std::vector<double>(H - 1, 0.0));
    for (int k = 0; k < n; ++k) {
      for (int t = 0; t + 1 < H; ++t) {
        double mean = 0.0;
        for (int rep = 0; rep < cfg.replications; ++rep) {
          mean += terminal[static_cast<std::size_t>(rep) * n * (H - 1) +
                           static_cast<std::size_t>(k) * (H - 1) + t];
        }
        mean /= cfg.replications;
        double ss = 0.0;
        for (int rep = 0; rep < cfg.replications; ++rep) {
          const double v =
              terminal[static_cast<std::size_t>(rep) * n * (H - 1) +
                       static_cast<std::size_t>(k) * (H - 1) + t] -
              mean;
          ss += v * v;
        }
        curve.terminal_lambda_mean[k][t] = mean;
        curve.terminal_lambda_stddev[k][t] =
            (cfg.replications > 1) ? std::sqrt(ss / (cfg.replications - 1)) : 0.0;
      }
    }
  }
  return curve;
}

SteadyStateResult steady_state_error(const std::vector<AgentModel>& agents,
                                     const CombinationMatrix& A,
                                     const SimulationConfig& cfg) {
  SteadyStateResult result;
  result.curve = estimate_error_prob(agents, A, cfg);
  result.p_agent = result.curve.terminal_p_agent();
  result.p_ave = result.curve.terminal_p_ave();
  result.horizon_warning =
      std::pow(1.0 - cfg.delta, cfg.horizon) >= 1e-3;
  return result;
}

double adaptation_time_theory(double omega, double delta) {
  if (!(omega > 0.0) || omega > 1.0 || !(delta > 0.0) || !(delta < 1.0)) {
    raise(Errc::domain_error, "omega must be in (0,1] and delta in (0,1)");
  }
  return std::log(1.0 - std::sqrt(1.0 - omega)) / std::log(1.0 - delta);
}

int adaptation_time_simulated(const ErrorCurve& curve, double omega,
                              double steady_state_p) {
  if (curve.steps.empty()) raise(Errc::domain_error, "empty curve");
  if (!(omega > 0.0) || !(omega < 1.0)) {
    raise(Errc::domain_error, "omega must be in (0,1)");
  }
  const double p_ss =
      (steady_state_p >= 0.0) ? steady_state_p : curve.terminal_p_ave();
  if (p_ss >= 1.0) raise(Errc::domain_error, "steady-state probability >= 1");
  // log p_i <= (1-omega) log p_ss, compared in probability space.
  const double threshold = std::pow(p_ss, 1.0 - omega);
  int last_violation = -1;
  for (std::size_t idx = 0; idx < curve.steps.size(); ++idx) {
    if (curve.p_ave[idx] > threshold) last_violation = static_cast<int>(idx);
  }
  if (last_violation < 0) return curve.steps.front();
  if (last_violation + 1 >= static_cast<int>(curve.steps.size())) {
    raise(Errc::not_reached, "curve never settles below the threshold");
  }
  return curve.steps[last_violation + 1];
}

double eta(double delta, int i) {
  const double decay = 1.0 - std::pow(1.0 - delta, i);
  return decay * decay;
}

}  // namespace asl
