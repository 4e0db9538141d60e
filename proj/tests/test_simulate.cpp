#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "asl/error.hpp"
#include "asl/exponent.hpp"
#include "asl/simulate.hpp"
#include "fixtures.hpp"

using namespace asl;

namespace {

CombinationMatrix single_agent_matrix() {
  CombinationMatrix m = CombinationMatrix::zero(1);
  m.at(0, 0) = 1.0;
  return m;
}

// Strongly informative accurate Gaussian agent with Phi^nc = shift^2 / 4.
AgentModel strong_agent(double shift) {
  AgentModel agent;
  agent.likelihoods = {DistributionModel::gaussian(0.0, 1.0),
                       DistributionModel::gaussian(shift, 1.0)};
  agent.signal = agent.likelihoods[0];
  return agent;
}

}  // namespace

TEST_CASE("asl_step with zero step-size leaves the state unchanged") {
  const auto agents = testing::mismatched_gaussian_agents();
  RandomStream rng(5);
  Adjacency adj = complete_adjacency(4);
  const CombinationMatrix A = gen_left_stochastic(adj, rng);
  BeliefState state = BeliefState::uniform(4, 2);
  for (auto& row : state.lambda) {
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
  }
  std::vector<double> signals(4);
  for (auto& s : signals) s = rng.gaussian();
  const BeliefState next = asl_step(state, signals, agents, A, 0.0);
  for (int k = 0; k < 4; ++k) {
    // delta = 0 makes the adaptation a no-op; combining mixes the unchanged
    // log-ratios, so compare against A^T lambda.
    double acc = 0.0;
    for (int l = 0; l < 4; ++l) acc += A.at(l, k) * state.lambda[l][0];
    CHECK(next.lambda[k][0] == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("single agent reduces to the non-cooperative recursion") {
  const AgentModel agent = strong_agent(0.5);
  const CombinationMatrix A = single_agent_matrix();
  RandomStream rng(9);
  BeliefState state = BeliefState::uniform(1, 2);
  double lambda = 0.0;
  const double delta = 0.2;
  for (int i = 0; i < 50; ++i) {
    const double xi = sample_signal(agent, rng);
    const double x = log_likelihood_ratio(agent, 1, xi);
    lambda = (1.0 - delta) * lambda + delta * x;
    state = asl_step(state, {xi}, {agent}, A, delta);
    CHECK(state.lambda[0][0] == doctest::Approx(lambda).epsilon(1e-13));
  }
}

TEST_CASE("log-ratio and belief-space implementations agree per step") {
  const auto agents = testing::mismatched_gaussian_agents();
  RandomStream rng(13);
  Adjacency adj = complete_adjacency(4);
  const CombinationMatrix A = gen_left_stochastic(adj, rng);
  const double delta = 0.15;

  BeliefState state = BeliefState::uniform(4, 2);
  std::vector<std::vector<double>> beliefs = state.beliefs();
  for (int step = 0; step < 40; ++step) {
    std::vector<double> signals(4);
    for (int k = 0; k < 4; ++k) signals[k] = sample_signal(agents[k], rng);
    state = asl_step(state, signals, agents, A, delta);
    beliefs = asl_step_beliefs(beliefs, signals, agents, A, delta);
    for (int k = 0; k < 4; ++k) {
      const double lambda_from_beliefs =
          std::log(beliefs[k][0]) - std::log(beliefs[k][1]);
      CHECK(std::abs(state.lambda[k][0] - lambda_from_beliefs) <= 1e-9);
    }
  }
}

TEST_CASE("run_replication basics") {
  const auto agents = testing::mismatched_gaussian_agents();
  RandomStream rng(31);
  const CombinationMatrix A = gen_left_stochastic(complete_adjacency(4), rng);

  SimulationConfig cfg;
  cfg.delta = 0.05;
  cfg.horizon = 0;
  cfg.replications = 1;
  cfg.seed = 7;
  CHECK(run_replication(agents, A, cfg, 0).steps.empty());

  cfg.horizon = 25;
  const ReplicationTrajectory a = run_replication(agents, A, cfg, 3);
  const ReplicationTrajectory b = run_replication(agents, A, cfg, 3);
  CHECK(a.lambda == b.lambda);
  CHECK(a.decision == b.decision);
  const ReplicationTrajectory c = run_replication(agents, A, cfg, 4);
  CHECK(a.lambda != c.lambda);
}

TEST_CASE("estimate_error_prob is independent of the thread count") {
  const auto agents = testing::noisy_gaussian_agents();
  RandomStream rng(77);
  const CombinationMatrix A =
      gen_left_stochastic(gen_erdos_renyi(10, 0.5, rng), rng);
  SimulationConfig cfg;
  cfg.delta = 0.05;
  cfg.horizon = 60;
  cfg.replications = 400;
  cfg.seed = 123;
  cfg.collect_terminal_lambda = true;

  cfg.threads = 1;
  const ErrorCurve serial = estimate_error_prob(agents, A, cfg);
  cfg.threads = 2;
  const ErrorCurve parallel = estimate_error_prob(agents, A, cfg);
  CHECK(serial.p_agent == parallel.p_agent);
  CHECK(serial.p_ave == parallel.p_ave);
  CHECK(serial.terminal_lambda_mean == parallel.terminal_lambda_mean);
  CHECK(serial.terminal_lambda_stddev == parallel.terminal_lambda_stddev);
}

TEST_CASE("initial-state ties count as errors under uniform beliefs") {
  const auto agents = testing::mismatched_gaussian_agents();
  RandomStream rng(3);
  const CombinationMatrix A = gen_left_stochastic(complete_adjacency(4), rng);
  SimulationConfig cfg;
  cfg.delta = 0.1;
  cfg.horizon = 5;
  cfg.replications = 50;
  cfg.seed = 11;
  const ErrorCurve curve = estimate_error_prob(agents, A, cfg);
  CHECK(curve.steps.front() == 0);
  CHECK(curve.p_ave.front() == 1.0);
  CHECK(ErrorCurve::standard_error(curve.p_ave.front(), 50) == 0.0);
}

TEST_CASE("all-uninformative network never leaves the tie state") {
  // Identical likelihoods for both hypotheses: log-ratios stay at zero, and
  // the lambda <= 0 error convention counts every step as an error.
  AgentModel silent;
  silent.signal = DistributionModel::gaussian(0.0, 1.0);
  silent.likelihoods = {DistributionModel::gaussian(0.1, 1.0),
                        DistributionModel::gaussian(0.1, 1.0)};
  RandomStream rng(21);
  const CombinationMatrix A = gen_left_stochastic(complete_adjacency(3), rng);
  SimulationConfig cfg;
  cfg.delta = 0.1;
  cfg.horizon = 30;
  cfg.replications = 20;
  cfg.seed = 5;
  const ErrorCurve curve =
      estimate_error_prob({silent, silent, silent}, A, cfg);
  for (double p : curve.p_ave) CHECK(p == 1.0);
}

TEST_CASE("strong model at large step-size settles well below one half") {
  const AgentModel agent = strong_agent(2.0);
  SimulationConfig cfg;
  cfg.delta = 0.5;
  cfg.horizon = 60;
  cfg.replications = 2000;
  cfg.seed = 17;
  const SteadyStateResult result =
      steady_state_error({agent}, single_agent_matrix(), cfg);
  CHECK_FALSE(result.horizon_warning);
  CHECK(result.p_ave < 0.5);

  SimulationConfig short_run = cfg;
  short_run.horizon = 4;
  CHECK(steady_state_error({agent}, single_agent_matrix(), short_run)
            .horizon_warning);
}

TEST_CASE("standard error matches the binomial formula") {
  CHECK(ErrorCurve::standard_error(0.25, 400) ==
        doctest::Approx(std::sqrt(0.25 * 0.75 / 400)).epsilon(1e-15));
}

TEST_CASE("non-cooperative slope and monotone steady state over the grid") {
  // Phi^nc = 0.05; the fitted LDP slope over delta in {0.05, 0.02, 0.01}
  // carries the usual sub-exponential bias but stays within 30%.
  const AgentModel agent = strong_agent(0.4472135954999579);
  const double phi_nc = 0.05;
  const std::vector<double> deltas = {0.05, 0.02, 0.01};
  std::vector<double> p_hat;
  for (double delta : deltas) {
    SimulationConfig cfg;
    cfg.delta = delta;
    cfg.horizon = static_cast<int>(std::ceil(7.0 / delta));
    cfg.replications = 200000;
    cfg.seed = 1234;
    const ErrorCurve curve =
        estimate_error_prob({agent}, single_agent_matrix(), cfg);
    p_hat.push_back(curve.terminal_p_ave());
  }
  // Monotone: larger delta, larger steady-state error (gaps here are far
  // wider than the binomial noise).
  CHECK(p_hat[0] > p_hat[1]);
  CHECK(p_hat[1] > p_hat[2]);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double x = 1.0 / deltas[i];
    const double y = -std::log(p_hat[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(deltas.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(std::abs(slope - phi_nc) / phi_nc < 0.30);
}

TEST_CASE("adaptation time approximations") {
  CHECK(adaptation_time_theory(0.5, 0.01) == doctest::Approx(122.18).epsilon(1e-3));
  CHECK(adaptation_time_theory(1.0, 0.3) == 0.0);
  CHECK_THROWS_AS(adaptation_time_theory(0.0, 0.01), Error);
  CHECK_THROWS_AS(adaptation_time_theory(0.5, 1.0), Error);

  // T grows like 1/delta for small delta.
  const double t1 = adaptation_time_theory(0.5, 0.01);
  const double t2 = adaptation_time_theory(0.5, 0.001);
  CHECK(t2 / t1 == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("simulated adaptation time scans the recorded curve") {
  ErrorCurve curve;
  curve.steps = {0, 1, 2, 3};
  curve.replications = 100;
  curve.p_agent.assign(4, {0.0});

  curve.p_ave = {0.005, 0.004, 0.004, 0.004};
  CHECK(adaptation_time_simulated(curve, 0.5) == 0);

  curve.p_ave = {1.0, 0.5, 0.08, 0.04};
  // threshold = 0.04^{0.5} = 0.2: first recorded step from which the curve
  // stays below is step 2.
  CHECK(adaptation_time_simulated(curve, 0.5) == 2);

  // Flat curve above an externally supplied steady state never settles.
  curve.p_ave = {0.9, 0.9, 0.9, 0.9};
  CHECK_THROWS_AS(adaptation_time_simulated(curve, 0.5, 0.04), Error);
}

TEST_CASE("eta ramp") {
  CHECK(eta(0.3, 0) == 0.0);
  CHECK(eta(0.01, 1000000) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(eta(0.01, 122) == doctest::Approx(0.499).epsilon(1e-3));
}

TEST_CASE("truth schedule switches the sampling distribution") {
  // Accurate binary agent; truth flips to theta_2 at step 30. After the
  // switch the log-ratio drifts negative, so the decision follows theta_2.
  const AgentModel agent = strong_agent(1.5);
  SimulationConfig cfg;
  cfg.delta = 0.2;
  cfg.horizon = 120;
  cfg.replications = 1;
  cfg.seed = 99;
  cfg.schedule = {{0, 0}, {30, 1}};
  const ReplicationTrajectory traj =
      run_replication({agent}, single_agent_matrix(), cfg, 0);
  CHECK(traj.decision.back()[0] == 1);
  CHECK(traj.error.back()[0] == 0);  // decision matches the scheduled truth
  // Early steps under truth theta_1 settle on theta_1.
  CHECK(traj.decision[25][0] == 0);
  CHECK(traj.error[25][0] == 0);
}

TEST_CASE("config validation rejects malformed setups") {
  const AgentModel agent = strong_agent(0.5);
  SimulationConfig cfg;
  cfg.delta = 0.0;
  CHECK_THROWS_AS(validate_config(cfg, 1, 2), Error);
  cfg.delta = 0.1;
  cfg.replications = 0;
  CHECK_THROWS_AS(validate_config(cfg, 1, 2), Error);
  cfg.replications = 1;
  cfg.schedule = {{5, 0}};
  CHECK_THROWS_AS(validate_config(cfg, 1, 2), Error);
  cfg.schedule = {{0, 3}};
  CHECK_THROWS_AS(validate_config(cfg, 1, 2), Error);
  cfg.schedule = {{0, 0}};
  cfg.initial_lambda = {{0.0, 0.0}};
  CHECK_THROWS_AS(validate_config(cfg, 1, 2), Error);
}
