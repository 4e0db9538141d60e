// Acceptance suite: end-to-end checks of the analysis pipeline against
// closed-form oracles and of the simulator against the theory, at fixed
// tolerances. Prints one PASS/FAIL line per criterion; the exit status is
// the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "asl/design.hpp"
#include "asl/error.hpp"
#include "asl/exponent.hpp"
#include "asl/matrix_io.hpp"
#include "asl/network.hpp"
#include "asl/numeric.hpp"
#include "asl/simulate.hpp"
#include "fixtures.hpp"

using namespace asl;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<double> dirichlet(RandomStream& rng, int n) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    w[k] = -std::log(rng.uniform01());
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Independent spreadsheet-style oracle for the noisy Gaussian benchmark:
// sum of (m1 - mt)^2 / (4 sigma^2 (1 + eps)) over the agents.
double gaussian_phi_sum_oracle(int theta) {
  struct Group {
    double m1, m2, m3, variance, eps;
    int count;
  };
  const Group groups[3] = {
      {0.0, 0.1, 0.1, 1.0, 1.0, 3},
      {0.2, 0.0, 0.2, 2.0, 0.1, 3},
      {0.3, 0.3, 0.0, 3.0, 3.3e-3, 4},
  };
  double sum = 0.0;
  for (const Group& g : groups) {
    const double mt = (theta == 1) ? g.m2 : g.m3;
    const double diff = g.m1 - mt;
    sum += g.count * diff * diff / (4.0 * g.variance * (1.0 + g.eps));
  }
  return sum;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

// ---------------------------------------------------------------------------

void criterion_1_design_reproduction(const EigenvectorDesign& design,
                                     double elapsed) {
  const double targets[3] = {0.0609, 0.1107, 0.1213};
  const int representative[3] = {0, 3, 6};
  bool pass = design.status == DesignStatus::optimal_upper_bound_achieved;
  double worst = 0.0;
  for (int g = 0; g < 3; ++g) {
    const double err = std::abs(design.pi[representative[g]] - targets[g]);
    worst = std::max(worst, err);
    pass = pass && err <= 5e-5;
  }
  // All agents in a group share the weight.
  for (int k = 0; k < 10; ++k) {
    const int g = (k < 3) ? 0 : (k < 6 ? 1 : 2);
    pass = pass && std::abs(design.pi[k] - design.pi[representative[g]]) <= 1e-12;
  }
  pass = pass && elapsed < 1.0;
  report(1, pass, "noisy Gaussian eigenvector design hits 0.0609/0.1107/0.1213",
         "max abs dev " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

void criterion_2_closed_form_vs_numeric(const EvaluatorTable& table,
                                        const EigenvectorDesign& design) {
  Timer timer;
  const double oracle2 = gaussian_phi_sum_oracle(1);
  const double oracle3 = gaussian_phi_sum_oracle(2);
  const double phi2 = theta_exponent(table, design.pi.weights, 1);
  const double phi3 = theta_exponent(table, design.pi.weights, 2);
  const double rel2 = std::abs(phi2 - oracle2) / oracle2;
  const double rel3 = std::abs(phi3 - oracle3) / oracle3;
  const bool pass = rel2 <= 1e-6 && rel3 <= 1e-6 && timer.seconds() < 1.0;
  report(2, pass, "quadrature+root pipeline matches the closed-form exponents",
         "rel err theta_2 " + fmt(rel2) + ", theta_3 " + fmt(rel3) + ", " +
             fmt(timer.seconds()) + " s");
}

void criterion_3_classification_example() {
  Timer timer;
  EvaluatorTable table(testing::mismatched_gaussian_agents(), 2);
  const ThetaClassification cls = classify_agents(table, 1);
  const bool sets_ok = cls.uninformative == std::vector<int>{3} &&
                       cls.informative == std::vector<int>{1} &&
                       cls.conflicting == std::vector<int>{0, 2};
  const double root_err = std::abs(cls.t_nc[1] + 3.0);
  const bool pass = sets_ok && root_err <= 1e-8 && timer.seconds() < 1.0;
  report(3, pass, "mismatched example classifies {4}/{2}/{1,3} with root -3",
         std::string("sets ") + (sets_ok ? "ok" : "wrong") + ", |t+3| = " +
             fmt(root_err) + ", " + fmt(timer.seconds()) + " s");
}

// Shared state between the simulation criteria.
struct SimulatedCurves {
  CombinationMatrix designed_matrix;
  ErrorCurve designed_delta001;  // delta = 0.01, horizon 2000, 1e5 reps
};

SimulatedCurves criterion_4_ldp_slope(const std::vector<AgentModel>& agents,
                                      const Adjacency& adjacency,
                                      const EigenvectorDesign& design,
                                      double phi_star) {
  Timer timer;
  SimulatedCurves shared;
  shared.designed_matrix = matrix_from_eigenvector(adjacency, design.pi);

  const std::vector<double> deltas = {0.05, 0.02, 0.01};
  std::vector<double> p_hat;
  std::string detail;
  for (double delta : deltas) {
    SimulationConfig cfg;
    cfg.delta = delta;
    cfg.horizon = 2000;
    cfg.replications = 100000;
    cfg.seed = 90210;
    const ErrorCurve curve =
        estimate_error_prob(agents, shared.designed_matrix, cfg);
    p_hat.push_back(curve.terminal_p_ave());
    detail += "p(" + fmt(delta) + ") = " + fmt(curve.terminal_p_ave()) + "; ";
    if (delta == 0.01) shared.designed_delta001 = curve;
  }

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
  const double rel = std::abs(slope - phi_star) / phi_star;
  const bool pass = rel <= 0.30;
  report(4, pass,
         "LDP slope of -ln(p_ave) vs 1/delta approximates Phi* within 30%",
         detail + "slope " + fmt(slope) + " vs Phi* " + fmt(phi_star) +
             " (rel " + fmt(rel) + "), " + fmt(timer.seconds()) + " s");
  return shared;
}

void criterion_5_cooperation_bounds() {
  Timer timer;
  EvaluatorTable gaussian(testing::noisy_gaussian_agents(), 3);
  EvaluatorTable laplace(testing::laplace_accurate_agents(10), 3);
  RandomStream rng(8888);
  bool pass = true;
  std::string note;
  for (const EvaluatorTable* table : {&gaussian, &laplace}) {
    double sum_min = 0.0;
    double min_sum = std::numeric_limits<double>::infinity();
    std::vector<ThetaClassification> cls;
    for (int theta = 1; theta < 3; ++theta) {
      cls.push_back(classify_agents(*table, theta));
      min_sum = std::min(min_sum, cls.back().phi_nc_sum);
    }
    for (int k = 0; k < table->num_agents(); ++k) {
      sum_min += std::min(cls[0].phi_nc[k], cls[1].phi_nc[k]);
    }
    if (sum_min > min_sum + 1e-12) {
      pass = false;
      note += "aggregate inequality violated; ";
    }
    int tested = 0;
    while (tested < 100) {
      const std::vector<double> pi = dirichlet(rng, 10);
      if (m_ave(*table, pi, 1) <= 1e-12 || m_ave(*table, pi, 2) <= 1e-12) {
        continue;
      }
      ++tested;
      for (int theta = 1; theta < 3; ++theta) {
        const double phi = theta_exponent(*table, pi, theta);
        if (phi < cls[theta - 1].phi_nc_min - 1e-9 ||
            phi > cls[theta - 1].phi_nc_sum + 1e-9) {
          pass = false;
          note += "bound violated at theta " + std::to_string(theta + 1) + "; ";
        }
      }
    }
  }
  pass = pass && timer.seconds() < 60.0;
  report(5, pass,
         "non-cooperative bounds hold for 100 random feasible eigenvectors",
         (note.empty() ? "all inside [min, sum]" : note) + ", " +
             fmt(timer.seconds()) + " s");
}

void criterion_6_uniform_optimality() {
  Timer timer;
  EvaluatorTable table(testing::laplace_accurate_agents(10), 3);
  const std::vector<double> uniform(10, 0.1);
  bool pass = true;
  std::string note;
  double uniform_phi = std::numeric_limits<double>::infinity();
  for (int theta = 1; theta < 3; ++theta) {
    const ThetaClassification cls = classify_agents(table, theta);
    const double phi = theta_exponent(table, uniform, theta);
    uniform_phi = std::min(uniform_phi, phi);
    const double rel = std::abs(phi - cls.phi_nc_sum) / cls.phi_nc_sum;
    note += "theta_" + std::to_string(theta + 1) + " rel " + fmt(rel) + "; ";
    pass = pass && rel <= 1e-6;
  }
  RandomStream rng(4242);
  int tested = 0;
  while (tested < 20) {
    std::vector<double> pi = dirichlet(rng, 10);
    double spread = 0.0;
    for (double w : pi) spread = std::max(spread, std::abs(w - 0.1));
    if (spread < 1e-3) continue;  // genuinely non-uniform draws only
    ++tested;
    const ExponentReport report_pi = error_exponent(table, pi);
    if (!(report_pi.feasible && report_pi.phi < uniform_phi)) {
      pass = false;
      note += "random pi matched uniform; ";
    }
  }
  pass = pass && timer.seconds() < 60.0;
  report(6, pass,
         "uniform eigenvector attains the aggregate bound on the accurate "
         "Laplace network",
         note + fmt(timer.seconds()) + " s");
}

void criterion_7_parabolic_accuracy(const Adjacency& adjacency) {
  Timer timer;
  EvaluatorTable table(testing::laplace_accurate_agents(10), 3);
  RandomStream rng(31337);
  std::vector<CombinationMatrix> matrices;
  matrices.push_back(uniform_averaging(adjacency));
  matrices.push_back(gen_left_stochastic(adjacency, rng));
  matrices.push_back(gen_left_stochastic(adjacency, rng));
  matrices.push_back(gen_doubly_stochastic(adjacency, rng));
  matrices.push_back(gen_doubly_stochastic(adjacency, rng));
  bool pass = true;
  double worst = 0.0;
  for (const CombinationMatrix& m : matrices) {
    const PerronVector pi = perron_eigenvector(m);
    for (int theta = 1; theta < 3; ++theta) {
      const double phi = theta_exponent(table, pi.weights, theta);
      const auto [t_hat, phi_hat] = parabolic_approx(table, pi.weights, theta);
      const double rel = std::abs(phi_hat - phi) / phi;
      worst = std::max(worst, rel);
      pass = pass && rel < 0.01;
    }
  }
  pass = pass && timer.seconds() < 10.0;
  report(7, pass, "parabolic exponent within 1% on the Laplace configuration",
         "worst rel gap " + fmt(worst) + ", " + fmt(timer.seconds()) + " s");
}

void criterion_8_adaptation_time(const std::vector<AgentModel>& agents,
                                 const Adjacency& adjacency,
                                 const SimulatedCurves& shared) {
  Timer timer;
  RandomStream rng(5150);
  std::vector<std::pair<std::string, CombinationMatrix>> matrices;
  matrices.emplace_back("left1", gen_left_stochastic(adjacency, rng));
  matrices.emplace_back("left2", gen_left_stochastic(adjacency, rng));
  matrices.emplace_back("doubly1", gen_doubly_stochastic(adjacency, rng));
  matrices.emplace_back("doubly2", gen_doubly_stochastic(adjacency, rng));
  matrices.emplace_back("designed", shared.designed_matrix);

  std::vector<ErrorCurve> curves;
  for (const auto& [name, matrix] : matrices) {
    if (name == "designed") {
      curves.push_back(shared.designed_delta001);
      continue;
    }
    SimulationConfig cfg;
    cfg.delta = 0.01;
    cfg.horizon = 2000;
    cfg.replications = 100000;
    cfg.seed = 90210;
    curves.push_back(estimate_error_prob(agents, matrix, cfg));
  }

  bool pass = true;
  std::string note;
  for (double omega : {0.3, 0.5, 0.7}) {
    const double theory = adaptation_time_theory(omega, 0.01);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double mean = 0.0;
    std::string row = "omega " + fmt(omega) + ": T " + fmt(theory) + ", i0 [";
    for (std::size_t m = 0; m < curves.size(); ++m) {
      const int i0 = adaptation_time_simulated(curves[m], omega);
      row += fmt(i0) + (m + 1 < curves.size() ? " " : "]");
      const double ratio = i0 / theory;
      if (std::abs(ratio - 1.0) > 0.30) pass = false;
      lo = std::min(lo, static_cast<double>(i0));
      hi = std::max(hi, static_cast<double>(i0));
      mean += i0;
    }
    mean /= curves.size();
    if (hi > 1.15 * mean || lo < 0.85 * mean) pass = false;
    note += row + "; ";
  }
  report(8, pass,
         "simulated adaptation times within 30% of theory and 15% of each other",
         note + fmt(timer.seconds()) + " s");
}

void criterion_9_consistency(const std::vector<AgentModel>& agents,
                             const Adjacency& adjacency) {
  Timer timer;
  const CombinationMatrix matrix = uniform_averaging(adjacency);
  const PerronVector pi = perron_eigenvector(matrix);
  EvaluatorTable table(agents, 3);

  SimulationConfig cfg;
  cfg.delta = 0.002;
  cfg.horizon = 5000;
  cfg.replications = 1000;
  cfg.seed = 777;
  cfg.collect_terminal_lambda = true;
  const ErrorCurve curve = estimate_error_prob(agents, matrix, cfg);

  bool pass = true;
  double worst_sigmas = 0.0;
  for (int theta = 1; theta < 3; ++theta) {
    const double target = m_ave(table, pi.weights, theta);
    for (int k = 0; k < 10; ++k) {
      const double mean = curve.terminal_lambda_mean[k][theta - 1];
      const double se = curve.terminal_lambda_stddev[k][theta - 1] /
                        std::sqrt(static_cast<double>(cfg.replications));
      const double sigmas = std::abs(mean - target) / se;
      worst_sigmas = std::max(worst_sigmas, sigmas);
      if (sigmas > 3.0) pass = false;
    }
  }
  pass = pass && timer.seconds() < 300.0;
  report(9, pass,
         "terminal log-belief ratios concentrate on m_ave (3 standard errors)",
         "worst deviation " + fmt(worst_sigmas) + " SE, " +
             fmt(timer.seconds()) + " s");
}

void criterion_10_oracle_equivalence() {
  Timer timer;
  bool pass = true;
  std::string note;

  // Brute force over a fine grid with naive summation and midpoint
  // integration, fully independent of the adaptive machinery.
  const AgentModel pmf_agent = testing::binary_pmf_agent();
  {
    EvaluatorTable table({pmf_agent}, 2);
    const double phi = theta_exponent(table, {1.0}, 1);
    const auto& probs = pmf_agent.signal.probabilities();
    std::vector<double> x(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
      x[j] = pmf_agent.likelihoods[0].log_density(static_cast<double>(j)) -
             pmf_agent.likelihoods[1].log_density(static_cast<double>(j));
    }
    auto lambda = [&](double t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < probs.size(); ++j) {
        acc += probs[j] * std::exp(t * x[j]);
      }
      return std::log(acc);
    };
    auto phi_mid = [&](double t) {
      const int intervals = 20000;
      const double h = t / intervals;
      double acc = 0.0;
      for (int i = 0; i < intervals; ++i) {
        const double mid = (i + 0.5) * h;
        acc += lambda(mid) / mid * h;
      }
      return acc;
    };
    double d = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      d += probs[j] * x[j];
      m2 += probs[j] * x[j] * x[j];
    }
    const double t_hat = -2.0 * d / (m2 - d * d);
    double best = 0.0;
    for (int i = 1; i <= 1500; ++i) {
      best = std::min(best, phi_mid(4.0 * t_hat * i / 1500));
    }
    const double brute = -best;
    note += "pmf |diff| " + fmt(std::abs(phi - brute)) + "; ";
    pass = pass && std::abs(phi - brute) <= 1e-6;
  }

  // Quadrature LMGF vs Monte Carlo for a Laplace agent at |t| <= 2.
  {
    const AgentModel agent = testing::laplace_accurate_agents(1)[0];
    EvaluatorTable table({agent}, 3);
    const LmgfEvaluator& eval = table.at(0, 1);
    RandomStream rng(97);
    double worst = 0.0;
    for (double t : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
      const int samples = 1000000;
      double sum = 0.0, sum_sq = 0.0;
      RandomStream local(rng.next_u64());
      for (int s = 0; s < samples; ++s) {
        const double e = std::exp(
            t * log_likelihood_ratio(agent, 1, sample_signal(agent, local)));
        sum += e;
        sum_sq += e * e;
      }
      const double mean = sum / samples;
      const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
      const double sigmas = std::abs(eval(t) - std::log(mean)) / (se / mean);
      worst = std::max(worst, sigmas);
      if (sigmas > 3.0) pass = false;
    }
    note += "LMGF worst " + fmt(worst) + " SE";
  }
  pass = pass && timer.seconds() < 60.0;
  report(10, pass, "independent oracles agree with the analysis pipeline",
         note + ", " + fmt(timer.seconds()) + " s");
}

}  // namespace

int main() {
  std::printf("adaptive social learning toolkit: acceptance suite\n");

  // Shared fixtures: the noisy Gaussian benchmark network.
  const std::vector<AgentModel> gaussian_agents = testing::noisy_gaussian_agents();
  RandomStream graph_rng(2024);
  const Adjacency adjacency = gen_erdos_renyi(10, 0.5, graph_rng);

  Timer design_timer;
  EvaluatorTable gaussian_table(gaussian_agents, 3);
  const EigenvectorDesign design = optimal_design(gaussian_table);
  const double design_elapsed = design_timer.seconds();

  criterion_1_design_reproduction(design, design_elapsed);
  criterion_2_closed_form_vs_numeric(gaussian_table, design);
  criterion_3_classification_example();
  const SimulatedCurves shared = criterion_4_ldp_slope(
      gaussian_agents, adjacency, design, gaussian_phi_sum_oracle(1));
  criterion_5_cooperation_bounds();
  criterion_6_uniform_optimality();
  criterion_7_parabolic_accuracy(adjacency);
  criterion_8_adaptation_time(gaussian_agents, adjacency, shared);
  criterion_9_consistency(gaussian_agents, adjacency);
  criterion_10_oracle_equivalence();

  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
