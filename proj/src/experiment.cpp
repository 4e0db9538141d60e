#include "asl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "asl/error.hpp"
#include "asl/exponent.hpp"
#include "asl/matrix_io.hpp"

namespace asl {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  raise(Errc::invalid_config, where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      config_error(where, "unknown key '" + it.key() + "'");
    }
  }
}

double require_number(const json& obj, const std::string& where,
                      const std::string& key) {
  if (!obj.contains(key)) config_error(where, "missing key '" + key + "'");
  if (!obj[key].is_number()) config_error(where, "'" + key + "' must be a number");
  return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& where,
                       const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_error(where, "'" + key + "' must be a number");
  return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& where,
                           const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    config_error(where, "missing string key '" + key + "'");
  }
  return obj[key].get<std::string>();
}

DistributionModel parse_distribution(const json& obj, const std::string& where) {
  if (!obj.is_object()) config_error(where, "distribution must be an object");
  reject_unknown_keys(obj, where,
                      {"family", "mean", "variance", "location", "scale",
                       "probabilities"});
  const std::string family = require_string(obj, where, "family");
  if (family == "gaussian") {
    return DistributionModel::gaussian(require_number(obj, where, "mean"),
                                       require_number(obj, where, "variance"));
  }
  if (family == "laplace") {
    return DistributionModel::laplace(require_number(obj, where, "location"),
                                      require_number(obj, where, "scale"));
  }
  if (family == "pmf") {
    if (!obj.contains("probabilities") || !obj["probabilities"].is_array()) {
      config_error(where, "pmf needs a 'probabilities' array");
    }
    return DistributionModel::finite_pmf(
        obj["probabilities"].get<std::vector<double>>());
  }
  config_error(where, "unknown family '" + family + "'");
}

json distribution_to_json(const DistributionModel& d) {
  json out;
  switch (d.family()) {
    case DistributionModel::Family::gaussian:
      out["family"] = "gaussian";
      out["mean"] = d.mean();
      out["variance"] = d.variance_param();
      break;
    case DistributionModel::Family::laplace:
      out["family"] = "laplace";
      out["location"] = d.location();
      out["scale"] = d.scale();
      break;
    case DistributionModel::Family::finite_pmf:
      out["family"] = "pmf";
      out["probabilities"] = d.probabilities();
      break;
  }
  return out;
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string delta_tag(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", delta);
  return buf;
}

// Minimal SVG polyline plot, log10 on the y axis.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label,
                    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
  constexpr int W = 640, Hpx = 420, ML = 70, MR = 20, MT = 40, MB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [name, pts] : series) {
    for (const auto& [x, y] : pts) {
      if (y <= 0.0) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto sx = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto sy = [&](double logy) {
    return Hpx - MB - (logy - ymin) / (ymax - ymin) * (Hpx - MT - MB);
  };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                          "#bcbd22", "#e377c2", "#000000"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
      << Hpx << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>"
      << title << "</text>\n";
  svg << "<text x='" << W / 2 << "' y='" << Hpx - 10
      << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
  svg << "<text x='15' y='" << Hpx / 2
      << "' font-size='12' transform='rotate(-90 15 " << Hpx / 2
      << ")' text-anchor='middle'>log10 probability</text>\n";
  svg << "<line x1='" << ML << "' y1='" << Hpx - MB << "' x2='" << W - MR
      << "' y2='" << Hpx - MB << "' stroke='black'/>\n";
  svg << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='"
      << Hpx - MB << "' stroke='black'/>\n";
  int idx = 0;
  for (const auto& [name, pts] : series) {
    std::ostringstream poly;
    for (const auto& [x, y] : pts) {
      if (y <= 0.0) continue;
      poly << sx(x) << "," << sy(std::log10(y)) << " ";
    }
    const char* color = colors[idx % 11];
    svg << "<polyline fill='none' stroke='" << color << "' points='"
        << poly.str() << "'/>\n";
    svg << "<text x='" << W - MR - 120 << "' y='" << MT + 16 * idx
        << "' font-size='11' fill='" << color << "'>" << name << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  std::ofstream out(path);
  if (!out) raise(Errc::invalid_config, "cannot write " + path);
  out << svg.str();
}

}  // namespace

std::string hypothesis_label(int theta) {
  return "theta_" + std::to_string(theta + 1);
}

ExperimentConfig parse_experiment(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    raise(Errc::invalid_config,
          "JSON parse error at line " +
              std::to_string(line_of_byte(text, err.byte)) + ": " + err.what());
  }
  if (!root.is_object()) raise(Errc::invalid_config, "config must be an object");
  reject_unknown_keys(root, "config",
                      {"seed", "output_dir", "hypotheses", "network",
                       "combination", "agents", "analysis", "design",
                       "simulate"});

  ExperimentConfig cfg;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) {
      config_error("config", "'seed' must be an integer");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("output_dir")) {
    cfg.output_dir = require_string(root, "config", "output_dir");
  }

  if (!root.contains("hypotheses")) config_error("config", "missing 'hypotheses'");
  {
    const json& h = root["hypotheses"];
    reject_unknown_keys(h, "hypotheses", {"count", "true_index"});
    cfg.hypotheses.count = static_cast<int>(require_number(h, "hypotheses", "count"));
    cfg.hypotheses.true_index =
        static_cast<int>(optional_number(h, "hypotheses", "true_index", 1)) - 1;
    validate_hypotheses(cfg.hypotheses);
  }

  if (!root.contains("agents") || !root["agents"].is_array() ||
      root["agents"].empty()) {
    config_error("config", "'agents' must be a non-empty array");
  }
  for (std::size_t g = 0; g < root["agents"].size(); ++g) {
    const json& entry = root["agents"][g];
    const std::string where = "agents[" + std::to_string(g) + "]";
    reject_unknown_keys(entry, where,
                        {"count", "signal", "likelihoods", "noise_variance"});
    const int count = static_cast<int>(optional_number(entry, where, "count", 1));
    if (count < 1) config_error(where, "'count' must be >= 1");
    AgentModel agent;
    if (!entry.contains("likelihoods") || !entry["likelihoods"].is_array()) {
      config_error(where, "missing 'likelihoods' array");
    }
    for (std::size_t h = 0; h < entry["likelihoods"].size(); ++h) {
      agent.likelihoods.push_back(parse_distribution(
          entry["likelihoods"][h], where + ".likelihoods[" + std::to_string(h) + "]"));
    }
    agent.noise_variance = optional_number(entry, where, "noise_variance", 0.0);
    if (!entry.contains("signal")) config_error(where, "missing 'signal'");
    if (entry["signal"].is_string()) {
      if (entry["signal"].get<std::string>() != "accurate") {
        config_error(where, "signal must be a distribution or \"accurate\"");
      }
      if (agent.likelihoods.empty()) config_error(where, "no likelihoods");
      agent.signal = agent.likelihoods[0];
    } else {
      agent.signal = parse_distribution(entry["signal"], where + ".signal");
    }
    validate_agent(agent, cfg.hypotheses.count);
    for (int c = 0; c < count; ++c) cfg.agents.push_back(agent);
  }

  if (root.contains("network")) {
    const json& net = root["network"];
    reject_unknown_keys(net, "network", {"type", "n", "edge_probability", "path"});
    const std::string type = require_string(net, "network", "type");
    if (type == "erdos_renyi") {
      cfg.network_type = ExperimentConfig::NetworkType::erdos_renyi;
      cfg.network_n = static_cast<int>(require_number(net, "network", "n"));
      cfg.edge_probability = require_number(net, "network", "edge_probability");
    } else if (type == "complete") {
      cfg.network_type = ExperimentConfig::NetworkType::complete;
      cfg.network_n = static_cast<int>(require_number(net, "network", "n"));
    } else if (type == "star") {
      cfg.network_type = ExperimentConfig::NetworkType::star;
      cfg.network_n = static_cast<int>(require_number(net, "network", "n"));
    } else if (type == "file") {
      cfg.network_type = ExperimentConfig::NetworkType::file;
      cfg.adjacency_path = require_string(net, "network", "path");
    } else {
      config_error("network", "unknown type '" + type + "'");
    }
    if (cfg.network_type != ExperimentConfig::NetworkType::file &&
        cfg.network_n != static_cast<int>(cfg.agents.size())) {
      config_error("network", "n must match the number of agents");
    }
  }

  if (root.contains("combination")) {
    const json& comb = root["combination"];
    reject_unknown_keys(comb, "combination",
                        {"type", "tol", "max_iter", "pi", "path"});
    const std::string type = require_string(comb, "combination", "type");
    if (type == "left_stochastic") {
      cfg.combination_type = ExperimentConfig::CombinationType::left_stochastic;
    } else if (type == "doubly_stochastic") {
      cfg.combination_type = ExperimentConfig::CombinationType::doubly_stochastic;
      cfg.sinkhorn_tol = optional_number(comb, "combination", "tol", 1e-10);
      cfg.sinkhorn_max_iter =
          static_cast<int>(optional_number(comb, "combination", "max_iter", 10000));
    } else if (type == "uniform_averaging") {
      cfg.combination_type = ExperimentConfig::CombinationType::uniform_averaging;
    } else if (type == "from_eigenvector") {
      cfg.combination_type = ExperimentConfig::CombinationType::from_eigenvector;
      if (!comb.contains("pi")) config_error("combination", "missing 'pi'");
      if (comb["pi"].is_string()) {
        if (comb["pi"].get<std::string>() != "design") {
          config_error("combination", "pi must be an array or \"design\"");
        }
        cfg.eigenvector_from_design = true;
      } else {
        cfg.eigenvector = comb["pi"].get<std::vector<double>>();
        if (cfg.eigenvector.size() != cfg.agents.size()) {
          config_error("combination", "pi length must match the agent count");
        }
      }
    } else if (type == "file") {
      cfg.combination_type = ExperimentConfig::CombinationType::file;
      cfg.matrix_path = require_string(comb, "combination", "path");
    } else {
      config_error("combination", "unknown type '" + type + "'");
    }
  }

  if (root.contains("analysis")) {
    const json& a = root["analysis"];
    reject_unknown_keys(a, "analysis",
                        {"integration_tol", "root_tol", "classify_tol",
                         "uninformative_M", "lmgf_tol", "local_truth_tol"});
    cfg.exponent.quad_tol = optional_number(a, "analysis", "integration_tol", 1e-10);
    cfg.exponent.root_tol = optional_number(a, "analysis", "root_tol", 1e-12);
    cfg.exponent.classify.tol = optional_number(a, "analysis", "classify_tol", 1e-10);
    cfg.exponent.classify.uninformative_M =
        optional_number(a, "analysis", "uninformative_M", 1.0);
    cfg.exponent.classify.root_tol = cfg.exponent.root_tol;
    cfg.exponent.classify.quad_tol = cfg.exponent.quad_tol;
    cfg.lmgf.quad_tol = optional_number(a, "analysis", "lmgf_tol", 1e-12);
    cfg.local_truth_tol = optional_number(a, "analysis", "local_truth_tol", 1e-9);
  }
  cfg.design.exponent = cfg.exponent;

  if (root.contains("design")) {
    const json& d = root["design"];
    reject_unknown_keys(d, "design", {"epsilon"});
    cfg.design.epsilon = optional_number(d, "design", "epsilon", 1e-4);
    if (!(cfg.design.epsilon > 0.0)) config_error("design", "epsilon must be > 0");
  }

  if (root.contains("simulate")) {
    const json& s = root["simulate"];
    reject_unknown_keys(s, "simulate",
                        {"delta_grid", "replications", "horizon", "omega",
                         "truth_schedule", "initial_beliefs", "threads",
                         "emit_plots", "emit_trajectory"});
    if (!s.contains("delta_grid") || !s["delta_grid"].is_array() ||
        s["delta_grid"].empty()) {
      config_error("simulate", "'delta_grid' must be a non-empty array");
    }
    cfg.delta_grid = s["delta_grid"].get<std::vector<double>>();
    for (double d : cfg.delta_grid) {
      if (!(d > 0.0) || !(d < 1.0)) {
        config_error("simulate", "every delta must lie in (0, 1)");
      }
    }
    cfg.replications =
        static_cast<int>(optional_number(s, "simulate", "replications", 1000));
    cfg.horizon = static_cast<int>(optional_number(s, "simulate", "horizon", 1000));
    if (cfg.replications < 1) config_error("simulate", "replications must be >= 1");
    if (cfg.horizon < 0) config_error("simulate", "horizon must be >= 0");
    if (s.contains("omega")) {
      cfg.omega = s["omega"].get<std::vector<double>>();
      for (double w : cfg.omega) {
        if (!(w > 0.0) || !(w < 1.0)) {
          config_error("simulate", "omega values must lie in (0, 1)");
        }
      }
    }
    if (s.contains("truth_schedule")) {
      cfg.schedule.clear();
      for (const auto& item : s["truth_schedule"]) {
        if (!item.is_array() || item.size() != 2) {
          config_error("simulate", "truth_schedule entries are [step, truth]");
        }
        TruthChange change;
        change.step = item[0].get<int>();
        change.truth = item[1].get<int>() - 1;
        cfg.schedule.push_back(change);
      }
    } else {
      cfg.schedule = {{0, cfg.hypotheses.true_index}};
    }
    if (s.contains("initial_beliefs")) {
      if (s["initial_beliefs"].is_string()) {
        if (s["initial_beliefs"].get<std::string>() != "uniform") {
          config_error("simulate", "initial_beliefs must be \"uniform\" or {lambda}");
        }
      } else {
        const json& ib = s["initial_beliefs"];
        reject_unknown_keys(ib, "simulate.initial_beliefs", {"lambda"});
        cfg.initial_lambda =
            ib["lambda"].get<std::vector<std::vector<double>>>();
      }
    }
    cfg.threads = static_cast<int>(optional_number(s, "simulate", "threads", 0));
    cfg.emit_plots = s.value("emit_plots", false);
    cfg.emit_trajectory = s.value("emit_trajectory", false);

    SimulationConfig probe;
    probe.delta = cfg.delta_grid.front();
    probe.horizon = cfg.horizon;
    probe.replications = cfg.replications;
    probe.schedule = cfg.schedule;
    probe.initial_lambda = cfg.initial_lambda;
    probe.threads = cfg.threads;
    validate_config(probe, static_cast<int>(cfg.agents.size()),
                    cfg.hypotheses.count);
  } else {
    cfg.schedule = {{0, cfg.hypotheses.true_index}};
  }

  return cfg;
}

ExperimentConfig load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::invalid_config, "cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment(buffer.str());
}

nlohmann::json canonical_config(const ExperimentConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;
  root["output_dir"] = cfg.output_dir;
  root["hypotheses"] = {{"count", cfg.hypotheses.count},
                        {"true_index", cfg.hypotheses.true_index + 1}};
  json agents = json::array();
  for (const AgentModel& agent : cfg.agents) {
    json entry;
    entry["count"] = 1;
    entry["signal"] = distribution_to_json(agent.signal);
    entry["noise_variance"] = agent.noise_variance;
    json lks = json::array();
    for (const auto& lk : agent.likelihoods) lks.push_back(distribution_to_json(lk));
    entry["likelihoods"] = lks;
    agents.push_back(entry);
  }
  root["agents"] = agents;

  switch (cfg.network_type) {
    case ExperimentConfig::NetworkType::none:
      break;
    case ExperimentConfig::NetworkType::erdos_renyi:
      root["network"] = {{"type", "erdos_renyi"},
                         {"n", cfg.network_n},
                         {"edge_probability", cfg.edge_probability}};
      break;
    case ExperimentConfig::NetworkType::complete:
      root["network"] = {{"type", "complete"}, {"n", cfg.network_n}};
      break;
    case ExperimentConfig::NetworkType::star:
      root["network"] = {{"type", "star"}, {"n", cfg.network_n}};
      break;
    case ExperimentConfig::NetworkType::file:
      root["network"] = {{"type", "file"}, {"path", cfg.adjacency_path}};
      break;
  }

  switch (cfg.combination_type) {
    case ExperimentConfig::CombinationType::none:
      break;
    case ExperimentConfig::CombinationType::left_stochastic:
      root["combination"] = {{"type", "left_stochastic"}};
      break;
    case ExperimentConfig::CombinationType::doubly_stochastic:
      root["combination"] = {{"type", "doubly_stochastic"},
                             {"tol", cfg.sinkhorn_tol},
                             {"max_iter", cfg.sinkhorn_max_iter}};
      break;
    case ExperimentConfig::CombinationType::uniform_averaging:
      root["combination"] = {{"type", "uniform_averaging"}};
      break;
    case ExperimentConfig::CombinationType::from_eigenvector:
      if (cfg.eigenvector_from_design) {
        root["combination"] = {{"type", "from_eigenvector"}, {"pi", "design"}};
      } else {
        root["combination"] = {{"type", "from_eigenvector"},
                               {"pi", cfg.eigenvector}};
      }
      break;
    case ExperimentConfig::CombinationType::file:
      root["combination"] = {{"type", "file"}, {"path", cfg.matrix_path}};
      break;
  }

  root["analysis"] = {{"integration_tol", cfg.exponent.quad_tol},
                      {"root_tol", cfg.exponent.root_tol},
                      {"classify_tol", cfg.exponent.classify.tol},
                      {"uninformative_M", cfg.exponent.classify.uninformative_M},
                      {"lmgf_tol", cfg.lmgf.quad_tol},
                      {"local_truth_tol", cfg.local_truth_tol}};
  root["design"] = {{"epsilon", cfg.design.epsilon}};

  if (!cfg.delta_grid.empty()) {
    json schedule = json::array();
    for (const TruthChange& change : cfg.schedule) {
      schedule.push_back({change.step, change.truth + 1});
    }
    json sim = {{"delta_grid", cfg.delta_grid},
                {"replications", cfg.replications},
                {"horizon", cfg.horizon},
                {"omega", cfg.omega},
                {"truth_schedule", schedule},
                {"threads", cfg.threads},
                {"emit_plots", cfg.emit_plots},
                {"emit_trajectory", cfg.emit_trajectory}};
    if (cfg.initial_lambda.empty()) {
      sim["initial_beliefs"] = "uniform";
    } else {
      sim["initial_beliefs"] = {{"lambda", cfg.initial_lambda}};
    }
    root["simulate"] = sim;
  }
  return root;
}

BuiltNetwork build_network(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(cfg.agents.size());
  BuiltNetwork net;

  switch (cfg.network_type) {
    case ExperimentConfig::NetworkType::erdos_renyi: {
      RandomStream rng(derive_seed(cfg.seed, 1001));
      net.adjacency = gen_erdos_renyi(n, cfg.edge_probability, rng);
      break;
    }
    case ExperimentConfig::NetworkType::complete:
      net.adjacency = complete_adjacency(n);
      break;
    case ExperimentConfig::NetworkType::star:
      net.adjacency = star_adjacency(n);
      break;
    case ExperimentConfig::NetworkType::file:
      net.adjacency = read_adjacency_file(cfg.adjacency_path);
      if (net.adjacency.n != n) {
        raise(Errc::invalid_config, "adjacency file dimension mismatch");
      }
      break;
    case ExperimentConfig::NetworkType::none:
      if (cfg.combination_type != ExperimentConfig::CombinationType::file) {
        raise(Errc::invalid_config,
              "a network section is required unless the combination matrix "
              "comes from a file");
      }
      break;
  }

  RandomStream matrix_rng(derive_seed(cfg.seed, 1002));
  switch (cfg.combination_type) {
    case ExperimentConfig::CombinationType::left_stochastic:
      net.matrix = gen_left_stochastic(net.adjacency, matrix_rng);
      break;
    case ExperimentConfig::CombinationType::doubly_stochastic:
      net.matrix = gen_doubly_stochastic(net.adjacency, matrix_rng,
                                         cfg.sinkhorn_tol, cfg.sinkhorn_max_iter);
      break;
    case ExperimentConfig::CombinationType::none:
    case ExperimentConfig::CombinationType::uniform_averaging:
      net.matrix = uniform_averaging(net.adjacency);
      break;
    case ExperimentConfig::CombinationType::from_eigenvector: {
      PerronVector pi;
      if (cfg.eigenvector_from_design) {
        EvaluatorTable table(cfg.agents, cfg.hypotheses.count, cfg.lmgf);
        pi = optimal_design(table, cfg.design).pi;
      } else {
        pi = PerronVector{cfg.eigenvector};
      }
      net.matrix = matrix_from_eigenvector(net.adjacency, pi);
      break;
    }
    case ExperimentConfig::CombinationType::file:
      net.matrix = read_matrix_file(cfg.matrix_path);
      if (net.matrix.n != n) {
        raise(Errc::invalid_config, "matrix file dimension mismatch");
      }
      if (cfg.network_type == ExperimentConfig::NetworkType::none) {
        net.adjacency = net.matrix.support();
      }
      break;
  }

  net.pi = perron_eigenvector(net.matrix);
  return net;
}

nlohmann::json run_classify(const ExperimentConfig& cfg) {
  EvaluatorTable table(cfg.agents, cfg.hypotheses.count, cfg.lmgf);
  json out;
  out["num_agents"] = table.num_agents();
  out["num_hypotheses"] = cfg.hypotheses.count;
  out["reference"] = hypothesis_label(0);
  json per_theta = json::array();
  double best_sum = std::numeric_limits<double>::infinity();
  int best_theta = 1;
  for (int theta = 1; theta < cfg.hypotheses.count; ++theta) {
    const ThetaClassification cls =
        classify_agents(table, theta, cfg.exponent.classify);
    json entry;
    entry["theta"] = hypothesis_label(theta);
    auto to_one_based = [](const std::vector<int>& ids) {
      json arr = json::array();
      for (int k : ids) arr.push_back(k + 1);
      return arr;
    };
    entry["uninformative"] = to_one_based(cls.uninformative);
    entry["informative"] = to_one_based(cls.informative);
    entry["conflicting"] = to_one_based(cls.conflicting);
    entry["t_nc"] = cls.t_nc;
    entry["phi_nc"] = cls.phi_nc;
    entry["phi_nc_sum"] = cls.phi_nc_sum;
    entry["bounds"] = {{"lower", cls.phi_nc_min}, {"upper", cls.phi_nc_sum}};
    per_theta.push_back(entry);
    if (cls.phi_nc_sum < best_sum) {
      best_sum = cls.phi_nc_sum;
      best_theta = theta;
    }
  }
  out["per_theta"] = per_theta;
  out["theta_dagger"] = hypothesis_label(best_theta);
  out["upper_bound"] = best_sum;
  return out;
}

nlohmann::json run_exponent(const ExperimentConfig& cfg, const PiSource& source) {
  EvaluatorTable table(cfg.agents, cfg.hypotheses.count, cfg.lmgf);
  const int n = table.num_agents();
  std::vector<double> pi;
  std::string source_name;
  switch (source.kind) {
    case PiSource::Kind::uniform:
      pi = uniform_pi(n).weights;
      source_name = "uniform";
      break;
    case PiSource::Kind::design:
      pi = optimal_design(table, cfg.design).pi.weights;
      source_name = "design";
      break;
    case PiSource::Kind::matrix:
      pi = build_network(cfg).pi.weights;
      source_name = "matrix";
      break;
    case PiSource::Kind::file:
      pi = read_vector_file(source.path);
      if (static_cast<int>(pi.size()) != n) {
        raise(Errc::invalid_config, "pi file length must match the agent count");
      }
      source_name = "file";
      break;
  }

  const ExponentReport report = error_exponent(table, pi, cfg.exponent);
  json out;
  out["pi_source"] = source_name;
  out["pi"] = pi;
  out["feasible"] = report.feasible;
  json per_theta = json::array();
  for (const auto& entry : report.per_theta) {
    json e;
    e["theta"] = hypothesis_label(entry.theta);
    e["phi_theta"] = entry.phi;
    e["t_star"] = entry.t_star;
    e["m_ave"] = entry.m;
    e["c_ave"] = entry.c;
    e["t_hat"] = entry.t_hat;
    e["phi_hat"] = entry.phi_hat;
    e["feasible"] = entry.feasible;
    per_theta.push_back(e);
  }
  out["per_theta"] = per_theta;
  out["phi"] = report.phi;
  if (report.argmin_theta > 0) {
    out["argmin_theta"] = hypothesis_label(report.argmin_theta);
    json ties = json::array();
    for (int theta : report.argmin_set) ties.push_back(hypothesis_label(theta));
    out["argmin_set"] = ties;
  }
  return out;
}

nlohmann::json run_design(const ExperimentConfig& cfg, bool emit_matrix) {
  EvaluatorTable table(cfg.agents, cfg.hypotheses.count, cfg.lmgf);
  const EigenvectorDesign design = optimal_design(table, cfg.design);
  json out;
  out["theta_dagger"] = hypothesis_label(design.theta_dagger);
  json ties = json::array();
  for (int theta : design.theta_dagger_ties) ties.push_back(hypothesis_label(theta));
  out["theta_dagger_ties"] = ties;
  out["pi"] = design.pi.weights;
  out["status"] = design_status_name(design.status);
  out["achieved_exponent"] = design.achieved_exponent;
  out["upper_bound"] = design.upper_bound;
  out["pi1_member"] = design.pi1_member;
  out["epsilon"] = design.epsilon;

  if (emit_matrix) {
    const BuiltNetwork net = [&]() {
      ExperimentConfig tmp = cfg;
      tmp.combination_type = ExperimentConfig::CombinationType::uniform_averaging;
      return build_network(tmp);
    }();
    const CombinationMatrix m = matrix_from_eigenvector(net.adjacency, design.pi);
    std::filesystem::create_directories(cfg.output_dir);
    const std::string path =
        (std::filesystem::path(cfg.output_dir) / "designed_matrix.txt").string();
    write_matrix_file(path, m);
    double residual = 0.0;
    for (int l = 0; l < m.n; ++l) {
      double acc = 0.0;
      for (int k = 0; k < m.n; ++k) acc += m.at(l, k) * design.pi[k];
      residual = std::max(residual, std::abs(acc - design.pi[l]));
    }
    out["matrix_file"] = path;
    out["fixed_point_residual"] = residual;
  }
  return out;
}

nlohmann::json run_simulate(const ExperimentConfig& cfg) {
  if (cfg.delta_grid.empty()) {
    raise(Errc::invalid_config, "simulate requires a non-empty delta_grid");
  }
  const BuiltNetwork net = build_network(cfg);
  EvaluatorTable table(cfg.agents, cfg.hypotheses.count, cfg.lmgf);
  std::filesystem::create_directories(cfg.output_dir);

  json out;
  out["pi"] = net.pi.weights;

  double reference_phi = std::numeric_limits<double>::quiet_NaN();
  try {
    const ExponentReport report =
        error_exponent(table, net.pi.weights, cfg.exponent);
    if (report.feasible) reference_phi = report.phi;
  } catch (const Error&) {
    // Exponent reference is advisory inside the simulation summary.
  }
  out["reference_phi"] = reference_phi;

  json per_delta = json::array();
  std::vector<std::pair<double, double>> steady_points;  // (1/delta, p_ave)
  for (double delta : cfg.delta_grid) {
    SimulationConfig sim;
    sim.delta = delta;
    sim.horizon = cfg.horizon;
    sim.replications = cfg.replications;
    sim.seed = cfg.seed;
    sim.schedule = cfg.schedule;
    sim.initial_lambda = cfg.initial_lambda;
    sim.threads = cfg.threads;
    const ErrorCurve curve = estimate_error_prob(cfg.agents, net.matrix, sim);

    const std::string tag = delta_tag(delta);
    const std::string curve_path =
        (std::filesystem::path(cfg.output_dir) / ("curves_delta_" + tag + ".csv"))
            .string();
    {
      std::ofstream csv(curve_path);
      if (!csv) raise(Errc::invalid_config, "cannot write " + curve_path);
      csv << "step,agent,p_hat,stderr\n";
      for (std::size_t idx = 0; idx < curve.steps.size(); ++idx) {
        for (std::size_t k = 0; k < curve.p_agent[idx].size(); ++k) {
          const double p = curve.p_agent[idx][k];
          csv << curve.steps[idx] << "," << (k + 1) << "," << format_double(p)
              << ","
              << format_double(ErrorCurve::standard_error(p, curve.replications))
              << "\n";
        }
        csv << curve.steps[idx] << ",ave," << format_double(curve.p_ave[idx])
            << ","
            << format_double(
                   ErrorCurve::standard_error(curve.p_ave[idx], curve.replications))
            << "\n";
      }
    }

    if (cfg.emit_trajectory) {
      SimulationConfig one = sim;
      one.replications = 1;
      const ReplicationTrajectory traj =
          run_replication(cfg.agents, net.matrix, one, 0);
      const std::string traj_path =
          (std::filesystem::path(cfg.output_dir) /
           ("trajectory_delta_" + tag + ".csv"))
              .string();
      std::ofstream csv(traj_path);
      csv << "step,agent,theta,lambda\n";
      for (std::size_t idx = 0; idx < traj.steps.size(); ++idx) {
        for (std::size_t k = 0; k < traj.lambda[idx].size(); ++k) {
          for (std::size_t t = 0; t < traj.lambda[idx][k].size(); ++t) {
            csv << traj.steps[idx] << "," << (k + 1) << ","
                << hypothesis_label(static_cast<int>(t) + 1) << ","
                << format_double(traj.lambda[idx][k][t]) << "\n";
          }
        }
      }
    }

    if (cfg.emit_plots) {
      std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
          series;
      std::vector<std::pair<double, double>> pts;
      for (std::size_t idx = 0; idx < curve.steps.size(); ++idx) {
        pts.emplace_back(curve.steps[idx], curve.p_ave[idx]);
      }
      series.emplace_back("p_ave", std::move(pts));
      write_svg_plot((std::filesystem::path(cfg.output_dir) /
                      ("p_ave_vs_step_delta_" + tag + ".svg"))
                         .string(),
                     "Instantaneous error probability (delta = " + tag + ")",
                     "step", series);
    }

    json entry;
    entry["delta"] = delta;
    entry["curves_csv"] = curve_path;
    entry["p_ave"] = curve.terminal_p_ave();
    entry["p_agent"] = curve.terminal_p_agent();
    entry["stderr_ave"] =
        ErrorCurve::standard_error(curve.terminal_p_ave(), curve.replications);
    entry["horizon_warning"] = std::pow(1.0 - delta, cfg.horizon) >= 1e-3;

    json adaptation = json::array();
    for (double omega : cfg.omega) {
      json a;
      a["omega"] = omega;
      a["T_theory"] = adaptation_time_theory(omega, delta);
      try {
        a["i0_simulated"] = adaptation_time_simulated(curve, omega);
      } catch (const Error& err) {
        a["i0_simulated"] = nullptr;
        a["note"] = err.what();
      }
      adaptation.push_back(a);
    }
    entry["adaptation"] = adaptation;
    per_delta.push_back(entry);
    steady_points.emplace_back(1.0 / delta, curve.terminal_p_ave());
  }
  out["per_delta"] = per_delta;

  // LDP slope fit: -ln p_ave regressed on 1/delta.
  if (steady_points.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& [x, p] : steady_points) {
      if (p <= 0.0) continue;
      const double y = -std::log(p);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    json fit;
    if (m >= 2 && sxx * m - sx * sx > 0) {
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double intercept = (sy - slope * sx) / m;
      fit["slope"] = slope;
      fit["intercept"] = intercept;
      fit["points_used"] = m;
    } else {
      fit["slope"] = nullptr;
    }
    out["slope_fit"] = fit;
  }

  if (cfg.emit_plots && steady_points.size() >= 2) {
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
        series;
    series.emplace_back("p_ave", steady_points);
    write_svg_plot(
        (std::filesystem::path(cfg.output_dir) / "steady_state_vs_inv_delta.svg")
            .string(),
        "Steady-state error probability", "1/delta", series);
  }

  const std::string summary_path =
      (std::filesystem::path(cfg.output_dir) / "summary.json").string();
  std::ofstream summary(summary_path);
  summary << out.dump(2) << "\n";
  out["summary_json"] = summary_path;
  return out;
}

nlohmann::json run_graph_gen(const ExperimentConfig& cfg, int num_left,
                             int num_doubly, bool uniform) {
  ExperimentConfig tmp = cfg;
  tmp.combination_type = ExperimentConfig::CombinationType::uniform_averaging;
  const BuiltNetwork net = build_network(tmp);
  std::filesystem::create_directories(cfg.output_dir);
  json out;
  const std::string adj_path =
      (std::filesystem::path(cfg.output_dir) / "adjacency.txt").string();
  write_adjacency_file(adj_path, net.adjacency);
  out["adjacency_file"] = adj_path;
  json matrices = json::array();
  for (int i = 0; i < num_left; ++i) {
    RandomStream rng(derive_seed(cfg.seed, 2000 + i));
    const CombinationMatrix m = gen_left_stochastic(net.adjacency, rng);
    const std::string path =
        (std::filesystem::path(cfg.output_dir) /
         ("A_left_" + std::to_string(i + 1) + ".txt"))
            .string();
    write_matrix_file(path, m);
    matrices.push_back(path);
  }
  for (int i = 0; i < num_doubly; ++i) {
    RandomStream rng(derive_seed(cfg.seed, 3000 + i));
    const CombinationMatrix m = gen_doubly_stochastic(net.adjacency, rng);
    const std::string path =
        (std::filesystem::path(cfg.output_dir) /
         ("A_doubly_" + std::to_string(i + 1) + ".txt"))
            .string();
    write_matrix_file(path, m);
    matrices.push_back(path);
  }
  if (uniform) {
    const std::string path =
        (std::filesystem::path(cfg.output_dir) / "A_uniform.txt").string();
    write_matrix_file(path, uniform_averaging(net.adjacency));
    matrices.push_back(path);
  }
  out["matrices"] = matrices;
  return out;
}

}  // namespace asl
