#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "asl/error.hpp"
#include "asl/experiment.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::string format = "json";
  bool seed_set = false;
  std::uint64_t seed = 0;
};

asl::ExperimentConfig load(const GlobalArgs& args) {
  asl::ExperimentConfig cfg = asl::load_experiment_file(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  return cfg;
}

void emit(const nlohmann::json& report, const std::string& format) {
  if (format == "json") {
    std::cout << report.dump(2) << "\n";
  } else {
    // Flat key,value CSV view of the top-level report.
    std::cout << "key,value\n";
    for (auto it = report.begin(); it != report.end(); ++it) {
      std::cout << it.key() << "," << it.value().dump() << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive social learning toolkit: error exponents, combination "
               "policy design, and Monte Carlo simulation over graphs"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "Experiment config file (JSON)")
      ->required();
  auto* seed_opt = app.add_option("--seed", args.seed, "Override the master seed");
  app.add_option("--out", args.out_dir, "Override the output directory");
  app.add_option("--format", args.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* classify = app.add_subcommand(
      "classify", "Per-hypothesis agent classification and exponent bounds");

  std::string pi_source = "matrix";
  std::string pi_file;
  auto* exponent = app.add_subcommand(
      "exponent", "Error exponents for a given Perron eigenvector");
  exponent->add_option("--pi", pi_source,
                       "Eigenvector source: matrix, design, uniform, or file")
      ->check(CLI::IsMember({"matrix", "design", "uniform", "file"}));
  exponent->add_option("--pi-file", pi_file, "Vector file used with --pi file");

  bool emit_matrix = false;
  auto* design = app.add_subcommand(
      "design", "Synthesize the optimal or epsilon-optimal Perron eigenvector");
  design->add_flag("--emit-matrix", emit_matrix,
                   "Also construct and write the combination matrix");

  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo runs over the configured step-size grid");

  int num_left = 0, num_doubly = 0;
  bool gen_uniform = false;
  auto* graph_gen = app.add_subcommand(
      "graph-gen", "Generate the adjacency and seeded combination matrices");
  graph_gen->add_option("--left", num_left, "Number of left-stochastic matrices");
  graph_gen->add_option("--doubly", num_doubly,
                        "Number of doubly-stochastic matrices");
  graph_gen->add_flag("--uniform-averaging", gen_uniform,
                      "Also write the uniform averaging matrix");

  CLI11_PARSE(app, argc, argv);
  args.seed_set = seed_opt->count() > 0;

  try {
    const asl::ExperimentConfig cfg = load(args);
    nlohmann::json report;
    if (classify->parsed()) {
      report = asl::run_classify(cfg);
    } else if (exponent->parsed()) {
      asl::PiSource source;
      if (pi_source == "matrix") source.kind = asl::PiSource::Kind::matrix;
      if (pi_source == "design") source.kind = asl::PiSource::Kind::design;
      if (pi_source == "uniform") source.kind = asl::PiSource::Kind::uniform;
      if (pi_source == "file") {
        source.kind = asl::PiSource::Kind::file;
        if (pi_file.empty()) {
          asl::raise(asl::Errc::invalid_config, "--pi file requires --pi-file");
        }
        source.path = pi_file;
      }
      report = asl::run_exponent(cfg, source);
    } else if (design->parsed()) {
      report = asl::run_design(cfg, emit_matrix);
    } else if (simulate->parsed()) {
      report = asl::run_simulate(cfg);
    } else if (graph_gen->parsed()) {
      report = asl::run_graph_gen(cfg, num_left, num_doubly, gen_uniform);
    }
    emit(report, args.format);
    return 0;
  } catch (const asl::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return err.code() == asl::Errc::invalid_config ? 2 : 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
