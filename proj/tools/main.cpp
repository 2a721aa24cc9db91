#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "causnet/harness.hpp"
#include "causnet/io.hpp"
#include "causnet/rng.hpp"
#include "causnet/simulator.hpp"

namespace fs = std::filesystem;
using namespace causnet;

namespace {

int cmd_gen(int p, int tau, int links, std::uint64_t seed, int q_raw, int burn_in,
            const std::string& out_dir) {
  if (links <= 0) links = p;
  ProcessSpec spec = generate_process_spec(p, tau, links, derive_seed(seed, 0, 0));
  const int burn = burn_in < 0 ? default_burn_in(tau) : burn_in;
  TimeSeriesPanel panel = simulate(spec, q_raw, burn, derive_seed(seed, 0, 1));
  CausalityNetwork truth = true_network(spec);

  fs::create_directories(out_dir);
  const std::string spec_path = (fs::path(out_dir) / "spec.txt").string();
  const std::string panel_path = (fs::path(out_dir) / "panel.csv").string();
  const std::string truth_path = (fs::path(out_dir) / "truth.csv").string();
  write_process_spec_text(spec_path, spec);
  write_panel_csv(panel_path, panel);
  write_network_csv(truth_path, truth);
  std::cout << "wrote " << spec_path << '\n'
            << "wrote " << panel_path << '\n'
            << "wrote " << truth_path << '\n';
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::int64_t seed_override, int threads_override) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  if (seed_override >= 0)
    config.master_seed = static_cast<std::uint64_t>(seed_override);
  if (threads_override >= 1) config.threads = threads_override;

  RunReport report;
  std::vector<CellResult> cells = run_experiment(config, &report);

  fs::create_directories(config.output_dir);
  const std::string cells_path = (fs::path(config.output_dir) / "cells.csv").string();
  const std::string roc_path = (fs::path(config.output_dir) / "roc.csv").string();
  const std::string report_path =
      (fs::path(config.output_dir) / "report.txt").string();
  write_cells_csv(cells_path, cells);
  write_roc_csv(roc_path, roc_points(cells));
  write_report_text(report_path, report);

  std::cout << "wrote " << cells_path << '\n'
            << "wrote " << roc_path << '\n'
            << "wrote " << report_path << '\n';
  if (!report.warnings.empty())
    std::cout << report.warnings.size() << " warning(s); see " << report_path
              << '\n';
  return 0;
}

int cmd_table(const std::string& in_path, const std::string& mode_name,
              bool has_gamma, double gamma, bool has_pv, double pv) {
  std::vector<CellResult> cells = read_cells_csv(in_path);
  const NetworkMode mode = parse_network_mode(mode_name);
  std::cout << render_table(cells, mode, has_gamma, gamma, has_pv, pv);
  return 0;
}

int cmd_roc(const std::string& in_path, const std::string& out_path) {
  std::vector<CellResult> cells = read_cells_csv(in_path);
  write_roc_csv(out_path, roc_points(cells));
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sparse-precision transfer-entropy toolkit: simulate linear lagged "
      "processes, estimate precision matrices, validate causal networks."};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a process spec and a panel");
  int gen_p = 20, gen_tau = 3, gen_links = 0, gen_qraw = 500, gen_burn = -1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  gen->add_option("--p", gen_p, "number of variables")->check(CLI::Range(2, 100000));
  gen->add_option("--tau", gen_tau, "maximum lag")->check(CLI::Range(1, 1000));
  gen->add_option("--links", gen_links, "number of causal links (default: p)");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--qraw", gen_qraw, "rows to simulate")->check(CLI::Range(1, 100000000));
  gen->add_option("--burnin", gen_burn, "burn-in rows (default: 100*(tau+1))");
  gen->add_option("--out", gen_out, "output directory");

  // run
  auto* run = app.add_subcommand("run", "Execute an experiment configuration");
  std::string run_config, run_out;
  std::int64_t run_seed = -1;
  int run_threads = 0;
  run->add_option("--config", run_config, "JSON config path")->required();
  run->add_option("--out", run_out, "override the configured output directory");
  run->add_option("--seed", run_seed, "override the configured master seed");
  run->add_option("--threads", run_threads, "override the configured thread count");

  // table
  auto* table = app.add_subcommand("table", "Format sweep cells as a table");
  std::string table_in, table_mode = "conditional";
  double table_gamma = 0.0, table_pv = 0.0;
  table->add_option("--in", table_in, "cells.csv path")->required();
  auto* gamma_opt = table->add_option("--gamma", table_gamma, "gamma slice");
  auto* pv_opt = table->add_option("--pv", table_pv, "p-value slice");
  table->add_option("--mode", table_mode,
                    "conditional, unconditional, or inference");

  // roc
  auto* roc = app.add_subcommand("roc", "Emit ROC points from sweep cells");
  std::string roc_in, roc_out = "roc.csv";
  roc->add_option("--in", roc_in, "cells.csv path")->required();
  roc->add_option("--out", roc_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(gen_p, gen_tau, gen_links, gen_seed, gen_qraw, gen_burn,
                     gen_out);
    if (run->parsed()) return cmd_run(run_config, run_out, run_seed, run_threads);
    if (table->parsed())
      return cmd_table(table_in, table_mode, gamma_opt->count() > 0, table_gamma,
                       pv_opt->count() > 0, table_pv);
    if (roc->parsed()) return cmd_roc(roc_in, roc_out);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
