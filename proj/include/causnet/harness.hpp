#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causnet/errors.hpp"
#include "causnet/estimators.hpp"
#include "causnet/infotheory.hpp"
#include "causnet/validation.hpp"

namespace causnet {

// What kind of network a sweep cell scores against the ground truth:
// statistically validated TE networks (conditional or pairwise/unconditional
// TE), or the raw precision-support inference network with no validation.
enum class NetworkMode { conditional, unconditional, inference };

const char* network_mode_name(NetworkMode mode);
NetworkMode parse_network_mode(const std::string& name);
Method parse_method(const std::string& name);
UnconditionalVariant parse_unconditional_variant(const std::string& name);

enum class SigFlag { none, star, double_star };
const char* sig_flag_name(SigFlag flag);

// count values spaced evenly in log scale over [lo, hi], both positive.
std::vector<double> log_spaced_grid(double lo, double hi, int count);

struct ExperimentConfig {
  int p = 100;
  int tau = 5;
  int n_links = 100;
  int replicates = 100;
  std::vector<int> q_grid{10, 20, 30, 50, 200, 300, 1000, 20000};
  std::vector<double> gamma_grid = log_spaced_grid(1e-8, 0.5, 8);
  std::vector<double> pv_grid{0.01};
  std::vector<Method> methods{Method::ridge, Method::glasso, Method::logo};
  std::vector<NetworkMode> modes{NetworkMode::conditional};
  bool bonferroni = false;
  std::uint64_t master_seed = 1;
  std::string output_dir = ".";
  UnconditionalVariant unconditional_variant = UnconditionalVariant::local_reestimate;
  bool standardize = true;
  double r = 2.0;      // likelihood-ratio scale passed to validation
  int threads = 1;
  int burn_in = -1;    // negative: use the simulator default
  EstimatorOptions estimator_options{};
};

// Parse and validate a JSON experiment configuration. Unknown keys, type
// mismatches, and invariant violations throw config_error with the field
// named in the message. Missing fields take the defaults above, except
// n_links which defaults to p when omitted.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
void validate_experiment_config(const ExperimentConfig& config);
std::string experiment_config_json(const ExperimentConfig& config);

// One aggregated sweep cell. Rates follow the scoring conventions:
// tp_rate = TP / K (sensitivity w.r.t. the K true links), fp_over_n = FP / K
// (false positives scaled by true-link count, may exceed 1), fp_rate = FP / m
// (false-positive rate over the m true non-links). Significance flags require
// the network-level hypergeometric bar on EVERY replicate: star for P < 0.05,
// double star for P < 1e-8. frac_p05 / frac_p1e8 carry the per-replicate
// fractions for analysis; they are not part of the CSV schema.
struct CellResult {
  Method method = Method::ridge;
  NetworkMode mode = NetworkMode::conditional;
  int q = 0;
  double gamma = 0.0;
  double pv = 1.0;
  double tp_rate = 0.0;
  double fp_over_n = 0.0;
  double fp_rate = 0.0;
  SigFlag sig_flag = SigFlag::none;
  int n_replicates = 0;
  double frac_p05 = 0.0;
  double frac_p1e8 = 0.0;
};

struct RocRow {
  Method method = Method::ridge;
  NetworkMode mode = NetworkMode::conditional;
  int q = 0;
  double gamma = 0.0;
  double pv = 1.0;
  double fp_rate = 0.0;  // x coordinate
  double tp_rate = 0.0;  // y coordinate
};

struct RunReport {
  std::string config_json;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;  // one line per failed (replicate, cell group)
  int n_cells = 0;
  int n_incomplete_cells = 0;  // cells missing at least one replicate
  std::string notes;
};

// Execute the full replicated sweep. Each replicate draws a fresh process
// from a seed derived from (master_seed, replicate) and simulates one path
// at the largest q; smaller-q cells reuse its prefix. Per-cell numerical
// failures are recorded in the report and never abort the sweep. Results
// are deterministic for a given config regardless of thread count.
std::vector<CellResult> run_experiment(const ExperimentConfig& config,
                                       RunReport* report = nullptr);

// One ROC point per cell: (fp_rate, tp_rate) averaged over replicates.
std::vector<RocRow> roc_points(const std::vector<CellResult>& cells);

// Render cells as a fixed-width table: one column per q, two rows per method
// (TP/n with the significance suffix, then FP/n). Cells are filtered to one
// (mode, gamma, pv) slice; pass has_gamma/has_pv = false to accept any single
// value present in the data (ambiguity is an error).
std::string render_table(const std::vector<CellResult>& cells, NetworkMode mode,
                         bool has_gamma, double gamma, bool has_pv, double pv);

}  // namespace causnet
