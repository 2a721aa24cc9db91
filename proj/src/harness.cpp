#include "causnet/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "causnet/rng.hpp"
#include "causnet/simulator.hpp"

namespace causnet {

namespace {

using nlohmann::json;

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

const char* network_mode_name(NetworkMode mode) {
  switch (mode) {
    case NetworkMode::conditional: return "conditional";
    case NetworkMode::unconditional: return "unconditional";
    case NetworkMode::inference: return "inference";
  }
  return "?";
}

NetworkMode parse_network_mode(const std::string& name) {
  if (name == "conditional") return NetworkMode::conditional;
  if (name == "unconditional") return NetworkMode::unconditional;
  if (name == "inference") return NetworkMode::inference;
  throw invalid_argument_error(
      "unknown mode '" + name +
      "' (expected conditional, unconditional, or inference)");
}

Method parse_method(const std::string& name) {
  if (name == "ridge") return Method::ridge;
  if (name == "glasso") return Method::glasso;
  if (name == "logo") return Method::logo;
  throw invalid_argument_error("unknown method '" + name +
                               "' (expected ridge, glasso, or logo)");
}

UnconditionalVariant parse_unconditional_variant(const std::string& name) {
  if (name == "local_reestimate") return UnconditionalVariant::local_reestimate;
  if (name == "global_restrict") return UnconditionalVariant::global_restrict;
  throw invalid_argument_error(
      "unknown unconditional_variant '" + name +
      "' (expected local_reestimate or global_restrict)");
}

const char* sig_flag_name(SigFlag flag) {
  switch (flag) {
    case SigFlag::none: return "";
    case SigFlag::star: return "*";
    case SigFlag::double_star: return "**";
  }
  return "";
}

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw invalid_argument_error("log_spaced_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> grid(count);
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int k = 0; k < count; ++k) grid[k] = std::exp(std::log(lo) + k * step);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

// ---------------------------------------------------------------------------
// configuration parsing

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
  throw config_error("config: " + msg);
}

void expect_known_keys(const json& j) {
  static const std::set<std::string> known{
      "p",           "tau",         "n_links",      "replicates",
      "q_grid",      "gamma_grid",  "pv_grid",      "methods",
      "modes",       "bonferroni",  "master_seed",  "output_dir",
      "unconditional_variant",      "standardize",  "r",
      "threads",     "burn_in",     "glasso_tol",   "glasso_max_iter",
      "logo_cond_cap"};
  for (const auto& item : j.items())
    if (known.find(item.key()) == known.end())
      config_fail("unknown field '" + item.key() + "'");
}

template <typename T>
T get_scalar(const json& j, const char* key, T fallback, const char* type_name) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_fail(std::string("field '") + key + "' must be " + type_name);
  }
}

template <typename T>
std::vector<T> get_array(const json& j, const char* key, std::vector<T> fallback,
                         const char* type_name) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<std::vector<T>>();
  } catch (const json::exception&) {
    config_fail(std::string("field '") + key + "' must be an array of " + type_name);
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_fail(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_fail("top level must be a JSON object");
  expect_known_keys(j);

  ExperimentConfig c;
  c.p = get_scalar<int>(j, "p", c.p, "an integer");
  c.tau = get_scalar<int>(j, "tau", c.tau, "an integer");
  c.n_links = get_scalar<int>(j, "n_links", c.p, "an integer");
  c.replicates = get_scalar<int>(j, "replicates", c.replicates, "an integer");
  c.q_grid = get_array<int>(j, "q_grid", c.q_grid, "integers");
  c.gamma_grid = get_array<double>(j, "gamma_grid", c.gamma_grid, "numbers");
  c.pv_grid = get_array<double>(j, "pv_grid", c.pv_grid, "numbers");
  if (j.contains("methods")) {
    c.methods.clear();
    for (const std::string& name :
         get_array<std::string>(j, "methods", {}, "strings")) {
      try {
        c.methods.push_back(parse_method(name));
      } catch (const invalid_argument_error& e) {
        config_fail(e.what());
      }
    }
  }
  if (j.contains("modes")) {
    c.modes.clear();
    for (const std::string& name :
         get_array<std::string>(j, "modes", {}, "strings")) {
      try {
        c.modes.push_back(parse_network_mode(name));
      } catch (const invalid_argument_error& e) {
        config_fail(e.what());
      }
    }
  }
  c.bonferroni = get_scalar<bool>(j, "bonferroni", c.bonferroni, "a boolean");
  c.master_seed =
      get_scalar<std::uint64_t>(j, "master_seed", c.master_seed, "an integer");
  c.output_dir = get_scalar<std::string>(j, "output_dir", c.output_dir, "a string");
  if (j.contains("unconditional_variant")) {
    try {
      c.unconditional_variant = parse_unconditional_variant(
          get_scalar<std::string>(j, "unconditional_variant", "", "a string"));
    } catch (const invalid_argument_error& e) {
      config_fail(e.what());
    }
  }
  c.standardize = get_scalar<bool>(j, "standardize", c.standardize, "a boolean");
  c.r = get_scalar<double>(j, "r", c.r, "a number");
  c.threads = get_scalar<int>(j, "threads", c.threads, "an integer");
  c.burn_in = get_scalar<int>(j, "burn_in", c.burn_in, "an integer");
  c.estimator_options.glasso_tol = get_scalar<double>(
      j, "glasso_tol", c.estimator_options.glasso_tol, "a number");
  c.estimator_options.glasso_max_iter = get_scalar<int>(
      j, "glasso_max_iter", c.estimator_options.glasso_max_iter, "an integer");
  c.estimator_options.logo_cond_cap = get_scalar<double>(
      j, "logo_cond_cap", c.estimator_options.logo_cond_cap, "a number");

  validate_experiment_config(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

void validate_experiment_config(const ExperimentConfig& c) {
  if (c.p < 2) config_fail("p must be >= 2 (got " + std::to_string(c.p) + ")");
  if (c.tau < 1) config_fail("tau must be >= 1 (got " + std::to_string(c.tau) + ")");
  const long long max_links = static_cast<long long>(c.p) * (c.p - 1) / 2;
  if (c.n_links < 1 || c.n_links > max_links)
    config_fail("n_links must lie in [1, p(p-1)/2] (got " +
                std::to_string(c.n_links) + ", max " + std::to_string(max_links) +
                ")");
  if (c.replicates < 1)
    config_fail("replicates must be >= 1 (got " + std::to_string(c.replicates) + ")");
  if (c.q_grid.empty()) config_fail("q_grid must be nonempty");
  for (int q : c.q_grid)
    if (q < 2) config_fail("q_grid entries must be >= 2 (got " + std::to_string(q) + ")");
  if (std::set<int>(c.q_grid.begin(), c.q_grid.end()).size() != c.q_grid.size())
    config_fail("q_grid entries must be distinct");
  if (c.gamma_grid.empty()) config_fail("gamma_grid must be nonempty");
  for (double g : c.gamma_grid)
    if (!(g >= 0.0 && g <= 1.0))
      config_fail("gamma_grid entries must lie in [0, 1] (got " + g6(g) + ")");
  if (c.pv_grid.empty()) config_fail("pv_grid must be nonempty");
  for (double pv : c.pv_grid)
    if (!(pv > 0.0 && pv <= 1.0))
      config_fail("pv_grid entries must lie in (0, 1] (got " + g6(pv) + ")");
  if (c.methods.empty()) config_fail("methods must be nonempty");
  if (c.modes.empty()) config_fail("modes must be nonempty");
  {
    std::set<int> seen;
    for (Method m : c.methods)
      if (!seen.insert(static_cast<int>(m)).second)
        config_fail("methods must be distinct");
  }
  {
    std::set<int> seen;
    for (NetworkMode m : c.modes)
      if (!seen.insert(static_cast<int>(m)).second)
        config_fail("modes must be distinct");
  }
  if (!(c.r > 0.0)) config_fail("r must be positive");
  if (c.threads < 1) config_fail("threads must be >= 1");
  if (c.output_dir.empty()) config_fail("output_dir must be nonempty");
  if (!(c.estimator_options.glasso_tol > 0.0)) config_fail("glasso_tol must be > 0");
  if (c.estimator_options.glasso_max_iter < 1)
    config_fail("glasso_max_iter must be >= 1");
  if (!(c.estimator_options.logo_cond_cap > 0.0))
    config_fail("logo_cond_cap must be > 0");
}

std::string experiment_config_json(const ExperimentConfig& c) {
  json j;
  j["p"] = c.p;
  j["tau"] = c.tau;
  j["n_links"] = c.n_links;
  j["replicates"] = c.replicates;
  j["q_grid"] = c.q_grid;
  j["gamma_grid"] = c.gamma_grid;
  j["pv_grid"] = c.pv_grid;
  std::vector<std::string> methods, modes;
  for (Method m : c.methods) methods.emplace_back(method_name(m));
  for (NetworkMode m : c.modes) modes.emplace_back(network_mode_name(m));
  j["methods"] = methods;
  j["modes"] = modes;
  j["bonferroni"] = c.bonferroni;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["unconditional_variant"] =
      c.unconditional_variant == UnconditionalVariant::local_reestimate
          ? "local_reestimate"
          : "global_restrict";
  j["standardize"] = c.standardize;
  j["r"] = c.r;
  j["threads"] = c.threads;
  j["burn_in"] = c.burn_in;
  j["glasso_tol"] = c.estimator_options.glasso_tol;
  j["glasso_max_iter"] = c.estimator_options.glasso_max_iter;
  j["logo_cond_cap"] = c.estimator_options.logo_cond_cap;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// sweep execution

namespace {

// (method rank, mode rank, q, gamma, pv) — the deterministic cell ordering.
using CellKey = std::tuple<int, int, int, double, double>;

struct RepOutcome {
  double tp_rate = 0.0;
  double fp_over_n = 0.0;
  double fp_rate = 0.0;
  double hyper_p = 1.0;
};

struct CellAgg {
  double tp = 0.0, fpn = 0.0, fpm = 0.0;
  int count = 0;
  int n_p05 = 0;
  int n_p1e8 = 0;
};

struct RepResults {
  std::vector<std::pair<CellKey, RepOutcome>> outcomes;
  std::vector<std::string> warnings;
};

RepOutcome score_network(const CausalityNetwork& net, const CausalityNetwork& truth,
                         int p) {
  const ConfusionCounts c = confusion(net, truth);
  RepOutcome o;
  const double K = static_cast<double>(c.K());
  const double m = static_cast<double>(c.m());
  o.tp_rate = K > 0 ? c.TP / K : 0.0;
  o.fp_over_n = K > 0 ? c.FP / K : 0.0;
  o.fp_rate = m > 0 ? c.FP / m : 0.0;
  o.hyper_p = hypergeometric_pvalue(c.TP, c.n(), c.K(), p);
  return o;
}

std::string cell_tag(int rep, int q, double gamma, Method method, NetworkMode mode) {
  std::ostringstream s;
  s << "replicate " << rep << ", q=" << q << ", gamma=" << g6(gamma)
    << ", method=" << method_name(method) << ", mode=" << network_mode_name(mode);
  return s.str();
}

void run_replicate(const ExperimentConfig& cfg, int rep, RepResults& out) {
  const std::uint64_t spec_seed = derive_seed(cfg.master_seed, rep, 0);
  const std::uint64_t noise_seed = derive_seed(cfg.master_seed, rep, 1);
  ProcessSpec spec = generate_process_spec(cfg.p, cfg.tau, cfg.n_links, spec_seed);
  const CausalityNetwork truth = true_network(spec);

  const int q_max = *std::max_element(cfg.q_grid.begin(), cfg.q_grid.end());
  const int burn = cfg.burn_in < 0 ? default_burn_in(cfg.tau) : cfg.burn_in;
  TimeSeriesPanel full;
  try {
    full = simulate(spec, q_max + cfg.tau, burn, noise_seed);
  } catch (const std::exception& e) {
    out.warnings.push_back("replicate " + std::to_string(rep) +
                           ": simulation failed: " + e.what());
    return;
  }

  std::vector<int> qs = cfg.q_grid;
  std::sort(qs.begin(), qs.end());
  std::vector<double> gammas = cfg.gamma_grid;
  std::sort(gammas.begin(), gammas.end());
  std::vector<double> pvs = cfg.pv_grid;
  std::sort(pvs.begin(), pvs.end());

  const bool need_precision =
      std::find(cfg.modes.begin(), cfg.modes.end(), NetworkMode::conditional) !=
          cfg.modes.end() ||
      std::find(cfg.modes.begin(), cfg.modes.end(), NetworkMode::inference) !=
          cfg.modes.end();

  for (int q : qs) {
    // shorter series are prefixes of the same simulated path
    TimeSeriesPanel prefix;
    prefix.data = full.data.topRows(q + cfg.tau);
    prefix.spec_seed = full.spec_seed;
    LaggedPanel lp = build_lagged_panel(prefix, cfg.tau);
    CovarianceModel model;
    try {
      model = covariance(lp, cfg.standardize);
    } catch (const std::exception& e) {
      out.warnings.push_back("replicate " + std::to_string(rep) + ", q=" +
                             std::to_string(q) + ": covariance failed: " + e.what());
      continue;
    }

    for (double gamma : gammas) {
      for (Method method : cfg.methods) {
        const int method_rank = static_cast<int>(method);
        PrecisionMatrix jm;
        bool have_jm = false;
        std::string jm_error;
        if (need_precision) {
          try {
            jm = estimate_precision(model, method, gamma, cfg.estimator_options);
            have_jm = true;
          } catch (const std::exception& e) {
            jm_error = e.what();
          }
        }

        for (NetworkMode mode : cfg.modes) {
          const int mode_rank = static_cast<int>(mode);
          try {
            if (mode == NetworkMode::inference) {
              if (!have_jm) throw causnet_error(jm_error);
              const CausalityNetwork net = inference_network(jm);
              out.outcomes.emplace_back(
                  CellKey{method_rank, mode_rank, q, gamma, 1.0},
                  score_network(net, truth, cfg.p));
              continue;
            }
            TEMatrix te;
            if (mode == NetworkMode::conditional) {
              if (!have_jm) throw causnet_error(jm_error);
              te = te_matrix(jm);
            } else {
              UnconditionalConfig ucfg;
              ucfg.method = method;
              ucfg.gamma = gamma;
              ucfg.variant = cfg.unconditional_variant;
              ucfg.standardize = cfg.standardize;
              ucfg.options = cfg.estimator_options;
              te = te_matrix(lp, ucfg);
            }
            for (double pv : pvs) {
              ValidationParams params;
              params.p_v = pv;
              params.r = cfg.r;
              params.bonferroni = cfg.bonferroni;
              const CausalityNetwork net =
                  validated_network(te, model.q, cfg.tau, params);
              out.outcomes.emplace_back(
                  CellKey{method_rank, mode_rank, q, gamma, pv},
                  score_network(net, truth, cfg.p));
            }
          } catch (const std::exception& e) {
            out.warnings.push_back(cell_tag(rep, q, gamma, method, mode) + ": " +
                                   e.what());
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<CellResult> run_experiment(const ExperimentConfig& config,
                                       RunReport* report) {
  validate_experiment_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  // every expected cell, so total failures still yield a (empty) row
  std::map<CellKey, CellAgg> cells;
  {
    std::vector<int> qs = config.q_grid;
    std::sort(qs.begin(), qs.end());
    std::vector<double> gammas = config.gamma_grid;
    std::sort(gammas.begin(), gammas.end());
    std::vector<double> pvs = config.pv_grid;
    std::sort(pvs.begin(), pvs.end());
    for (Method method : config.methods)
      for (NetworkMode mode : config.modes)
        for (int q : qs)
          for (double gamma : gammas) {
            const int mr = static_cast<int>(method);
            const int mo = static_cast<int>(mode);
            if (mode == NetworkMode::inference) {
              cells[{mr, mo, q, gamma, 1.0}] = {};
            } else {
              for (double pv : pvs) cells[{mr, mo, q, gamma, pv}] = {};
            }
          }
  }

  std::vector<RepResults> reps(config.replicates);
  const int workers =
      std::max(1, std::min(config.threads, config.replicates));
  if (workers == 1) {
    for (int rep = 0; rep < config.replicates; ++rep)
      run_replicate(config, rep, reps[rep]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int rep = next.fetch_add(1); rep < config.replicates;
             rep = next.fetch_add(1))
          run_replicate(config, rep, reps[rep]);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // merge in replicate order: deterministic regardless of scheduling
  std::vector<std::string> warnings;
  for (int rep = 0; rep < config.replicates; ++rep) {
    for (const auto& [key, outcome] : reps[rep].outcomes) {
      CellAgg& agg = cells.at(key);
      agg.tp += outcome.tp_rate;
      agg.fpn += outcome.fp_over_n;
      agg.fpm += outcome.fp_rate;
      agg.count += 1;
      agg.n_p05 += outcome.hyper_p < 0.05 ? 1 : 0;
      agg.n_p1e8 += outcome.hyper_p < 1e-8 ? 1 : 0;
    }
    warnings.insert(warnings.end(), reps[rep].warnings.begin(),
                    reps[rep].warnings.end());
  }

  std::vector<CellResult> results;
  results.reserve(cells.size());
  int incomplete = 0;
  for (const auto& [key, agg] : cells) {
    CellResult r;
    r.method = static_cast<Method>(std::get<0>(key));
    r.mode = static_cast<NetworkMode>(std::get<1>(key));
    r.q = std::get<2>(key);
    r.gamma = std::get<3>(key);
    r.pv = std::get<4>(key);
    r.n_replicates = agg.count;
    if (agg.count > 0) {
      r.tp_rate = agg.tp / agg.count;
      r.fp_over_n = agg.fpn / agg.count;
      r.fp_rate = agg.fpm / agg.count;
      r.frac_p05 = static_cast<double>(agg.n_p05) / agg.count;
      r.frac_p1e8 = static_cast<double>(agg.n_p1e8) / agg.count;
    }
    if (agg.count == config.replicates && agg.count > 0) {
      if (agg.n_p1e8 == agg.count)
        r.sig_flag = SigFlag::double_star;
      else if (agg.n_p05 == agg.count)
        r.sig_flag = SigFlag::star;
    }
    if (agg.count < config.replicates) ++incomplete;
    results.push_back(r);
  }

  if (report != nullptr) {
    report->config_json = experiment_config_json(config);
    report->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report->warnings = std::move(warnings);
    report->n_cells = static_cast<int>(results.size());
    report->n_incomplete_cells = incomplete;
    report->notes =
        "each replicate simulates one path at the largest q; smaller-q cells "
        "reuse its prefix";
  }
  return results;
}

std::vector<RocRow> roc_points(const std::vector<CellResult>& cells) {
  if (cells.empty()) throw invalid_argument_error("roc_points: no cells");
  std::vector<RocRow> rows;
  rows.reserve(cells.size());
  for (const CellResult& c : cells) {
    RocRow r;
    r.method = c.method;
    r.mode = c.mode;
    r.q = c.q;
    r.gamma = c.gamma;
    r.pv = c.pv;
    r.fp_rate = c.fp_rate;
    r.tp_rate = c.tp_rate;
    rows.push_back(r);
  }
  return rows;
}

std::string render_table(const std::vector<CellResult>& cells, NetworkMode mode,
                         bool has_gamma, double gamma, bool has_pv, double pv) {
  std::vector<CellResult> slice;
  std::set<double> gammas_seen, pvs_seen;
  for (const CellResult& c : cells) {
    if (c.mode != mode) continue;
    if (has_gamma && std::abs(c.gamma - gamma) > 1e-12) continue;
    if (has_pv && std::abs(c.pv - pv) > 1e-12) continue;
    slice.push_back(c);
    gammas_seen.insert(c.gamma);
    pvs_seen.insert(c.pv);
  }
  if (slice.empty())
    throw invalid_argument_error("table: no cells match the requested slice");
  if (gammas_seen.size() > 1)
    throw invalid_argument_error(
        "table: several gamma values in the slice; pass an explicit gamma");
  if (pvs_seen.size() > 1)
    throw invalid_argument_error(
        "table: several pv values in the slice; pass an explicit pv");

  std::set<int> q_set;
  for (const CellResult& c : slice) q_set.insert(c.q);
  std::vector<int> qs(q_set.begin(), q_set.end());

  auto find_cell = [&](Method m, int q) -> const CellResult* {
    for (const CellResult& c : slice)
      if (c.method == m && c.q == q) return &c;
    return nullptr;
  };

  std::ostringstream out;
  out << "mode=" << network_mode_name(mode) << " gamma=" << g6(*gammas_seen.begin())
      << " pv=" << g6(*pvs_seen.begin()) << "\n";
  const int w = 11;
  out << std::left;
  auto pad = [&](const std::string& s) {
    out << s;
    for (int k = static_cast<int>(s.size()); k < w; ++k) out << ' ';
  };
  pad("method");
  pad("metric");
  for (int q : qs) pad("q=" + std::to_string(q));
  out << '\n';
  for (Method m : {Method::ridge, Method::glasso, Method::logo}) {
    bool any = false;
    for (const CellResult& c : slice) any = any || c.method == m;
    if (!any) continue;
    pad(method_name(m));
    pad("TP/n");
    for (int q : qs) {
      const CellResult* c = find_cell(m, q);
      if (c == nullptr || c->n_replicates == 0) {
        pad("--");
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f%s", c->tp_rate,
                      sig_flag_name(c->sig_flag));
        pad(buf);
      }
    }
    out << '\n';
    pad("");
    pad("FP/n");
    for (int q : qs) {
      const CellResult* c = find_cell(m, q);
      if (c == nullptr || c->n_replicates == 0) {
        pad("--");
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", c->fp_over_n);
        pad(buf);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace causnet
