// Copyright 2026 The aoi-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aoi_lab/analysis.hpp"
#include "aoi_lab/errors.hpp"
#include "aoi_lab/leakage.hpp"
#include "aoi_lab/params.hpp"
#include "aoi_lab/presampling.hpp"
#include "aoi_lab/random.hpp"
#include "aoi_lab/sim.hpp"

namespace aoi_lab::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kInfeasible = 2,
  kNoClosedForm = 3,
  kValidationFailed = 4,
};

struct ExperimentConfig {
  std::string busy = "exp";
  double rate = 1.0;
  double value = 1.0;
  std::string samples_file;

  std::string leakage = "synth-exp";
  double sigma2 = 1.0;
  double theta = 1.0;
  double sigma02 = 1.0;
  double scale = 1.0;

  std::string penalty = "linear";
  double power = 2.0;
  double alpha = 0.5;

  double eps = 0.0;
  int k = 1;
  int k_max = 50;
  std::optional<double> delta;
  std::optional<double> zeta;

  std::uint64_t epochs = 1'000'000;
  std::uint64_t burn_in = 1'000;
  std::uint64_t seed = 1;
  bool threshold_policy = false;

  std::vector<double> eps_list;
  std::vector<double> param_list;  // rate for exp, value for det
  std::vector<double> zeta_list;
  std::vector<double> delta_list;
  std::vector<int> k_list;

  std::string out;
  std::string format = "csv";
  std::string trace;
};

// Numbers are printed with 9 significant digits everywhere.
inline std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline BusyTimeDistribution MakeBusy(const ExperimentConfig& cfg,
                                     std::optional<double> param = {}) {
  if (cfg.busy == "exp") {
    return BusyTimeDistribution::MakeExponential(param.value_or(cfg.rate));
  }
  if (cfg.busy == "det") {
    return BusyTimeDistribution::MakeDeterministic(param.value_or(cfg.value));
  }
  if (cfg.busy == "empirical") {
    if (param) {
      throw ConfigError("empirical busy times cannot be swept");
    }
    std::ifstream in(cfg.samples_file);
    if (!in) throw ConfigError("cannot read samples file '" + cfg.samples_file + "'");
    std::vector<double> samples;
    for (double x; in >> x;) samples.push_back(x);
    if (!in.eof()) throw ConfigError("malformed samples file");
    return BusyTimeDistribution::MakeEmpirical(std::move(samples));
  }
  throw ConfigError("unknown busy-time distribution '" + cfg.busy + "'");
}

inline LeakageModel MakeLeakage(const ExperimentConfig& cfg) {
  if (cfg.leakage == "ou") {
    return LeakageModel::MakeOU(cfg.sigma2, cfg.theta, cfg.sigma02);
  }
  if (cfg.leakage == "wiener") return LeakageModel::MakeWiener(cfg.sigma02);
  if (cfg.leakage == "synth-exp") return LeakageModel::MakeSyntheticExp(cfg.scale);
  throw ConfigError("unknown leakage model '" + cfg.leakage + "'");
}

inline AgePenalty MakePenalty(const ExperimentConfig& cfg) {
  if (cfg.penalty == "linear") return AgePenalty::MakeLinear();
  if (cfg.penalty == "power") return AgePenalty::MakePower(cfg.power);
  if (cfg.penalty == "exp") return AgePenalty::MakeExponential(cfg.alpha);
  throw ConfigError("unknown penalty '" + cfg.penalty + "'");
}

inline SystemParams MakeParams(const ExperimentConfig& cfg) {
  SystemParams p;
  p.epsilon = cfg.eps;
  p.k_max = cfg.k;
  p.delta = cfg.delta.value_or(0.0);
  p.busy = MakeBusy(cfg);
  p.leakage = MakeLeakage(cfg);
  p.penalty = MakePenalty(cfg);
  p.Validate();
  return p;
}

// Post-sampling wait: --zeta as given, or solved from --delta.
inline double ResolveZeta(const ExperimentConfig& cfg,
                          const BusyTimeDistribution& busy) {
  if (cfg.zeta.has_value() == cfg.delta.has_value()) {
    throw ConfigError("exactly one of --delta and --zeta is required");
  }
  if (cfg.zeta) {
    if (!(*cfg.zeta >= 0.0)) throw ConfigError("--zeta must be nonnegative");
    return *cfg.zeta;
  }
  return SolveZeta(MakeLeakage(cfg), busy, *cfg.delta).zeta;
}

// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
inline void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Output helpers.

inline const std::vector<std::string>& CurveColumns() {
  static const std::vector<std::string> kColumns = {
      "K",     "eps",  "lambda_or_param", "zeta",
      "e_r",   "e_psi", "e_l",            "e_l2",
      "avg_age", "avg_age_paper_variant", "is_kstar"};
  return kColumns;
}

struct CurveRow {
  double param;
  AnalyticReport report;
  bool is_kstar;
};

inline void AppendCurve(std::vector<CurveRow>& rows, double param,
                        const KSearchResult& search) {
  for (const auto& rep : search.curve) {
    rows.push_back({param, rep, rep.k_max == search.k_star});
  }
}

inline void WriteCurve(std::ostream& out, const std::vector<CurveRow>& rows,
                       const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      const auto& r = row.report;
      arr.push_back({{"K", r.k_max},
                     {"eps", r.epsilon},
                     {"lambda_or_param", row.param},
                     {"zeta", r.zeta},
                     {"e_r", r.moments.e_r},
                     {"e_psi", r.moments.e_psi},
                     {"e_l", r.e_l},
                     {"e_l2", r.e_l2},
                     {"avg_age", r.avg_age},
                     {"avg_age_paper_variant", r.avg_age_paper_variant},
                     {"is_kstar", row.is_kstar}});
    }
    out << arr.dump(2) << '\n';
    return;
  }
  const auto& cols = CurveColumns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << r.k_max << ',' << Num(r.epsilon) << ',' << Num(row.param) << ','
        << Num(r.zeta) << ',' << Num(r.moments.e_r) << ','
        << Num(r.moments.e_psi) << ',' << Num(r.e_l) << ',' << Num(r.e_l2)
        << ',' << Num(r.avg_age) << ',' << Num(r.avg_age_paper_variant) << ','
        << (row.is_kstar ? 1 : 0) << '\n';
  }
}

// Writes to --out when set, otherwise to `fallback`.
template <typename Writer>
void Emit(const ExperimentConfig& cfg, std::ostream& fallback, Writer&& write) {
  if (cfg.out.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + cfg.out + "'");
  write(file);
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns a process exit code.

inline int CmdZeta(const ExperimentConfig& cfg, std::ostream& out) {
  if (!cfg.delta) throw ConfigError("zeta requires --delta");
  const ZetaSolution sol =
      SolveZeta(MakeLeakage(cfg), MakeBusy(cfg), *cfg.delta);
  Emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      nlohmann::ordered_json j = {{"zeta", sol.zeta},
                                  {"natural_cover", sol.natural_cover},
                                  {"residual", sol.residual}};
      os << j.dump(2) << '\n';
      return;
    }
    os << "zeta " << Num(sol.zeta) << '\n'
       << "natural_cover " << (sol.natural_cover ? "true" : "false") << '\n'
       << "residual " << Num(sol.residual) << '\n';
    if (sol.natural_cover) os << "natural cover: no post-sampling wait needed\n";
  });
  return kOk;
}

inline int CmdAnalyze(const ExperimentConfig& cfg, std::ostream& out) {
  const SystemParams params = MakeParams(cfg);
  if (!params.penalty.is_linear()) {
    throw Error(ErrorCode::kUnsupportedClosedForm,
                "analyze needs --penalty linear; use 'simulate' instead");
  }
  const double zeta = ResolveZeta(cfg, params.busy);
  std::vector<CurveRow> rows;
  AppendCurve(rows, params.busy.parameter(), OptimalK(params, zeta, cfg.k_max));
  Emit(cfg, out, [&](std::ostream& os) { WriteCurve(os, rows, cfg.format); });
  return kOk;
}

inline int CmdSimulate(const ExperimentConfig& cfg, std::ostream& out) {
  const SystemParams params = MakeParams(cfg);
  const double zeta = ResolveZeta(cfg, params.busy);
  std::optional<ThresholdPolicy> policy;
  if (cfg.threshold_policy) {
    policy = SolveGamma(PolicyContext{params.busy, zeta, params.penalty});
  }
  std::ofstream trace_file;
  SimOptions options;
  if (!cfg.trace.empty()) {
    trace_file.open(cfg.trace, std::ios::binary);
    if (!trace_file) throw ConfigError("cannot open trace file '" + cfg.trace + "'");
    options.trace = &trace_file;
  }
  const SimulationResult res =
      Simulate(params, zeta, policy ? &*policy : nullptr, cfg.epochs, cfg.seed,
               cfg.burn_in, options);
  std::optional<FeasibilityVerdict> verdict;
  if (cfg.delta) verdict = LeakageFeasibility(res, *cfg.delta);

  Emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      nlohmann::ordered_json j = {
          {"zeta", zeta},
          {"avg_penalty", res.avg_penalty},
          {"avg_penalty_se", res.avg_penalty_se},
          {"mean_peak_leakage", res.mean_peak_leakage},
          {"mean_peak_leakage_se", res.mean_peak_leakage_se},
          {"mean_epoch_length", res.mean_epoch_length},
          {"mean_r", res.mean_r},
          {"mean_psi", res.mean_psi},
          {"n_epochs", res.n_epochs},
          {"seed", res.seed}};
      if (policy) {
        j["gamma"] = policy->gamma;
        j["policy_heuristic"] = res.policy_heuristic;
      }
      if (verdict) {
        j["feasible"] = verdict->satisfied;
        j["slack"] = verdict->slack;
      }
      os << j.dump(2) << '\n';
      return;
    }
    os << "zeta " << Num(zeta) << '\n';
    if (policy) {
      os << "gamma " << Num(policy->gamma) << '\n';
      if (res.policy_heuristic) os << "policy heuristic (epsilon > 0)\n";
    }
    os << "avg_penalty " << Num(res.avg_penalty) << " +- "
       << Num(res.avg_penalty_se) << '\n'
       << "mean_peak_leakage " << Num(res.mean_peak_leakage) << " +- "
       << Num(res.mean_peak_leakage_se) << '\n'
       << "mean_epoch_length " << Num(res.mean_epoch_length) << '\n'
       << "mean_r " << Num(res.mean_r) << '\n'
       << "mean_psi " << Num(res.mean_psi) << '\n'
       << "n_epochs " << res.n_epochs << '\n'
       << "seed " << res.seed << '\n';
    if (verdict) {
      os << "feasibility " << (verdict->satisfied ? "satisfied" : "violated")
         << " slack " << Num(verdict->slack) << '\n';
    }
  });
  return kOk;
}

struct ValidationRow {
  double eps;
  int k;
  double zeta;
  AnalyticReport analytic;
  SimulationResult sim;
  double z_corrected;
  double z_paper;
  bool pass;
};

inline int CmdValidate(const ExperimentConfig& cfg, std::ostream& out,
                       std::ostream& err) {
  const SystemParams base = MakeParams(cfg);
  if (!base.penalty.is_linear()) {
    throw Error(ErrorCode::kUnsupportedClosedForm,
                "validate compares against the linear-penalty closed form");
  }
  const double zeta = ResolveZeta(cfg, base.busy);
  const std::vector<double> eps_axis =
      cfg.eps_list.empty() ? std::vector<double>{cfg.eps} : cfg.eps_list;
  const std::vector<int> k_axis =
      cfg.k_list.empty() ? std::vector<int>{cfg.k} : cfg.k_list;

  std::vector<ValidationRow> rows(eps_axis.size() * k_axis.size());
  ParallelFor(rows.size(), [&](std::size_t i) {
    SystemParams p = base;
    p.epsilon = eps_axis[i / k_axis.size()];
    p.k_max = k_axis[i % k_axis.size()];
    p.Validate();
    ValidationRow& row = rows[i];
    row.eps = p.epsilon;
    row.k = p.k_max;
    row.zeta = zeta;
    row.analytic = AverageAge(p, zeta);
    row.sim = Simulate(p, zeta, nullptr, cfg.epochs, DeriveSeed(cfg.seed, i),
                       cfg.burn_in);
    const double se = row.sim.avg_penalty_se;
    row.z_corrected = (row.sim.avg_penalty - row.analytic.avg_age) / se;
    row.z_paper = (row.sim.avg_penalty - row.analytic.avg_age_paper_variant) / se;
    row.pass = std::abs(row.sim.avg_penalty - row.analytic.avg_age) <= 3.0 * se;
  });

  bool all_pass = true;
  Emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        arr.push_back({{"eps", r.eps},
                       {"K", r.k},
                       {"zeta", r.zeta},
                       {"avg_age", r.analytic.avg_age},
                       {"avg_age_paper_variant", r.analytic.avg_age_paper_variant},
                       {"simulated", r.sim.avg_penalty},
                       {"stderr", r.sim.avg_penalty_se},
                       {"z_corrected", r.z_corrected},
                       {"z_paper_variant", r.z_paper},
                       {"verdict", r.pass ? "PASS" : "FAIL"}});
      }
      os << arr.dump(2) << '\n';
    } else {
      os << "eps,K,zeta,avg_age,avg_age_paper_variant,simulated,stderr,"
            "z_corrected,z_paper_variant,verdict\n";
      for (const auto& r : rows) {
        os << Num(r.eps) << ',' << r.k << ',' << Num(r.zeta) << ','
           << Num(r.analytic.avg_age) << ','
           << Num(r.analytic.avg_age_paper_variant) << ','
           << Num(r.sim.avg_penalty) << ',' << Num(r.sim.avg_penalty_se) << ','
           << Num(r.z_corrected) << ',' << Num(r.z_paper) << ','
           << (r.pass ? "PASS" : "FAIL") << '\n';
      }
    }
  });
  for (const auto& r : rows) {
    if (!r.pass) {
      all_pass = false;
      err << "validation failed at eps=" << Num(r.eps) << " K=" << r.k
          << ": simulated " << Num(r.sim.avg_penalty) << " vs analytic "
          << Num(r.analytic.avg_age) << " (" << Num(r.z_corrected)
          << " standard errors)\n";
    }
  }
  return all_pass ? kOk : kValidationFailed;
}

inline int CmdSweep(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.eps_list.empty() && cfg.param_list.empty() && cfg.zeta_list.empty() &&
      cfg.delta_list.empty()) {
    throw ConfigError(
        "sweep needs at least one of --eps-list, --param-list, --zeta-list, "
        "--delta-list");
  }
  if (!cfg.zeta_list.empty() && !cfg.delta_list.empty()) {
    throw ConfigError("--zeta-list and --delta-list are mutually exclusive");
  }
  const SystemParams base = MakeParams(cfg);
  if (!base.penalty.is_linear()) {
    throw Error(ErrorCode::kUnsupportedClosedForm,
                "sweep evaluates the linear-penalty closed form");
  }
  const std::vector<double> eps_axis =
      cfg.eps_list.empty() ? std::vector<double>{cfg.eps} : cfg.eps_list;
  std::vector<std::optional<double>> param_axis;
  if (cfg.param_list.empty()) {
    param_axis.push_back(std::nullopt);
  } else {
    for (double v : cfg.param_list) param_axis.push_back(v);
  }
  // Third axis: zeta values, or budgets solved for zeta per grid point.
  bool solve_wait = !cfg.delta_list.empty();
  std::vector<double> wait_axis = solve_wait ? cfg.delta_list : cfg.zeta_list;
  if (wait_axis.empty()) {
    if (cfg.zeta.has_value() == cfg.delta.has_value()) {
      throw ConfigError("exactly one of --delta and --zeta is required");
    }
    solve_wait = cfg.delta.has_value();
    wait_axis.push_back(solve_wait ? *cfg.delta : *cfg.zeta);
  }
  const LeakageModel leakage = MakeLeakage(cfg);

  const std::size_t n_param = param_axis.size();
  const std::size_t n_wait = wait_axis.size();
  const std::size_t n_points = eps_axis.size() * n_param * n_wait;
  std::vector<std::vector<CurveRow>> blocks(n_points);
  ParallelFor(n_points, [&](std::size_t i) {
    const double eps = eps_axis[i / (n_param * n_wait)];
    const auto& param = param_axis[(i / n_wait) % n_param];
    const double wait = wait_axis[i % n_wait];
    SystemParams p = base;
    p.epsilon = eps;
    p.busy = MakeBusy(cfg, param);
    p.Validate();
    const double zeta = solve_wait ? SolveZeta(leakage, p.busy, wait).zeta : wait;
    if (!(zeta >= 0.0)) throw ConfigError("zeta values must be nonnegative");
    AppendCurve(blocks[i], p.busy.parameter(), OptimalK(p, zeta, cfg.k_max));
  });
  std::vector<CurveRow> rows;
  for (auto& b : blocks) rows.insert(rows.end(), b.begin(), b.end());
  Emit(cfg, out, [&](std::ostream& os) { WriteCurve(os, rows, cfg.format); });
  return kOk;
}

// ---------------------------------------------------------------------------

inline void AddSharedOptions(CLI::App& app, ExperimentConfig& cfg) {
  app.add_option("--busy", cfg.busy, "Busy-time distribution")
      ->check(CLI::IsMember({"exp", "det", "empirical"}));
  app.add_option("--rate", cfg.rate, "Exponential busy-time rate");
  app.add_option("--value", cfg.value, "Deterministic busy time");
  app.add_option("--samples-file", cfg.samples_file,
                 "Whitespace-separated busy-time samples");
  app.add_option("--leakage", cfg.leakage, "Leakage model")
      ->check(CLI::IsMember({"ou", "wiener", "synth-exp"}));
  app.add_option("--sigma2", cfg.sigma2, "OU diffusion variance");
  app.add_option("--theta", cfg.theta, "OU mean-reversion rate");
  app.add_option("--sigma02", cfg.sigma02, "Observation noise variance");
  app.add_option("--scale", cfg.scale, "Synthetic leakage scale");
  app.add_option("--penalty", cfg.penalty, "Age penalty")
      ->check(CLI::IsMember({"linear", "power", "exp"}));
  app.add_option("--power", cfg.power, "Power penalty exponent");
  app.add_option("--alpha", cfg.alpha, "Exponential penalty rate");
  app.add_option("--eps", cfg.eps, "Erasure probability");
  app.add_option("--k", cfg.k, "Transmission attempts per sample");
  app.add_option("--k-max", cfg.k_max, "Largest K searched");
  app.add_option("--delta", cfg.delta, "Leakage budget");
  app.add_option("--zeta", cfg.zeta, "Post-sampling wait; excludes --delta");
  app.add_option("--epochs", cfg.epochs, "Measured epochs");
  app.add_option("--burn-in", cfg.burn_in, "Discarded leading epochs");
  app.add_option("--seed", cfg.seed, "Master seed")->envname("AOI_LAB_SEED");
  app.add_flag("--threshold-policy", cfg.threshold_policy,
               "Apply the optimal pre-sampling threshold policy");
  app.add_option("--eps-list", cfg.eps_list, "Sweep/validate erasure grid")
      ->delimiter(',');
  app.add_option("--param-list", cfg.param_list,
                 "Sweep grid of busy-time rate (exp) or value (det)")
      ->delimiter(',');
  app.add_option("--zeta-list", cfg.zeta_list, "Sweep grid of zeta")
      ->delimiter(',');
  app.add_option("--delta-list", cfg.delta_list, "Sweep grid of budgets")
      ->delimiter(',');
  app.add_option("--k-list", cfg.k_list, "Validate grid of K")->delimiter(',');
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--trace", cfg.trace, "Per-epoch trace file (simulate)");
}

inline int RunCli(int argc, const char* const* argv, std::ostream& out,
                  std::ostream& err) {
  CLI::App app{"Privacy-constrained status updating over erasure channels"};
  app.set_config("--config", "", "Flat key = value file mirroring the flags");
  app.require_subcommand(1);
  ExperimentConfig cfg;
  AddSharedOptions(app, cfg);
  auto* zeta = app.add_subcommand("zeta", "Solve the post-sampling wait");
  auto* analyze = app.add_subcommand("analyze", "Closed-form age versus K");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
  auto* validate =
      app.add_subcommand("validate", "Closed form versus simulation");
  auto* sweep = app.add_subcommand("sweep", "Closed-form curves over a grid");
  for (auto* sub : {zeta, analyze, simulate, validate, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*zeta) return CmdZeta(cfg, out);
    if (*analyze) return CmdAnalyze(cfg, out);
    if (*simulate) return CmdSimulate(cfg, out);
    if (*validate) return CmdValidate(cfg, out, err);
    return CmdSweep(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kInfeasibleBudget: return kInfeasible;
      case ErrorCode::kUnsupportedClosedForm: return kNoClosedForm;
      default: return kConfigError;
    }
  }
}

}  // namespace aoi_lab::cli
