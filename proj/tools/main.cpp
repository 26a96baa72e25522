// bmlab: simulate stationary Gaussian sequences, expand functionals in
// Hermite chaos, and verify Brownian functional limits with Monte Carlo
// statistics.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "bmlab/errors.hpp"
#include "bmlab/experiment.hpp"
#include "bmlab/json_io.hpp"
#include "bmlab/quadrature.hpp"
#include "bmlab/registry.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/stats.hpp"

namespace {

using bmlab::CovarianceModel;
using nlohmann::json;

struct CovFlags {
  std::string family = "white";
  double hurst = 0.75;
  double a = 0.5;
  std::vector<double> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "white | fgn | exponential | table")
        ->capture_default_str();
    cmd->add_option("--H", hurst, "Hurst index for fgn");
    cmd->add_option("--a", a, "base for the exponential family");
    cmd->add_option("--values", values, "table values rho(0),rho(1),...");
  }

  CovarianceModel build() const {
    if (family == "white") return CovarianceModel::white_noise();
    if (family == "fgn") return CovarianceModel::fgn(hurst);
    if (family == "exponential") return CovarianceModel::exponential(a);
    if (family == "table") return CovarianceModel::finite_table(values);
    throw bmlab::ConfigError("unknown covariance family '" + family + "'");
  }
};

bmlab::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bmlab::ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw bmlab::ConfigError(std::string("config parse error: ") + e.what());
  }
  return bmlab::ExperimentConfig::from_json(j);
}

int run_selftest(std::uint64_t seed, int count, double tol) {
  using namespace bmlab;
  SplitMix64 rng(seed);
  int failures = 0;

  auto check = [&](bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok) ++failures;
  };

  // recurrence vs the explicit low-order polynomials
  bool rec_ok = true;
  for (int i = 0; i < 100; ++i) {
    const double x = 6.0 * (rng.next_double() - 0.5);
    const double explicit_h[6] = {
        1.0,
        x,
        x * x - 1.0,
        x * x * x - 3.0 * x,
        x * x * x * x - 6.0 * x * x + 3.0,
        x * x * x * x * x - 10.0 * x * x * x + 15.0 * x};
    for (int q = 0; q <= 5; ++q) {
      const double got = hermite_eval(q, x);
      const double scale = std::max(1.0, std::abs(explicit_h[q]));
      if (std::abs(got - explicit_h[q]) > 1e-12 * scale) rec_ok = false;
    }
  }
  check(rec_ok, "hermite recurrence matches explicit H_0..H_5");

  int shift_ok = 0, semi_ok = 0, inv_ok = 0, bound_ok = 0;
  for (int it = 0; it < count; ++it) {
    const int trunc = 2 + static_cast<int>(rng.next() % 11);
    std::vector<double> levels(static_cast<std::size_t>(trunc) + 1, 0.0);
    const int d = 1 + static_cast<int>(rng.next() % trunc);
    for (int q = d; q <= trunc; ++q)
      levels[static_cast<std::size_t>(q)] =
          (rng.next_double() < 0.3) ? 0.0 : 2.0 * (rng.next_double() - 0.5);
    levels[static_cast<std::size_t>(d)] = 1.0 + rng.next_double();
    HermiteExpansion e = make_expansion(levels);

    // lowering d times reproduces the shift operator exactly
    HermiteExpansion shifted = shift_operator(e);
    ShiftedExpansion s = to_shifted(e);
    for (int i = 0; i < e.rank; ++i) s = shift_down(s);
    bool ok = s.tensor_power == e.rank;
    for (std::size_t lvl = 0; lvl < s.coeffs.size() && ok; ++lvl) {
      const double want = lvl == 0 ? shifted.mean : (lvl < shifted.coeffs.size()
                                                         ? shifted.coeffs[lvl]
                                                         : 0.0);
      ok = std::abs(s.coeffs[lvl] - want) <= 1e-15;
    }
    shift_ok += ok;

    // semigroup law
    const double t1 = rng.next_double();
    const double t2 = rng.next_double();
    HermiteExpansion lhs = ou_semigroup(ou_semigroup(e, t1), t2);
    HermiteExpansion rhs = ou_semigroup(e, t1 + t2);
    ok = true;
    for (std::size_t q = 1; q < lhs.coeffs.size(); ++q)
      ok = ok && std::abs(lhs.coeffs[q] - rhs.coeffs[q]) <=
                     tol * std::max(1.0, std::abs(rhs.coeffs[q]));
    semi_ok += ok;

    // (-L)(-L)^{-1} = Id on centered expansions
    HermiteExpansion round = neg_L_power(neg_L_power(e, -1.0), 1.0);
    ok = true;
    for (std::size_t q = 1; q < e.coeffs.size(); ++q)
      ok = ok && std::abs(round.coeffs[q] - e.coeffs[q]) <=
                     tol * std::max(1.0, std::abs(e.coeffs[q]));
    inv_ok += ok;

    // derivative-norm series stays below the L2 bound
    ok = true;
    for (int k = 0; k <= e.rank; ++k)
      ok = ok && derivative_norm_sq(e, k) <=
                     chaos_l2_norm_sq(e) * (1.0 + 1e-12) + 1e-12;
    bound_ok += ok;
  }
  check(shift_ok == count, "lowering^d equals the coefficient shift (" +
                               std::to_string(shift_ok) + "/" +
                               std::to_string(count) + ")");
  check(semi_ok == count, "OU semigroup composition law");
  check(inv_ok == count, "number-operator inverse pair");
  check(bound_ok == count, "derivative-norm series bounded by sum q! c_q^2");

  // orthogonality through quadrature
  bool orth_ok = true;
  const auto& rule = bmlab::gauss_hermite(64);
  for (int p = 0; p <= 10; ++p) {
    for (int q = 0; q <= 10; ++q) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * hermite_eval(p, rule.nodes[i]) *
               hermite_eval(q, rule.nodes[i]);
      const double want = p == q ? factorial(q) : 0.0;
      if (std::abs(acc - want) > 1e-10 * std::max(1.0, factorial(std::max(p, q))))
        orth_ok = false;
    }
  }
  check(orth_ok, "Gauss-Hermite orthogonality E[H_p H_q] = q! delta_pq");

  std::printf("%s\n", failures == 0 ? "selftest: all identities hold"
                                    : "selftest: FAILURES");
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite-chaos functional CLT laboratory"};
  app.require_subcommand(1);

  // shared flags
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  bool strict = false;
  int threads = 1;

  // --- expand ---
  auto* cmd_expand = app.add_subcommand("expand", "Hermite coefficients of a registry function");
  std::string fn_spec = "hermite:2";
  int trunc = 40, quad_order = 128;
  cmd_expand->add_option("--function", fn_spec, "registry spec")->required();
  cmd_expand->add_option("--truncation", trunc)->capture_default_str();
  cmd_expand->add_option("--quad-order", quad_order)->capture_default_str();
  cmd_expand->add_option("--out", out_dir, "write JSON here instead of stdout");

  // --- sigma ---
  auto* cmd_sigma = app.add_subcommand("sigma", "limiting variance sigma^2 with certified tail");
  CovFlags sigma_cov;
  std::int64_t lag_cutoff = 10000;
  cmd_sigma->add_option("--function", fn_spec)->required();
  sigma_cov.attach(cmd_sigma);
  cmd_sigma->add_option("--lag-cutoff", lag_cutoff)->capture_default_str();
  cmd_sigma->add_option("--truncation", trunc)->capture_default_str();

  // --- criterion ---
  auto* cmd_crit = app.add_subcommand("criterion", "tightness criterion partial sums");
  CovFlags crit_cov;
  double crit_R = 1.5;
  cmd_crit->add_option("--function", fn_spec)->required();
  crit_cov.attach(cmd_crit);
  cmd_crit->add_option("--R", crit_R, "growth base, must exceed 1")->capture_default_str();
  cmd_crit->add_option("--truncation", trunc)->capture_default_str();
  cmd_crit->add_option("--lag-cutoff", lag_cutoff)->capture_default_str();

  // --- simulate ---
  auto* cmd_sim = app.add_subcommand("simulate", "sample stationary Gaussian paths to disk");
  CovFlags sim_cov;
  std::size_t sim_n = 1024, sim_reps = 1;
  cmd_sim->add_option("--n", sim_n, "path length")->capture_default_str();
  cmd_sim->add_option("--replications", sim_reps)->capture_default_str();
  sim_cov.attach(cmd_sim);
  cmd_sim->add_option("--seed", seed, "master seed")->capture_default_str();
  cmd_sim->add_option("--out", out_dir, "output directory")->required();
  cmd_sim->add_option("--threads", threads)->capture_default_str();

  // --- regime ---
  auto* cmd_regime = app.add_subcommand("regime", "classify the normalization regime");
  CovFlags regime_cov;
  int regime_rank = 1;
  regime_cov.attach(cmd_regime);
  cmd_regime->add_option("--rank", regime_rank, "Hermite rank d")->required();

  // --- chaos-selftest ---
  auto* cmd_self = app.add_subcommand("chaos-selftest", "exact identity suite of the chaos calculus");
  int self_count = 500;
  double self_tol = 1e-12;
  cmd_self->add_option("--count", self_count)->capture_default_str();
  cmd_self->add_option("--tol", self_tol)->capture_default_str();
  cmd_self->add_option("--seed", seed)->capture_default_str();

  // --- run / verify-fdd / verify-tightness ---
  auto add_run_like = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "experiment config JSON")->required();
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed = v; have_seed = true; },
        "override the config master seed");
    cmd->add_option("--out", out_dir, "override the config output directory");
    cmd->add_flag("--strict", strict, "fail instead of overriding mismatched settings");
    cmd->add_option("--threads", threads, "parallelism degree (never changes results)")
        ->capture_default_str();
    return cmd;
  };
  add_run_like("run", "full experiment: simulate, verify, report");
  auto* cmd_vfdd = add_run_like("verify-fdd", "finite-dimensional covariance check only");
  auto* cmd_vtight = add_run_like("verify-tightness", "increment-moment diagnostic only");
  std::string paths_dir;
  cmd_vfdd->add_option("--paths", paths_dir, "directory of stored path dumps");
  cmd_vtight->add_option("--paths", paths_dir, "directory of stored path dumps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage errors are exit code 1
  }

  try {
    if (cmd_expand->parsed()) {
      const auto e = bmlab::registry_expand(fn_spec, trunc, quad_order);
      json j = bmlab::expansion_to_json(e);
      j["discarded_l2"] = e.discarded_l2;
      if (out_dir.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(out_dir);
        if (!out) throw bmlab::ConfigError("cannot open " + out_dir);
        out << j.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_sigma->parsed()) {
      const auto e = bmlab::registry_expand(fn_spec, trunc, quad_order);
      const auto model = sigma_cov.build();
      const auto sig = bmlab::sigma_squared(e, model, 0, lag_cutoff);
      std::printf("sigma^2 = %.9f +/- %.3g (rank %d, %d chaos terms, lag cutoff %lld)\n",
                  sig.value, sig.tail_bound, e.rank, sig.terms_used,
                  static_cast<long long>(sig.lag_cutoff));
      return 0;
    }

    if (cmd_crit->parsed()) {
      const auto e = bmlab::registry_expand(fn_spec, trunc, quad_order);
      const auto model = crit_cov.build();
      const auto bh = bmlab::ben_hariz_sum(e, model, crit_R, 0, lag_cutoff);
      std::printf("q,term\n");
      for (std::size_t i = 0; i < bh.per_term.size(); ++i)
        std::printf("%d,%s\n", bh.first_q + static_cast<int>(i),
                    bmlab::format_double(bh.per_term[i]).c_str());
      std::printf("partial,%s\n", bmlab::format_double(bh.partial).c_str());
      return 0;
    }

    if (cmd_sim->parsed()) {
      const auto model = sim_cov.build();
      const auto batch =
          bmlab::simulate_batch(model, sim_n, sim_reps, seed, threads);
      for (std::size_t i = 0; i < batch.size(); ++i)
        bmlab::write_path_dump(batch[i], out_dir,
                               "path_" + std::to_string(i));
      std::printf("wrote %zu path dump(s) to %s (method %s)\n", batch.size(),
                  out_dir.c_str(), batch.front().method.c_str());
      return 0;
    }

    if (cmd_regime->parsed()) {
      const auto verdict = bmlab::classify_regime(regime_cov.build(), regime_rank);
      std::cout << verdict.describe() << "\n";
      return 0;
    }

    if (cmd_self->parsed()) return run_selftest(seed, self_count, self_tol);

    // run-like commands
    bmlab::ExperimentConfig cfg = load_config(config_path);
    if (have_seed) cfg.master_seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.strict = strict;
    cfg.threads = threads;
    if (cmd_vfdd->parsed()) {
      cfg.run_tightness = false;
      cfg.run_hyper = false;
      cfg.run_fdd = true;
    } else if (cmd_vtight->parsed()) {
      cfg.run_fdd = false;
      cfg.run_hyper = false;
      cfg.run_tightness = true;
    }

    if ((cmd_vfdd->parsed() || cmd_vtight->parsed()) && !paths_dir.empty()) {
      // stored-path mode: load dumps, build Y, run the one statistic
      const auto e = bmlab::config_expansion(cfg);
      std::vector<bmlab::PartialSumPath> ys;
      for (std::size_t i = 0;; ++i) {
        const std::string base = "path_" + std::to_string(i);
        if (!std::ifstream(paths_dir + "/" + base + ".json")) break;
        const auto path = bmlab::read_path_dump(paths_dir, base);
        ys.push_back(bmlab::build_Y(path, e, cfg.grid,
                                    bmlab::Normalization::sqrt_n));
      }
      if (ys.empty())
        throw bmlab::ConfigError("no path dumps found in " + paths_dir);
      if (cmd_vfdd->parsed()) {
        const auto model = bmlab::covariance_from_json(cfg.covariance);
        const auto sig = bmlab::sigma_squared(e, model, 0, cfg.lag_cutoff);
        std::vector<double> times(cfg.grid.begin() + 1, cfg.grid.end());
        const auto check = bmlab::fdd_covariance_check(ys, times, sig.value);
        std::printf("fdd: max |dev| %.6g, max dev/SE %.3f over %zu entries\n",
                    check.max_abs_dev, check.max_se_multiple,
                    check.entries.size());
      } else {
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t i = 0; i + 1 < cfg.grid.size(); ++i)
          pairs.emplace_back(cfg.grid[i], cfg.grid[i + 1]);
        const auto diag = bmlab::tightness_diagnostic(ys, cfg.moment_p, pairs);
        std::printf("tightness: max ratio %.6f over %zu pairs\n",
                    diag.max_ratio, diag.table.size());
      }
      return 0;
    }

    const auto report = bmlab::run_experiment(cfg);
    for (const auto& w : report.warnings)
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const auto& v : report.verdicts)
      std::printf("%-28s %s (observed %.6g, tolerance %s=%.6g)%s\n",
                  v.name.c_str(), v.pass ? "pass" : "FAIL", v.observed,
                  v.tolerance_name.c_str(), v.tolerance,
                  v.gating ? "" : " [informational]");
    std::printf("experiment %s: %s (%.1fs)\n", report.experiment_id.c_str(),
                report.all_pass ? "all gating checks pass" : "FAILURES",
                report.wall_seconds);
    return report.all_pass ? 0 : 3;
  } catch (const bmlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const bmlab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
