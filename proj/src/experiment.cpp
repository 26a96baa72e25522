#include "bmlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bmlab/errors.hpp"
#include "bmlab/json_io.hpp"
#include "bmlab/registry.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "bmlab 0.1.0";
constexpr const char* kRngTag = "splitmix64/inverse-cdf";
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::map<std::string, double> default_tolerances() {
  return {
      {"var_rel", 0.07},          // relative variance error vs sigma^2
      {"critical_var_rel", 0.25}, // same, critical regime (log-rate)
      {"monotone_slack", 0.0},    // allowed increase of |est - target|
      {"ks_alpha", 0.01},
      {"fdd_se_mult", 4.0},
      {"incr_se_mult", 4.0},
      {"tightness_drift", 0.10},
      {"hyper_slack_se", 4.0},
  };
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 16; ++k) g.push_back(k / 16.0);
  return g;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  const double ma = pairwise_mean(a);
  const double mb = pairwise_mean(b);
  std::vector<double> ab(a.size()), aa(a.size()), bb(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    ab[i] = da * db;
    aa[i] = da * da;
    bb[i] = db * db;
  }
  const double denom = std::sqrt(pairwise_sum(aa) * pairwise_sum(bb));
  return denom > 0.0 ? pairwise_sum(ab) / denom : 0.0;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x00000100000001B3ULL;
  }
  return h;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ExperimentConfig::ExperimentConfig()
    : grid(default_grid()), tolerances(default_tolerances()) {}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;

  if (j.contains("id")) cfg.id = j["id"].get<std::string>();
  if (j.contains("function")) {
    if (j["function"].is_string()) {
      cfg.function = j["function"].get<std::string>();
    } else if (j["function"].is_object() && j["function"].contains("coeffs")) {
      cfg.coeff_levels = j["function"]["coeffs"].get<std::vector<double>>();
      cfg.function.clear();
    } else {
      throw ConfigError("config: 'function' must be a registry name or "
                        "{\"coeffs\": [...]}");
    }
  }
  if (j.contains("covariance")) cfg.covariance = j["covariance"];
  if (j.contains("n_ladder"))
    cfg.n_ladder = j["n_ladder"].get<std::vector<std::size_t>>();
  if (j.contains("replications"))
    cfg.replications = j["replications"].get<std::size_t>();
  if (j.contains("moment_p")) cfg.moment_p = j["moment_p"].get<double>();
  if (j.contains("grid")) cfg.grid = j["grid"].get<std::vector<double>>();
  if (j.contains("tolerances"))
    for (const auto& [k, v] : j["tolerances"].items())
      cfg.tolerances[k] = v.get<double>();
  if (j.contains("master_seed")) {
    if (j["master_seed"].is_string())
      cfg.master_seed = std::stoull(j["master_seed"].get<std::string>());
    else
      cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  }
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("normalization"))
    cfg.normalization = j["normalization"].get<std::string>();
  if (j.contains("truncation")) cfg.truncation = j["truncation"].get<int>();
  if (j.contains("quad_order")) cfg.quad_order = j["quad_order"].get<int>();
  if (j.contains("lag_cutoff"))
    cfg.lag_cutoff = j["lag_cutoff"].get<std::int64_t>();
  if (j.contains("run_fdd")) cfg.run_fdd = j["run_fdd"].get<bool>();
  if (j.contains("run_tightness"))
    cfg.run_tightness = j["run_tightness"].get<bool>();
  if (j.contains("run_hyper")) cfg.run_hyper = j["run_hyper"].get<bool>();
  if (j.contains("build_z")) cfg.build_z = j["build_z"].get<bool>();
  if (j.contains("export_trajectories"))
    cfg.export_trajectories = j["export_trajectories"].get<bool>();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["id"] = id;
  if (!coeff_levels.empty())
    j["function"] = json{{"coeffs", coeff_levels}};
  else
    j["function"] = function;
  j["covariance"] = covariance;
  j["n_ladder"] = n_ladder;
  j["replications"] = replications;
  j["moment_p"] = moment_p;
  j["grid"] = grid;
  j["tolerances"] = tolerances;
  j["master_seed"] = std::to_string(master_seed);  // string: json numbers top out at 2^53
  j["out_dir"] = out_dir;
  j["normalization"] = normalization;
  j["truncation"] = truncation;
  j["quad_order"] = quad_order;
  j["lag_cutoff"] = lag_cutoff;
  j["run_fdd"] = run_fdd;
  j["run_tightness"] = run_tightness;
  j["run_hyper"] = run_hyper;
  j["build_z"] = build_z;
  j["export_trajectories"] = export_trajectories;
  return j;
}

HermiteExpansion config_expansion(const ExperimentConfig& cfg) {
  if (!cfg.coeff_levels.empty()) {
    HermiteExpansion e = make_expansion(cfg.coeff_levels);
    if (e.rank < 1)
      throw ZeroRank("config: coefficient expansion has rank 0");
    return e;
  }
  return registry_expand(cfg.function, cfg.truncation, cfg.quad_order);
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = cfg.to_json();
  j.erase("out_dir");  // location does not change the experiment
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

namespace {

struct VerdictBuilder {
  const std::map<std::string, double>& tol;
  std::vector<VerdictRow> rows;

  void add(const std::string& name, const std::string& tol_name,
           double observed, bool pass, bool gating = true) {
    VerdictRow r;
    r.name = name;
    r.tolerance_name = tol_name;
    r.tolerance = tol.count(tol_name) ? tol.at(tol_name) : kNan;
    r.observed = observed;
    r.pass = pass;
    r.gating = gating;
    rows.push_back(r);
  }
};

json ks_to_json(const KsResult& ks) {
  return json{{"statistic", ks.statistic}, {"p_value", ks.p_value}};
}

json entry_to_json(const LadderEntry& le) {
  json j;
  j["n"] = le.n;
  j["var_estimate"] = le.var_estimate;
  j["var_se"] = le.var_se;
  j["var_target"] = le.var_target;
  j["ks"] = ks_to_json(le.ks);
  j["ks_sigma"] = le.ks_sigma;
  j["ks_studentized"] = le.ks_studentized;
  j["incr_corr"] = le.incr_corr;
  j["incr_se"] = le.incr_se;
  if (le.fdd) {
    j["fdd_max_abs_dev"] = le.fdd->max_abs_dev;
    j["fdd_max_se_multiple"] = le.fdd->max_se_multiple;
  }
  if (le.tightness) j["tightness_max_ratio"] = le.tightness->max_ratio;
  if (le.hyper) {
    j["hyper_lhs"] = le.hyper->lhs;
    j["hyper_rhs"] = le.hyper->rhs;
    j["hyper_ok"] = le.hyper->ok;
  }
  if (le.z_max_dev > 0.0) j["z_max_dev"] = le.z_max_dev;
  return j;
}

}  // namespace

json ConvergenceReport::to_json() const {
  json j;
  j["experiment_id"] = experiment_id;
  j["regime"] = to_string(regime.regime);
  j["normalization"] = to_string(regime.normalization);
  j["rank"] = regime.rank;
  if (regime.has_hurst) j["hurst"] = regime.hurst;
  j["expansion"] = {{"rank", expansion_rank},
                    {"truncation", expansion_truncation},
                    {"discarded_l2", expansion_discarded_l2}};
  if (sigma2) {
    j["sigma2"] = {{"value", sigma2->value},
                   {"tail_bound", sigma2->tail_bound},
                   {"terms_used", sigma2->terms_used},
                   {"lag_cutoff", sigma2->lag_cutoff}};
  }
  j["var_target"] = var_target;
  j["ladder"] = json::array();
  for (const auto& le : ladder) j["ladder"].push_back(entry_to_json(le));
  j["verdicts"] = json::array();
  for (const auto& v : verdicts)
    j["verdicts"].push_back(json{{"name", v.name},
                                 {"tolerance_name", v.tolerance_name},
                                 {"tolerance", v.tolerance},
                                 {"observed", v.observed},
                                 {"pass", v.pass},
                                 {"gating", v.gating}});
  j["all_pass"] = all_pass;
  j["wall_seconds"] = wall_seconds;
  j["master_seed"] = std::to_string(master_seed);
  j["warnings"] = warnings;
  return j;
}

namespace {

// dyadic pair grid: non-overlapping windows at every power-of-two scale
std::vector<std::pair<double, double>> dyadic_pairs(
    const std::vector<double>& grid) {
  std::vector<std::pair<double, double>> pairs;
  const std::size_t last = grid.size() - 1;
  for (std::size_t scale = 1; scale <= last; scale *= 2)
    for (std::size_t i = 0; i + scale <= last; i += scale)
      pairs.emplace_back(grid[i], grid[i + scale]);
  return pairs;
}

struct OutputFiles {
  std::string summary_csv;
  std::string fdd_csv;
  std::string tightness_csv;
};

void emit_outputs(const ExperimentConfig& cfg, const ConvergenceReport& report,
                  const OutputFiles& files,
                  const std::vector<std::string>& traj_files) {
  if (cfg.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);

  write_text_file(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text_file(dir / "summary.csv", files.summary_csv);
  if (!files.fdd_csv.empty()) write_text_file(dir / "fdd.csv", files.fdd_csv);
  if (!files.tightness_csv.empty())
    write_text_file(dir / "tightness.csv", files.tightness_csv);

  json manifest;
  manifest["config"] = cfg.to_json();
  manifest["config_hash"] = config_hash(cfg);
  manifest["tool_version"] = kToolVersion;
  manifest["rng"] = kRngTag;
  manifest["seed_derivation"] =
      "replication i of every ladder entry uses split_stream(master_seed, i); "
      "hyper checks use split_stream(split_stream(master_seed, 0xB10C), "
      "ladder_index)";
  manifest["threads"] = cfg.threads;
  manifest["wall_seconds"] = report.wall_seconds;
  json csvs = json::array();
  csvs.push_back("summary.csv");
  if (!files.fdd_csv.empty()) csvs.push_back("fdd.csv");
  if (!files.tightness_csv.empty()) csvs.push_back("tightness.csv");
  for (const auto& f : traj_files) csvs.push_back(f);
  manifest["csv_files"] = csvs;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();

  if (cfg.n_ladder.empty()) throw ConfigError("config: n_ladder is empty");
  if (cfg.replications < 20)
    throw ConfigError(
        "config: replications must be >= 20 (normality test minimum)");
  if (cfg.grid.size() < 2 || cfg.grid.front() != 0.0)
    throw ConfigError("config: grid must start at 0 and have >= 2 points");
  if (cfg.run_tightness && !(cfg.moment_p > 2.0))
    throw ConfigError("config: moment_p must exceed 2 for tightness");

  ConvergenceReport report;
  report.master_seed = cfg.master_seed;
  report.experiment_id = cfg.id.empty() ? "exp-" + config_hash(cfg) : cfg.id;

  const HermiteExpansion e = config_expansion(cfg);
  const CovarianceModel model = covariance_from_json(cfg.covariance);
  report.expansion_rank = e.rank;
  report.expansion_truncation = e.truncation();
  report.expansion_discarded_l2 = e.discarded_l2;
  report.regime = classify_regime(model, e.rank);

  // normalization resolution (config may override, regime wins unless strict)
  Normalization norm = report.regime.normalization;
  if (cfg.normalization == "sqrt_n" && norm == Normalization::sqrt_n_log_n) {
    const std::string msg =
        "regime is critical: overriding requested sqrt(n) normalization to "
        "sqrt(n log n)";
    if (cfg.strict) throw ConfigError("config (strict): " + msg);
    report.warnings.push_back(msg);
  } else if (cfg.normalization == "sqrt_n_log_n" &&
             norm == Normalization::sqrt_n) {
    const std::string msg =
        "regime is not critical: overriding requested sqrt(n log n) "
        "normalization to sqrt(n)";
    if (cfg.strict) throw ConfigError("config (strict): " + msg);
    report.warnings.push_back(msg);
  } else if (cfg.normalization != "auto" && cfg.normalization != "sqrt_n" &&
             cfg.normalization != "sqrt_n_log_n") {
    throw ConfigError("config: unknown normalization '" + cfg.normalization + "'");
  }
  if (norm == Normalization::sqrt_n_log_n)
    for (std::size_t n : cfg.n_ladder)
      if (n < 2)
        throw ConfigError("config: n >= 2 required for sqrt(n log n)");

  // theory-side variance target at t = 1
  report.var_target = kNan;
  const bool gaussian_limit = report.regime.regime != Regime::supercritical;
  if (report.regime.regime == Regime::summable ||
      report.regime.regime == Regime::subcritical) {
    report.sigma2 = sigma_squared(e, model, 0, cfg.lag_cutoff);
    report.var_target = report.sigma2->value;
  } else if (report.regime.regime == Regime::critical) {
    const double c_d = e.coeffs[static_cast<std::size_t>(e.rank)];
    report.var_target = critical_sigma_squared(e.rank) * c_d * c_d;
  }

  const bool studentized_ks =
      report.regime.regime == Regime::critical || !gaussian_limit;

  const auto pairs = dyadic_pairs(cfg.grid);
  const double t_end = cfg.grid.back();
  // midpoint for the disjoint-increment correlation
  double t_mid = cfg.grid[cfg.grid.size() / 2];

  std::string summary_csv = "n,estimate,se,target,ratio,verdict\n";
  std::string fdd_csv = "n,t1,t2,empirical,target,se,dev_se\n";
  std::string tightness_csv = "n,s,t,span,lp_norm,ratio,se\n";
  bool any_fdd = false, any_tight = false;
  std::vector<std::string> traj_files;

  const double var_tol =
      report.regime.regime == Regime::critical
          ? cfg.tolerances.at("critical_var_rel")
          : cfg.tolerances.at("var_rel");

  auto flush = [&](bool aborted) {
    OutputFiles files;
    files.summary_csv = summary_csv;
    if (any_fdd) files.fdd_csv = fdd_csv;
    if (any_tight) files.tightness_csv = tightness_csv;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    if (aborted) report.warnings.push_back("experiment aborted; partial results");
    emit_outputs(cfg, report, files, traj_files);
  };

  try {
    for (std::size_t li = 0; li < cfg.n_ladder.size(); ++li) {
      const std::size_t n = cfg.n_ladder[li];
      PathSampler sampler(model, n);

      std::vector<PartialSumPath> ys(cfg.replications);
      std::vector<double> z_dev(cfg.replications, 0.0);
      parallel_for_index(cfg.replications, cfg.threads, [&](std::size_t r) {
        const GaussianPath path = sampler.sample(split_stream(cfg.master_seed, r));
        ys[r] = build_Y(path, e, cfg.grid, norm);
        if (cfg.build_z) {
          const PartialSumPath z = build_Z(path, e, cfg.grid, norm);
          double dev = 0.0;
          for (std::size_t i = 0; i < z.values.size(); ++i)
            dev = std::max(dev, std::abs(z.values[i] - ys[r].values[i]));
          z_dev[r] = dev;
        }
      });

      LadderEntry le;
      le.n = n;
      le.var_target = report.var_target * t_end;  // Brownian variance at t_end
      if (cfg.build_z)
        le.z_max_dev = *std::max_element(z_dev.begin(), z_dev.end());

      std::vector<double> y_end(cfg.replications), y_mid(cfg.replications),
          y_tail(cfg.replications);
      for (std::size_t r = 0; r < cfg.replications; ++r) {
        y_end[r] = path_value(ys[r], t_end);
        y_mid[r] = path_value(ys[r], t_mid);
        y_tail[r] = y_end[r] - y_mid[r];
      }

      {  // variance of Y(t_end) with the SE of the variance estimator
        const double mean = pairwise_mean(y_end);
        std::vector<double> sq(cfg.replications), quart(cfg.replications);
        for (std::size_t r = 0; r < cfg.replications; ++r) {
          const double d = y_end[r] - mean;
          sq[r] = d * d;
          quart[r] = d * d * d * d;
        }
        const double m2 = pairwise_sum(sq) / (cfg.replications - 1.0);
        const double m4 = pairwise_mean(quart);
        le.var_estimate = m2;
        le.var_se = std::sqrt(
            std::max(0.0, m4 - m2 * m2) / static_cast<double>(cfg.replications));
      }

      le.ks_studentized = studentized_ks;
      le.ks_sigma = studentized_ks
                        ? std::sqrt(le.var_estimate)
                        : std::sqrt(report.var_target * t_end);
      le.ks = ks_normality(y_end, le.ks_sigma);

      le.incr_corr = correlation(y_mid, y_tail);
      le.incr_se = 1.0 / std::sqrt(static_cast<double>(cfg.replications));

      if (cfg.run_fdd && gaussian_limit && cfg.replications < 200 && li == 0)
        report.warnings.push_back(
            "fdd check skipped: needs at least 200 replications");
      if (cfg.run_tightness && cfg.replications < 500 && li == 0)
        report.warnings.push_back(
            "tightness diagnostic skipped: needs at least 500 replications");
      if (cfg.run_fdd && gaussian_limit && cfg.replications >= 200) {
        std::vector<double> times(cfg.grid.begin() + 1, cfg.grid.end());
        le.fdd = fdd_covariance_check(ys, times, report.var_target);
        for (const auto& en : le.fdd->entries) {
          fdd_csv += std::to_string(n) + "," + format_double(en.t1) + "," +
                     format_double(en.t2) + "," + format_double(en.empirical) +
                     "," + format_double(en.target) + "," +
                     format_double(en.se) + "," + format_double(en.dev_se) +
                     "\n";
        }
        any_fdd = true;
      }

      if (cfg.run_tightness && cfg.replications >= 500) {
        le.tightness = tightness_diagnostic(ys, cfg.moment_p, pairs);
        for (const auto& row : le.tightness->table) {
          tightness_csv += std::to_string(n) + "," + format_double(row.s) +
                           "," + format_double(row.t) + "," +
                           format_double(row.span) + "," +
                           format_double(row.lp_norm) + "," +
                           format_double(row.ratio) + "," +
                           format_double(row.se) + "\n";
        }
        any_tight = true;
      }

      if (cfg.run_hyper) {
        const std::uint64_t hyper_master =
            split_stream(split_stream(cfg.master_seed, 0xB10C), li);
        le.hyper = hypercontractivity_check(
            e.rank, std::max(cfg.moment_p, 4.0), model, n, 0.0, t_end,
            std::max<std::size_t>(cfg.replications, 500), hyper_master,
            cfg.threads);
      }

      // summary row
      const double ratio = std::isnan(le.var_target)
                               ? kNan
                               : le.var_estimate / le.var_target;
      const bool var_ok =
          std::isnan(le.var_target)
              ? true
              : std::abs(le.var_estimate - le.var_target) <=
                    var_tol * std::abs(le.var_target);
      summary_csv += std::to_string(n) + "," + format_double(le.var_estimate) +
                     "," + format_double(le.var_se) + "," +
                     format_double(le.var_target) + "," + format_double(ratio) +
                     "," + (var_ok ? "pass" : "fail") + "\n";

      if (cfg.export_trajectories && !cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        if (cfg.replications <= 64) {
          std::string csv = "t";
          for (std::size_t r = 0; r < cfg.replications; ++r)
            csv += ",rep" + std::to_string(r);
          csv += "\n";
          for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
            csv += format_double(cfg.grid[i]);
            for (std::size_t r = 0; r < cfg.replications; ++r)
              csv += "," + format_double(ys[r].values[i]);
            csv += "\n";
          }
          const std::string name = "trajectories_n" + std::to_string(n) + ".csv";
          write_text_file(fs::path(cfg.out_dir) / name, csv);
          traj_files.push_back(name);
        } else {
          for (std::size_t r = 0; r < cfg.replications; ++r) {
            std::string csv = "t,value\n";
            for (std::size_t i = 0; i < cfg.grid.size(); ++i)
              csv += format_double(cfg.grid[i]) + "," +
                     format_double(ys[r].values[i]) + "\n";
            const std::string name = "traj_n" + std::to_string(n) + "_rep" +
                                     std::to_string(r) + ".csv";
            write_text_file(fs::path(cfg.out_dir) / name, csv);
            traj_files.push_back(name);
          }
        }
      }

      report.ladder.push_back(std::move(le));
    }
  } catch (...) {
    flush(/*aborted=*/true);
    throw;
  }

  // verdicts; gating depends on the regime
  VerdictBuilder vb{cfg.tolerances, {}};
  const LadderEntry& last = report.ladder.back();
  const std::string var_tol_name = report.regime.regime == Regime::critical
                                       ? "critical_var_rel"
                                       : "var_rel";

  if (gaussian_limit) {
    const double rel_err = std::abs(last.var_estimate - last.var_target) /
                           std::abs(last.var_target);
    vb.add("variance_vs_target", var_tol_name, rel_err, rel_err <= var_tol);
    vb.add("ks_normality", "ks_alpha", last.ks.p_value,
           last.ks.p_value >= cfg.tolerances.at("ks_alpha"));
    vb.add("increment_corr", "incr_se_mult",
           std::abs(last.incr_corr) / last.incr_se,
           std::abs(last.incr_corr) <=
               cfg.tolerances.at("incr_se_mult") * last.incr_se);
    if (last.fdd) {
      const bool gate = report.regime.regime != Regime::critical;
      vb.add("fdd_covariance", "fdd_se_mult", last.fdd->max_se_multiple,
             last.fdd->max_se_multiple <= cfg.tolerances.at("fdd_se_mult"),
             gate);
    }
    if (report.regime.regime == Regime::critical && report.ladder.size() >= 2) {
      double worst_increase = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < report.ladder.size(); ++i) {
        const double gap_i =
            std::abs(report.ladder[i].var_estimate - report.ladder[i].var_target);
        const double gap_j = std::abs(report.ladder[i + 1].var_estimate -
                                      report.ladder[i + 1].var_target);
        worst_increase = std::max(worst_increase, gap_j - gap_i);
      }
      vb.add("variance_monotone_approach", "monotone_slack", worst_increase,
             worst_increase <= cfg.tolerances.at("monotone_slack"));
    }
  } else {
    // supercritical: the verification target is the detection itself
    vb.add("non_gaussian_detected", "ks_alpha", last.ks.p_value,
           last.ks.p_value < cfg.tolerances.at("ks_alpha"));
  }

  if (cfg.run_hyper) {
    bool all_ok = true;
    double worst = 0.0;
    for (const auto& le : report.ladder)
      if (le.hyper) {
        all_ok = all_ok && le.hyper->ok;
        if (le.hyper->rhs > 0.0)
          worst = std::max(worst, le.hyper->lhs / le.hyper->rhs);
      }
    vb.add("hypercontractivity", "hyper_slack_se", worst, all_ok);
  }

  if (cfg.run_tightness && report.ladder.size() >= 2 &&
      report.ladder.front().tightness) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& le : report.ladder) {
      if (!le.tightness) continue;
      lo = std::min(lo, le.tightness->max_ratio);
      hi = std::max(hi, le.tightness->max_ratio);
    }
    const double drift = lo > 0.0 ? (hi - lo) / lo : 0.0;
    vb.add("tightness_drift", "tightness_drift", drift,
           drift <= cfg.tolerances.at("tightness_drift"), gaussian_limit);
  }

  report.verdicts = std::move(vb.rows);
  report.all_pass = true;
  for (const auto& v : report.verdicts)
    if (v.gating && !v.pass) report.all_pass = false;

  flush(/*aborted=*/false);
  return report;
}

void write_path_dump(const GaussianPath& path, const std::string& dir,
                     const std::string& basename) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / basename;

  std::ofstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin) throw Error("cannot open " + base.string() + ".bin");
  // raw IEEE doubles; little-endian on every supported target
  bin.write(reinterpret_cast<const char*>(path.samples.data()),
            static_cast<std::streamsize>(path.samples.size() * sizeof(double)));

  json side;
  side["n"] = path.samples.size();
  side["seed"] = std::to_string(path.seed);
  side["method"] = path.method;
  side["covariance"] = covariance_to_json(path.model);
  side["rng"] = kRngTag;
  write_text_file(base.string() + ".json", side.dump(2) + "\n");
}

GaussianPath read_path_dump(const std::string& dir,
                            const std::string& basename) {
  namespace fs = std::filesystem;
  const fs::path base = fs::path(dir) / basename;

  std::ifstream meta(base.string() + ".json");
  if (!meta) throw Error("cannot open " + base.string() + ".json");
  json side = json::parse(meta);

  GaussianPath path;
  path.model = covariance_from_json(side.at("covariance"));
  path.seed = std::stoull(side.at("seed").get<std::string>());
  path.method = side.at("method").get<std::string>();
  const auto n = side.at("n").get<std::size_t>();

  std::ifstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin) throw Error("cannot open " + base.string() + ".bin");
  path.samples.resize(n);
  bin.read(reinterpret_cast<char*>(path.samples.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<std::size_t>(bin.gcount()) != n * sizeof(double))
    throw Error("path dump " + base.string() + ".bin is truncated");
  return path;
}

}  // namespace bmlab
