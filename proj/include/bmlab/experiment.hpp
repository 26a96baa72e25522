#ifndef BMLAB_EXPERIMENT_HPP
#define BMLAB_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/partial_sum.hpp"
#include "bmlab/simulate.hpp"
#include "bmlab/stats.hpp"

namespace bmlab {

/// One Monte Carlo experiment: a function, a covariance model, a ladder of
/// sample sizes and the statistics to run. Parsed from a single JSON
/// document; every field has a default so a config can be minimal.
struct ExperimentConfig {
  ExperimentConfig();  // fills the default grid and named tolerances

  std::string id;                       // defaults to a config-hash tag
  std::string function = "hermite:2";   // registry spec
  std::vector<double> coeff_levels;     // alternative: explicit c_0..c_Q
  nlohmann::json covariance = {{"family", "white"}};
  std::vector<std::size_t> n_ladder = {256, 1024, 4096, 16384};
  std::size_t replications = 2000;
  double moment_p = 3.0;
  std::vector<double> grid;             // default dyadic k/16
  std::map<std::string, double> tolerances;  // named, defaults filled in
  std::uint64_t master_seed = 20200916;
  std::string out_dir;                  // empty: no files written
  std::string normalization = "auto";   // "auto" | "sqrt_n" | "sqrt_n_log_n"
  int truncation = 40;
  int quad_order = 128;
  std::int64_t lag_cutoff = 10000;
  bool run_fdd = true;
  bool run_tightness = true;
  bool run_hyper = false;
  bool build_z = false;
  bool export_trajectories = false;
  bool strict = false;
  int threads = 1;  // runtime knob; never changes results

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // with all defaults resolved
};

struct VerdictRow {
  std::string name;
  std::string tolerance_name;
  double tolerance = 0.0;
  double observed = 0.0;
  bool pass = false;
  bool gating = true;  // informational rows don't drive the exit code
};

struct LadderEntry {
  std::size_t n = 0;
  double var_estimate = 0.0;
  double var_se = 0.0;
  double var_target = 0.0;  // NaN when no Brownian target exists
  KsResult ks;
  double ks_sigma = 0.0;
  bool ks_studentized = false;
  double incr_corr = 0.0;
  double incr_se = 0.0;
  std::optional<FddCheck> fdd;
  std::optional<TightnessResult> tightness;
  std::optional<HyperResult> hyper;
  double z_max_dev = 0.0;  // max |Z - Y| over the grid (when build_z)
};

struct ConvergenceReport {
  std::string experiment_id;
  RegimeVerdict regime;
  int expansion_rank = 0;
  int expansion_truncation = 0;
  double expansion_discarded_l2 = 0.0;  // truncation bias indicator
  std::optional<SigmaSquared> sigma2;   // absent in the critical/super case
  double var_target = 0.0;              // common target, NaN if none
  std::vector<LadderEntry> ladder;
  std::vector<VerdictRow> verdicts;
  bool all_pass = false;
  double wall_seconds = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Runs the whole pipeline: expansion, regime classification, theory-side
/// variance, simulation ladder, statistics, verdicts; writes report.json,
/// summary.csv, fdd.csv, tightness.csv and manifest.json into out_dir when
/// set. Partial results are flushed before an abort propagates.
ConvergenceReport run_experiment(const ExperimentConfig& cfg);

/// Expansion described by the config ("function" registry spec, or explicit
/// coefficient levels when provided).
HermiteExpansion config_expansion(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical config serialization, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

/// Path dump: raw little-endian doubles next to a JSON sidecar.
void write_path_dump(const GaussianPath& path, const std::string& dir,
                     const std::string& basename);
GaussianPath read_path_dump(const std::string& dir,
                            const std::string& basename);

/// Shortest decimal round-trip formatting used for all CSV output.
std::string format_double(double v);

}  // namespace bmlab

#endif  // BMLAB_EXPERIMENT_HPP
