#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncvx/errors.hpp"
#include "ncvx/penalty.hpp"
#include "ncvx/solvers.hpp"

namespace ncvx {

enum class Problem { Cs, Regress, Separate, Inpaint, Cov, Complete, Rpca };
enum class InitPolicy { Zero, SoftWarmstart };

std::string_view problem_name(Problem p);
/// Throws InvalidArgument on an unknown name.
Problem parse_problem(std::string_view name);

/// Bad config entry. line() is 0 for values that did not come from a file.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Declarative description of a benchmark sweep. Every (penalty, lambda,
/// seed, snr, sparsity) cell is one solve. Lambda values are normalized:
/// a grid value f sets the penalty's zero threshold to f times a
/// problem-specific data scale (see README). Fields that do not apply to the
/// chosen problem are ignored.
struct ExperimentConfig {
  Problem problem = Problem::Cs;
  std::string name;
  std::uint64_t seed = 1;
  int trials = 5;
  /// Swept penalties; their lambda is replaced by the grid.
  std::vector<Penalty> penalties;
  /// Second-block penalty for separate/inpaint/rpca; empty means the same
  /// family and shape as the swept one.
  std::optional<Penalty> penalty2;
  std::vector<double> lambda_grid;
  /// Grid of the Soft path that produces warm starts; empty means lambda_grid.
  std::vector<double> warmstart_grid;
  std::vector<double> snr_db;
  std::vector<double> sparsity;
  InitPolicy init_policy = InitPolicy::SoftWarmstart;
  /// "pgd" or "admm" (cs and regress).
  std::string algorithm = "pgd";
  SolverOptions solver;

  std::string model;
  std::string image;
  std::string estimator = "pd";
  long long side = 64;
  long long n = 256;
  long long m = 100;
  long long rows = 100;
  long long cols = 100;
  long long rank = 5;
  long long d = 100;
  long long samples = 50;
  long long low_freq = 8;
  long long block_size = 20;
  long long bandwidth = 3;
  double measurement_ratio = 0.4;
  double decay = 0.02;
  double observed = 0.5;
  double corruption = 0.05;
  double corruption_scale = 3.0;
  double rank_threshold = 0.1;
  double epsilon = 1e-3;
  double block_rho = 0.5;
  double mu = 1.0;
  double beta = 2.0;
  /// Ratio of the second-block threshold scale to the first (separate, inpaint).
  double lambda2 = 1.0;
  double sas_alpha = 1.0;
  double sas_gamma = 1e-3;

  /// Defaults documented per problem in the README.
  static ExperimentConfig defaults(Problem p);

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// seed, seed + 1, ..., seed + trials - 1.
  std::vector<std::uint64_t> seeds() const;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

/// Syntax pass over "key = value" lines with optional [section] headers;
/// '#' starts a comment. Throws ConfigError on malformed lines.
std::vector<ConfigEntry> parse_config_text(std::istream& in);

/// defaults(problem) with the entries applied in order, then validated. An
/// entry "problem" must agree with `problem`.
ExperimentConfig make_config(Problem problem, const std::vector<ConfigEntry>& entries);

/// Applies one key. Throws ConfigError on an unknown key, a key that does not
/// apply to cfg.problem, or a bad value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                      int line = 0);

/// Canonical text of every key that applies to cfg.problem; parses back to
/// an equal configuration.
std::string config_to_text(const ExperimentConfig& cfg);

/// Keys that apply to `problem`, in canonical order.
std::vector<std::string> config_keys(Problem problem);

/// "log:lo:hi:count" (log-spaced, inclusive) or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

struct TrialRecord {
  std::size_t penalty_index = 0;
  std::string penalty;
  double lambda = 0.0;
  std::optional<double> q;
  /// Empty for problems without a noise level (cov).
  std::optional<double> snr_db;
  std::optional<double> sparsity;
  std::uint64_t seed = 0;
  double metric_value = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

/// Best lambda for one penalty under one (snr, sparsity) condition, chosen by
/// the median metric over seeds.
struct PenaltySummary {
  std::size_t penalty_index = 0;
  std::string penalty;
  std::optional<double> q;
  std::optional<double> snr_db;
  std::optional<double> sparsity;
  double best_lambda = 0.0;
  double median = 0.0;
  double mean = 0.0;
  int trials = 0;
};

struct ExperimentResult {
  std::string experiment;
  std::string metric_name;
  bool higher_is_better = true;
  /// Sorted by (penalty, snr, sparsity, lambda, seed).
  std::vector<TrialRecord> records;
  std::vector<PenaltySummary> summary;
};

struct RunOptions {
  /// Record wall time per solve; otherwise the seconds column is 0 so the
  /// CSV is reproducible.
  bool timing = false;
  /// Worker threads for independent trials; 0 uses the OpenMP default.
  int threads = 0;
  /// If set, reconstructions of the first seed at each penalty's best lambda
  /// are written here as PGM/PPM (cs and inpaint only).
  std::string image_dir;
};

/// Runs the sweep. The Soft penalty is solved along warmstart_grid from large
/// to small values, each solve warm-started from the previous one; this path
/// supplies the Soft records. Every other penalty is swept over lambda_grid,
/// each solve starting independently from the best Soft solution of the same
/// trial under InitPolicy::SoftWarmstart, otherwise from zero. Throws
/// ConfigError for an invalid config and NumericalError if a solve diverges.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Columns: experiment, penalty, lambda, q, snr_db, sparsity, seed,
/// metric_name, metric_value, iterations, seconds.
void write_results_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ExperimentResult& result);
/// Comment header (toolkit version, command) followed by config_to_text;
/// the manifest is itself a valid config file.
void write_manifest(std::ostream& out, const ExperimentConfig& cfg, std::string_view command);

std::string_view toolkit_version();

/// Samples prox(t) for t in [-t_max, t_max] at `points` equispaced values for
/// each penalty rescaled to the common zero threshold. CSV columns:
/// penalty, t, prox.
void emit_shrinkage_curves(const std::vector<Penalty>& penalties, double threshold, double t_max,
                           int points, std::ostream& out);

}  // namespace ncvx
