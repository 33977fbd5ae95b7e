// Command-line harness for the benchmark sweeps.
//
//   ncvx cs --config configs/cs_phantom.cfg --out results/cs.csv
//   ncvx regress --seed 7 --snr-db 10,30,50 --out regress.csv
//   ncvx prox-curves --threshold 1 --out curves.csv
//   ncvx selftest
//
// Exit codes: 0 success, 1 I/O or self-test failure, 2 config error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ncvx/errors.hpp"
#include "ncvx/experiment.hpp"
#include "ncvx/selftest.hpp"

namespace {

using namespace ncvx;

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

struct ExperimentCommand {
  Problem problem;
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out;
  std::string image_dir;
  bool timing = false;
  int threads = 0;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

void add_experiment(CLI::App& root, ExperimentCommand& cmd, const char* help) {
  cmd.app = root.add_subcommand(std::string(problem_name(cmd.problem)), help);
  cmd.app->add_option("--config", cmd.config_path, "Config file (key = value with [sections])");
  cmd.app->add_option("--out", cmd.out, "Results CSV; <out>.summary.csv and <out>.manifest are written next to it")
      ->required();
  cmd.app->add_flag("--timing", cmd.timing, "Record wall time per solve (output is then not reproducible)");
  cmd.app->add_option("--threads", cmd.threads, "Worker threads for independent trials (0 = OpenMP default)");
  cmd.app->add_option("--image-dir", cmd.image_dir, "Write reconstructions at the best lambda here");
  cmd.app->add_option("--set", cmd.sets, "Override any config key: --set key=value");
  for (const std::string& key : config_keys(cmd.problem)) {
    std::string names = flag_name(key);
    if (key == "penalties") names += ",--penalty";
    cmd.app->add_option(names, cmd.flags[key], "Config key '" + key + "'");
  }
}

std::string joined_command(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) out += (i ? " " : "") + std::string(argv[i]);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

int run_command(const ExperimentCommand& cmd, const std::string& command_line) {
  std::vector<ConfigEntry> entries;
  if (!cmd.config_path.empty()) {
    std::ifstream in(cmd.config_path);
    if (!in) throw ConfigError(0, "config", "cannot open '" + cmd.config_path + "'");
    entries = parse_config_text(in);
  }
  // Named flags first, then --set in command-line order; later entries win.
  for (const std::string& key : config_keys(cmd.problem)) {
    if (cmd.app->count(flag_name(key)) > 0) entries.push_back({"", key, cmd.flags.at(key), 0});
  }
  for (const std::string& s : cmd.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(0, s, "--set expects key=value");
    entries.push_back({"", s.substr(0, eq), s.substr(eq + 1), 0});
  }
  const ExperimentConfig cfg = make_config(cmd.problem, entries);

  RunOptions opts;
  opts.timing = cmd.timing;
  opts.threads = cmd.threads;
  opts.image_dir = cmd.image_dir;
  const ExperimentResult result = run_experiment(cfg, opts);

  std::ostringstream results, summary, manifest;
  write_results_csv(results, result);
  write_summary_csv(summary, result);
  write_manifest(manifest, cfg, command_line);
  write_file(cmd.out, results.str());
  write_file(cmd.out + ".summary.csv", summary.str());
  write_file(cmd.out + ".manifest", manifest.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal-operator benchmark toolkit"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  std::vector<ExperimentCommand> commands;
  commands.reserve(7);
  const std::pair<Problem, const char*> kinds[] = {
      {Problem::Cs, "Compressed sensing of an image in a Haar basis"},
      {Problem::Regress, "Sparse regression with a Gaussian design over an SNR sweep"},
      {Problem::Separate, "Two-component sparse separation"},
      {Problem::Inpaint, "Color image restoration under salt-and-pepper corruption"},
      {Problem::Cov, "Sparse correlation matrix estimation"},
      {Problem::Complete, "Matrix completion"},
      {Problem::Rpca, "Low-rank plus sparse decomposition"},
  };
  for (const auto& [p, help] : kinds) {
    commands.push_back({p});
    add_experiment(app, commands.back(), help);
  }

  auto* curves = app.add_subcommand("prox-curves", "Shrinkage curves of several penalties at a shared threshold");
  std::vector<std::string> curve_penalties{"soft", "hard", "lq:q=0.5", "qshrink:q=0.5", "scad", "mcp", "firm"};
  double threshold = 1.0, t_max = 4.0;
  int points = 401;
  std::string curves_out = "-";
  curves->add_option("--penalty", curve_penalties, "Penalty tokens")->delimiter(';');
  curves->add_option("--threshold", threshold, "Common zero threshold");
  curves->add_option("--t-max", t_max, "Sample t in [-t_max, t_max]");
  curves->add_option("--points", points, "Samples per penalty");
  curves->add_option("--out", curves_out, "Output CSV ('-' for stdout)");

  auto* selftest = app.add_subcommand("selftest", "Compare prox operators against brute-force oracles");
  std::uint64_t selftest_seed = 1;
  int draws = 200;
  std::string selftest_out = "-";
  selftest->add_option("--seed", selftest_seed, "Seed for the random draws");
  selftest->add_option("--draws", draws, "Scalar draws per family")->check(CLI::PositiveNumber);
  selftest->add_option("--out", selftest_out, "Output CSV ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; malformed command lines are config errors.
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    if (curves->parsed()) {
      std::vector<Penalty> ps;
      for (const std::string& t : curve_penalties) ps.push_back(parse_penalty(t));
      std::ostringstream out;
      emit_shrinkage_curves(ps, threshold, t_max, points, out);
      if (curves_out == "-") {
        std::cout << out.str();
      } else {
        write_file(curves_out, out.str());
      }
      return 0;
    }
    if (selftest->parsed()) {
      const auto rows = run_oracle_suite(selftest_seed, draws);
      std::ostringstream out;
      write_selftest_csv(out, rows);
      if (selftest_out == "-") {
        std::cout << out.str();
      } else {
        write_file(selftest_out, out.str());
      }
      return std::all_of(rows.begin(), rows.end(), [](const SelftestRow& r) { return r.pass; }) ? 0 : 1;
    }
    const std::string command_line = joined_command(argc, argv);
    for (const ExperimentCommand& cmd : commands) {
      if (cmd.app->parsed()) return run_command(cmd, command_line);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionMismatch& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
