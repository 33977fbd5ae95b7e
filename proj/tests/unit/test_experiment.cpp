#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "ncvx/experiment.hpp"

using namespace ncvx;

namespace {

ExperimentConfig small_regress() {
  ExperimentConfig cfg = ExperimentConfig::defaults(Problem::Regress);
  set_config_value(cfg, "penalties", "soft; hard; lq:q=0.5");
  set_config_value(cfg, "n", "60");
  set_config_value(cfg, "m", "30");
  set_config_value(cfg, "snr_db", "20,40");
  set_config_value(cfg, "sparsity", "0.05");
  set_config_value(cfg, "trials", "3");
  set_config_value(cfg, "lambda_grid", "log:1e-3:1e-1:4");
  return cfg;
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = parse_grid("log:1e-3:10:5");
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g[2] == doctest::Approx(0.1));
  CHECK(g.back() == doctest::Approx(10.0));
  CHECK(parse_grid("0.5, 0.25,1") == std::vector<double>{0.5, 0.25, 1.0});
  CHECK(parse_grid("log:2:2:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid(""), InvalidArgument);
  CHECK_THROWS_AS(parse_grid("log:0:1:3"), InvalidArgument);
  CHECK_THROWS_AS(parse_grid("log:1:2"), InvalidArgument);
  CHECK_THROWS_AS(parse_grid("0.1,abc"), InvalidArgument);
  // Sign checks happen at validation.
  ExperimentConfig cfg = ExperimentConfig::defaults(Problem::Cs);
  CHECK_THROWS_AS((set_config_value(cfg, "lambda_grid", "0.1,-1"), cfg.validate()), ConfigError);
}

TEST_CASE("problem names") {
  for (Problem p : {Problem::Cs, Problem::Regress, Problem::Separate, Problem::Inpaint, Problem::Cov,
                    Problem::Complete, Problem::Rpca}) {
    CHECK(parse_problem(problem_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_problem("lasso"), InvalidArgument);
}

TEST_CASE("config text round trip") {
  for (Problem p : {Problem::Cs, Problem::Regress, Problem::Separate, Problem::Inpaint, Problem::Cov,
                    Problem::Complete, Problem::Rpca}) {
    const ExperimentConfig cfg = ExperimentConfig::defaults(p);
    CHECK_NOTHROW(cfg.validate());
    const std::string text = config_to_text(cfg);
    std::istringstream in(text);
    const ExperimentConfig back = make_config(p, parse_config_text(in));
    CHECK(config_to_text(back) == text);
  }
}

TEST_CASE("config files") {
  std::istringstream in(
      "# a comment\n"
      "[experiment]\n"
      "problem = regress\n"
      "trials = 7   # trailing comment\n"
      "penalties = soft; scad:a=3.7\n"
      "\n"
      "[solver]\n"
      "tol = 1e-7\n"
      "[data]\n"
      "n = 80\n");
  const ExperimentConfig cfg = make_config(Problem::Regress, parse_config_text(in));
  CHECK(cfg.trials == 7);
  CHECK(cfg.penalties.size() == 2);
  CHECK(cfg.solver.tol == 1e-7);
  CHECK(cfg.n == 80);
  CHECK(cfg.seeds() == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("config errors name the key and line") {
  auto error_of = [](const std::string& text, Problem p) -> std::pair<int, std::string> {
    std::istringstream in(text);
    try {
      make_config(p, parse_config_text(in));
    } catch (const ConfigError& e) {
      return {e.line(), e.key()};
    }
    return {-1, ""};
  };
  CHECK(error_of("trials = 3\nbogus = 1\n", Problem::Cs) == std::make_pair(2, std::string("bogus")));
  CHECK(error_of("\n\ntrials = x\n", Problem::Cs) == std::make_pair(3, std::string("trials")));
  // Range checks run after all entries are applied and carry no line.
  CHECK(error_of("\n\ntrials = -1\n", Problem::Cs) == std::make_pair(0, std::string("trials")));
  CHECK(error_of("[solver]\ntrials = 2\n", Problem::Cs).second == "trials");
  CHECK(error_of("problem = cov\n", Problem::Cs).second == "problem");
  CHECK(error_of("rows = 10\n", Problem::Cs).second == "rows");
  CHECK(error_of("penalties = soft; nope\n", Problem::Cs).second == "penalties");
  CHECK(error_of("[weird]\n", Problem::Cs).first == 1);
  CHECK(error_of("no equals sign\n", Problem::Cs).first == 1);
  // Validation after all entries: side must be a power of two for cs.
  CHECK(error_of("side = 48\n", Problem::Cs).second == "side");
  CHECK(error_of("trials = 2\n", Problem::Cs).first == -1);
}

TEST_CASE("every listed key is written") {
  for (Problem p : {Problem::Cs, Problem::Regress, Problem::Cov, Problem::Rpca}) {
    ExperimentConfig cfg = ExperimentConfig::defaults(p);
    cfg.name = "named";
    if (p == Problem::Cs) cfg.image = "img.pgm";
    const std::string text = config_to_text(cfg);
    for (const std::string& key : config_keys(p)) {
      INFO(key);
      CHECK(text.find("\n" + key + " = ") != std::string::npos);
    }
  }
}

TEST_CASE("experiment records are complete, sorted and reproducible") {
  const ExperimentConfig cfg = small_regress();
  RunOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const ExperimentResult a = run_experiment(cfg, one);
  const ExperimentResult b = run_experiment(cfg, many);

  // penalties x snr x lambda x seeds
  REQUIRE(a.records.size() == 3u * 2u * 4u * 3u);
  for (std::size_t i = 1; i < a.records.size(); ++i) {
    const TrialRecord& x = a.records[i - 1];
    const TrialRecord& y = a.records[i];
    CHECK(std::tie(x.penalty_index, x.snr_db, x.sparsity, x.lambda, x.seed) <
          std::tie(y.penalty_index, y.snr_db, y.sparsity, y.lambda, y.seed));
  }
  std::ostringstream ca, cb, sa, sb;
  write_results_csv(ca, a);
  write_results_csv(cb, b);
  write_summary_csv(sa, a);
  write_summary_csv(sb, b);
  CHECK(ca.str() == cb.str());
  CHECK(sa.str() == sb.str());

  REQUIRE(a.summary.size() == 3u * 2u);
  for (const PenaltySummary& s : a.summary) CHECK(s.trials == 3);
  CHECK(a.summary[0].q == 1.0);
  CHECK(a.summary[2].q == 0.0);
  CHECK(a.summary[4].q == 0.5);
  CHECK(a.metric_name == "rel_err_db");
  CHECK_FALSE(a.higher_is_better);
}

TEST_CASE("summary picks the lambda with the best median") {
  const ExperimentConfig cfg = small_regress();
  const ExperimentResult r = run_experiment(cfg);
  for (const PenaltySummary& s : r.summary) {
    std::map<double, std::vector<double>> by_lambda;
    for (const TrialRecord& rec : r.records) {
      if (rec.penalty_index == s.penalty_index && rec.snr_db == s.snr_db) {
        by_lambda[rec.lambda].push_back(rec.metric_value);
      }
    }
    for (auto& [lambda, values] : by_lambda) {
      std::sort(values.begin(), values.end());
      CHECK(values[1] >= s.median);
    }
  }
}

TEST_CASE("results csv layout") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Problem::Cov);
  set_config_value(cfg, "d", "20");
  set_config_value(cfg, "samples", "15");
  set_config_value(cfg, "block_size", "5");
  set_config_value(cfg, "trials", "1");
  set_config_value(cfg, "penalties", "soft; scad:a=3.7");
  set_config_value(cfg, "lambda_grid", "0.1,0.3");
  const ExperimentResult r = run_experiment(cfg);
  std::ostringstream out;
  write_results_csv(out, r);
  std::istringstream lines(out.str());
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "experiment,penalty,lambda,q,snr_db,sparsity,seed,metric_name,metric_value,iterations,seconds");
  CHECK(first.rfind("cov,soft,0.1,1,,,1,spectral_rel_err,", 0) == 0);
  std::getline(lines, second);
  std::getline(lines, second);
  // A label containing a comma would be quoted; scad's has none.
  CHECK(second.rfind("cov,scad:a=3.7,0.1,,,,1,", 0) == 0);

  std::ostringstream manifest;
  write_manifest(manifest, cfg, "ncvx cov --d 20");
  CHECK(manifest.str().rfind("# ncvx ", 0) == 0);
  std::istringstream back(manifest.str());
  CHECK(config_to_text(make_config(Problem::Cov, parse_config_text(back))) == config_to_text(cfg));
}

TEST_CASE("shrinkage curves share the zero threshold") {
  std::ostringstream out;
  emit_shrinkage_curves({Penalty::soft(1.0), Penalty::hard(1.0), Penalty::lq(1.0, 0.5)}, 1.5, 3.0, 61, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "penalty,t,prox");
  int rows = 0;
  std::set<std::string> labels;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    labels.insert(line.substr(0, c1));
    const double t = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double x = std::stod(line.substr(c2 + 1));
    if (std::abs(t) < 1.5 - 1e-12) CHECK(x == 0.0);
    if (std::abs(t) > 1.5 + 1e-12) CHECK(x != 0.0);
  }
  CHECK(rows == 3 * 61);
  CHECK(labels == std::set<std::string>{"soft", "hard", "lq:q=0.5"});
  std::ostringstream sink;
  CHECK_THROWS_AS(emit_shrinkage_curves({Penalty::soft(1.0)}, 0.0, 3.0, 10, sink), InvalidArgument);
}
