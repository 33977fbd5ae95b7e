#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include <omp.h>

#include "instance.hpp"
#include "ncvx/experiment.hpp"

namespace ncvx {

namespace {

using detail::Estimate;

struct Task {
  std::uint64_t seed;
  std::optional<double> snr_db;
  std::optional<double> sparsity;
  bool keep_estimates;
};

struct TaskOutput {
  std::vector<TrialRecord> records;
  // (penalty index, lambda) -> estimate, for image output.
  std::map<std::pair<std::size_t, double>, Estimate> estimates;
};

std::optional<double> q_column(const Penalty& p) {
  switch (p.family()) {
    case PenaltyFamily::Soft: return 1.0;
    case PenaltyFamily::Hard: return 0.0;
    case PenaltyFamily::Lq:
    case PenaltyFamily::QShrink: return p.q();
    default: return std::nullopt;
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

auto condition_key(const TrialRecord& r) { return std::tie(r.penalty_index, r.snr_db, r.sparsity); }

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const RunOptions& opts)
      : cfg_(cfg), opts_(opts), info_(detail::metric_info(cfg)) {
    path_ = cfg.warmstart_grid.empty() ? cfg.lambda_grid : cfg.warmstart_grid;
    std::sort(path_.begin(), path_.end(), std::greater<>());
    for (const Penalty& p : cfg.penalties) {
      has_soft_ = has_soft_ || p.is_convex();
      has_nonconvex_ = has_nonconvex_ || !p.is_convex();
    }
  }

  bool better(double a, double b) const { return info_.higher_is_better ? a > b : a < b; }

  TaskOutput run(const Task& task) const {
    TaskOutput out;
    const auto inst = detail::make_instance(cfg_, task.seed, task.snr_db.value_or(INFINITY),
                                            task.sparsity.value_or(1.0));
    const bool warm = cfg_.init_policy == InitPolicy::SoftWarmstart && inst->uses_init();

    auto record = [&](std::size_t index, double lambda, const detail::CellResult& r, double seconds) {
      const Penalty& p = cfg_.penalties[index];
      TrialRecord rec;
      rec.penalty_index = index;
      rec.penalty = shape_label(p);
      rec.lambda = lambda;
      rec.q = q_column(p);
      rec.snr_db = task.snr_db;
      rec.sparsity = task.sparsity;
      rec.seed = task.seed;
      rec.metric_value = r.metric;
      rec.iterations = r.iterations;
      rec.seconds = opts_.timing ? seconds : 0.0;
      out.records.push_back(rec);
      if (task.keep_estimates) out.estimates[{index, lambda}] = r.est;
    };

    auto timed = [&](const Penalty& p, const Penalty& p2, double f, const Estimate* init, double& seconds) {
      const auto t0 = std::chrono::steady_clock::now();
      detail::CellResult r = inst->solve(p, p2, f, init);
      seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    };

    std::optional<Estimate> best_soft;
    if (has_soft_ || (warm && has_nonconvex_)) {
      const Penalty soft = Penalty::soft(1.0);
      std::optional<Estimate> prev;
      double best_metric = 0.0;
      for (double f : path_) {
        double seconds = 0.0;
        detail::CellResult r = timed(soft, soft, f, inst->uses_init() && prev ? &*prev : nullptr, seconds);
        for (std::size_t i = 0; i < cfg_.penalties.size(); ++i) {
          if (cfg_.penalties[i].is_convex()) record(i, f, r, seconds);
        }
        if (!best_soft || better(r.metric, best_metric)) {
          best_metric = r.metric;
          best_soft = r.est;
        }
        prev = std::move(r.est);
      }
    }

    for (std::size_t i = 0; i < cfg_.penalties.size(); ++i) {
      const Penalty& p = cfg_.penalties[i];
      if (p.is_convex()) continue;
      const Penalty p2 = cfg_.penalty2.value_or(p);
      for (double f : cfg_.lambda_grid) {
        double seconds = 0.0;
        const detail::CellResult r = timed(p, p2, f, warm && best_soft ? &*best_soft : nullptr, seconds);
        record(i, f, r, seconds);
      }
    }
    return out;
  }

  std::vector<PenaltySummary> summarize(const std::vector<TrialRecord>& records) const {
    std::vector<PenaltySummary> out;
    std::size_t begin = 0;
    while (begin < records.size()) {
      std::size_t end = begin;
      while (end < records.size() && condition_key(records[end]) == condition_key(records[begin])) ++end;
      PenaltySummary s;
      s.penalty_index = records[begin].penalty_index;
      s.penalty = records[begin].penalty;
      s.q = records[begin].q;
      s.snr_db = records[begin].snr_db;
      s.sparsity = records[begin].sparsity;
      bool have = false;
      for (std::size_t a = begin; a < end;) {
        std::size_t b = a;
        std::vector<double> values;
        while (b < end && records[b].lambda == records[a].lambda) values.push_back(records[b++].metric_value);
        const double med = median(values);
        if (!have || better(med, s.median)) {
          have = true;
          s.best_lambda = records[a].lambda;
          s.median = med;
          s.mean = 0.0;
          for (double v : values) s.mean += v / static_cast<double>(values.size());
          s.trials = static_cast<int>(values.size());
        }
        a = b;
      }
      out.push_back(s);
      begin = end;
    }
    return out;
  }

  void write_images(const ExperimentResult& result, const Task& task, const TaskOutput& output,
                    const std::string& experiment) const {
    const auto inst = detail::make_instance(cfg_, task.seed, task.snr_db.value_or(INFINITY),
                                            task.sparsity.value_or(1.0));
    if (!inst->has_image()) return;
    std::filesystem::create_directories(opts_.image_dir);
    for (const PenaltySummary& s : result.summary) {
      if (s.snr_db != task.snr_db || s.sparsity != task.sparsity) continue;
      const auto it = output.estimates.find({s.penalty_index, s.best_lambda});
      if (it == output.estimates.end()) continue;
      std::string label = s.penalty;
      std::replace_if(label.begin(), label.end(), [](char c) { return c == ':' || c == '=' || c == ','; }, '_');
      const std::string stem = opts_.image_dir + "/" + experiment + "_" + std::to_string(s.penalty_index) + "_" + label;
      std::ofstream file(stem + ".tmp");
      const std::string ext = inst->write_image(it->second, file);
      file.close();
      std::filesystem::rename(stem + ".tmp", stem + "." + ext);
    }
  }

  const ExperimentConfig& cfg_;
  const RunOptions& opts_;
  detail::MetricInfo info_;
  std::vector<double> path_;
  bool has_soft_ = false;
  bool has_nonconvex_ = false;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  Runner runner(cfg, opts);

  std::vector<std::optional<double>> snrs{std::nullopt}, sparsities{std::nullopt};
  if (detail::uses_snr(cfg.problem)) snrs.assign(cfg.snr_db.begin(), cfg.snr_db.end());
  if (detail::uses_sparsity(cfg.problem)) sparsities.assign(cfg.sparsity.begin(), cfg.sparsity.end());

  std::vector<Task> tasks;
  const auto seeds = cfg.seeds();
  for (const auto& snr : snrs) {
    for (const auto& sp : sparsities) {
      for (std::uint64_t seed : seeds) {
        const bool first = tasks.empty();
        tasks.push_back({seed, snr, sp, first && !opts.image_dir.empty()});
      }
    }
  }

  std::vector<TaskOutput> outputs(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
  const auto count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long t = 0; t < count; ++t) {
    try {
      outputs[static_cast<std::size_t>(t)] = runner.run(tasks[static_cast<std::size_t>(t)]);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.experiment = cfg.name.empty() ? std::string(problem_name(cfg.problem)) : cfg.name;
  result.metric_name = runner.info_.name;
  result.higher_is_better = runner.info_.higher_is_better;
  for (TaskOutput& o : outputs) {
    result.records.insert(result.records.end(), o.records.begin(), o.records.end());
  }
  std::sort(result.records.begin(), result.records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.penalty_index, a.snr_db, a.sparsity, a.lambda, a.seed) <
           std::tie(b.penalty_index, b.snr_db, b.sparsity, b.lambda, b.seed);
  });
  result.summary = runner.summarize(result.records);
  if (!opts.image_dir.empty()) runner.write_images(result, tasks.front(), outputs.front(), result.experiment);
  return result;
}

}  // namespace ncvx
