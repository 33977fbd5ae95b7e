#include <ostream>

#include "ncvx/experiment.hpp"
#include "ncvx/format.hpp"

namespace ncvx {

namespace {

// RFC 4180 quoting for fields that need it.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string_view toolkit_version() { return "1.0.0"; }

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << "experiment,penalty,lambda,q,snr_db,sparsity,seed,metric_name,metric_value,iterations,seconds\n";
  const std::string exp = csv_field(result.experiment);
  const std::string metric = csv_field(result.metric_name);
  for (const TrialRecord& r : result.records) {
    out << exp << ',' << csv_field(r.penalty) << ',' << format_double(r.lambda) << ',' << opt(r.q) << ','
        << opt(r.snr_db) << ',' << opt(r.sparsity) << ',' << r.seed << ',' << metric << ','
        << format_double(r.metric_value) << ',' << r.iterations << ',' << format_double(r.seconds) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "experiment,penalty,q,snr_db,sparsity,metric_name,best_lambda,median,mean,trials\n";
  const std::string exp = csv_field(result.experiment);
  const std::string metric = csv_field(result.metric_name);
  for (const PenaltySummary& s : result.summary) {
    out << exp << ',' << csv_field(s.penalty) << ',' << opt(s.q) << ',' << opt(s.snr_db) << ','
        << opt(s.sparsity) << ',' << metric << ',' << format_double(s.best_lambda) << ','
        << format_double(s.median) << ',' << format_double(s.mean) << ',' << s.trials << '\n';
  }
}

void write_manifest(std::ostream& out, const ExperimentConfig& cfg, std::string_view command) {
  out << "# ncvx " << toolkit_version() << '\n';
  out << "# command: " << command << '\n';
  out << "# rerun with: --config <this file>\n";
  out << config_to_text(cfg);
}

void emit_shrinkage_curves(const std::vector<Penalty>& penalties, double threshold, double t_max, int points,
                           std::ostream& out) {
  if (!(threshold > 0.0) || !(t_max > 0.0) || points < 2) {
    throw InvalidArgument("shrinkage curves need threshold > 0, t_max > 0 and points >= 2");
  }
  out << "penalty,t,prox\n";
  for (const Penalty& p : penalties) {
    const Penalty scaled = with_zero_threshold(p, threshold);
    const ScalarProx prox(scaled);
    const std::string label = csv_field(shape_label(p));
    for (int k = 0; k < points; ++k) {
      const double t = -t_max + 2.0 * t_max * static_cast<double>(k) / static_cast<double>(points - 1);
      out << label << ',' << format_double(t) << ',' << format_double(prox(t)) << '\n';
    }
  }
}

}  // namespace ncvx
