#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <istream>
#include <sstream>

#include "ncvx/experiment.hpp"
#include "ncvx/format.hpp"

namespace ncvx {

namespace {

using P = Problem;

constexpr std::initializer_list<P> kAll = {P::Cs,  P::Regress,  P::Separate, P::Inpaint,
                                           P::Cov, P::Complete, P::Rpca};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find_first_of(seps, start);
    const std::string_view item = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (std::string_view item : split(text, ",")) out.push_back(parse_double(item, what));
  if (out.empty()) throw InvalidArgument("empty list for '" + std::string(what) + "'");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string_view init_name(InitPolicy p) { return p == InitPolicy::Zero ? "zero" : "soft_warmstart"; }

struct Key {
  const char* name;
  const char* section;
  std::vector<P> problems;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;

  bool applies(P p) const { return std::find(problems.begin(), problems.end(), p) != problems.end(); }
};

template <typename T>
Key int_key(const char* name, const char* section, std::vector<P> problems, T ExperimentConfig::*field) {
  return {name, section, std::move(problems),
          [name, field](ExperimentConfig& c, std::string_view v) { c.*field = static_cast<T>(parse_int(v, name)); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

Key real_key(const char* name, const char* section, std::vector<P> problems, double ExperimentConfig::*field) {
  return {name, section, std::move(problems),
          [name, field](ExperimentConfig& c, std::string_view v) { c.*field = parse_double(v, name); },
          [field](const ExperimentConfig& c) { return format_double(c.*field); }};
}

Key text_key(const char* name, const char* section, std::vector<P> problems, std::string ExperimentConfig::*field) {
  return {name, section, std::move(problems),
          [field](ExperimentConfig& c, std::string_view v) { c.*field = std::string(v); },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    const std::vector<P> all(kAll);
    k.push_back({"problem", "experiment", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   if (parse_problem(v) != c.problem) {
                     throw InvalidArgument("config is for '" + std::string(v) + "' but the command is '" +
                                           std::string(problem_name(c.problem)) + "'");
                   }
                 },
                 [](const ExperimentConfig& c) { return std::string(problem_name(c.problem)); }});
    k.push_back(text_key("name", "experiment", all, &ExperimentConfig::name));
    k.push_back({"seed", "experiment", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   const long long s = parse_int(v, "seed");
                   if (s < 0) throw InvalidArgument("seed must be >= 0");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    k.push_back(int_key("trials", "experiment", all, &ExperimentConfig::trials));
    k.push_back({"penalties", "experiment", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   c.penalties.clear();
                   for (std::string_view tok : split(v, "; \t")) c.penalties.push_back(parse_penalty(tok));
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.penalties.size(); ++i) {
                     out += (i ? "; " : "") + shape_label(c.penalties[i]);
                   }
                   return out;
                 }});
    k.push_back({"penalty2", "experiment", {P::Separate, P::Inpaint, P::Rpca},
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "same") {
                     c.penalty2.reset();
                   } else {
                     c.penalty2 = parse_penalty(v);
                   }
                 },
                 [](const ExperimentConfig& c) {
                   return c.penalty2 ? shape_label(*c.penalty2) : std::string("same");
                 }});
    k.push_back({"lambda_grid", "experiment", all,
                 [](ExperimentConfig& c, std::string_view v) { c.lambda_grid = parse_grid(v); },
                 [](const ExperimentConfig& c) { return join(c.lambda_grid); }});
    k.push_back({"warmstart_grid", "experiment", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "same") {
                     c.warmstart_grid.clear();
                   } else {
                     c.warmstart_grid = parse_grid(v);
                   }
                 },
                 [](const ExperimentConfig& c) {
                   return c.warmstart_grid.empty() ? std::string("same") : join(c.warmstart_grid);
                 }});
    k.push_back({"snr_db", "experiment", {P::Cs, P::Regress, P::Separate, P::Inpaint, P::Complete, P::Rpca},
                 [](ExperimentConfig& c, std::string_view v) { c.snr_db = parse_list(v, "snr_db"); },
                 [](const ExperimentConfig& c) { return join(c.snr_db); }});
    k.push_back({"sparsity", "experiment", {P::Regress, P::Separate},
                 [](ExperimentConfig& c, std::string_view v) { c.sparsity = parse_list(v, "sparsity"); },
                 [](const ExperimentConfig& c) { return join(c.sparsity); }});
    k.push_back({"init_policy", "experiment", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "zero") {
                     c.init_policy = InitPolicy::Zero;
                   } else if (v == "soft_warmstart") {
                     c.init_policy = InitPolicy::SoftWarmstart;
                   } else {
                     throw InvalidArgument("init_policy must be zero or soft_warmstart");
                   }
                 },
                 [](const ExperimentConfig& c) { return std::string(init_name(c.init_policy)); }});

    k.push_back(text_key("algorithm", "solver", {P::Cs, P::Regress}, &ExperimentConfig::algorithm));
    k.push_back({"max_iter", "solver", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   c.solver.max_iter = static_cast<int>(parse_int(v, "max_iter"));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.solver.max_iter); }});
    k.push_back({"tol", "solver", all,
                 [](ExperimentConfig& c, std::string_view v) { c.solver.tol = parse_double(v, "tol"); },
                 [](const ExperimentConfig& c) { return format_double(c.solver.tol); }});
    k.push_back({"step_margin", "solver", all,
                 [](ExperimentConfig& c, std::string_view v) {
                   c.solver.step_margin = parse_double(v, "step_margin");
                 },
                 [](const ExperimentConfig& c) { return format_double(c.solver.step_margin); }});
    k.push_back({"rho", "solver", {P::Cs, P::Regress, P::Cov},
                 [](ExperimentConfig& c, std::string_view v) { c.solver.rho = parse_double(v, "rho"); },
                 [](const ExperimentConfig& c) { return format_double(c.solver.rho); }});

    using E = ExperimentConfig;
    k.push_back(text_key("model", "data", {P::Cs, P::Separate, P::Inpaint, P::Cov, P::Complete}, &E::model));
    k.push_back(text_key("image", "data", {P::Cs, P::Inpaint}, &E::image));
    k.push_back(int_key("side", "data", {P::Cs, P::Inpaint}, &E::side));
    k.push_back(real_key("measurement_ratio", "data", {P::Cs}, &E::measurement_ratio));
    k.push_back(int_key("low_freq", "data", {P::Cs}, &E::low_freq));
    k.push_back(real_key("decay", "data", {P::Cs, P::Complete}, &E::decay));
    k.push_back(int_key("n", "data", {P::Regress, P::Separate}, &E::n));
    k.push_back(int_key("m", "data", {P::Regress, P::Separate}, &E::m));
    k.push_back(real_key("sas_alpha", "data", {P::Separate}, &E::sas_alpha));
    k.push_back(real_key("sas_gamma", "data", {P::Separate}, &E::sas_gamma));
    k.push_back(real_key("mu", "data", {P::Separate, P::Inpaint, P::Rpca}, &E::mu));
    k.push_back(real_key("beta", "data", {P::Separate, P::Inpaint}, &E::beta));
    k.push_back(real_key("lambda2", "data", {P::Separate, P::Inpaint}, &E::lambda2));
    k.push_back(real_key("corruption", "data", {P::Inpaint, P::Rpca}, &E::corruption));
    k.push_back(real_key("corruption_scale", "data", {P::Rpca}, &E::corruption_scale));
    k.push_back(real_key("rank_threshold", "data", {P::Rpca}, &E::rank_threshold));
    k.push_back(int_key("rows", "data", {P::Complete, P::Rpca}, &E::rows));
    k.push_back(int_key("cols", "data", {P::Complete, P::Rpca}, &E::cols));
    k.push_back(int_key("rank", "data", {P::Complete, P::Rpca}, &E::rank));
    k.push_back(real_key("observed", "data", {P::Complete}, &E::observed));
    k.push_back(int_key("d", "data", {P::Cov}, &E::d));
    k.push_back(int_key("samples", "data", {P::Cov}, &E::samples));
    k.push_back(text_key("estimator", "data", {P::Cov}, &E::estimator));
    k.push_back(real_key("epsilon", "data", {P::Cov}, &E::epsilon));
    k.push_back(int_key("block_size", "data", {P::Cov}, &E::block_size));
    k.push_back(real_key("block_rho", "data", {P::Cov}, &E::block_rho));
    k.push_back(int_key("bandwidth", "data", {P::Cov}, &E::bandwidth));
    return k;
  }();
  return table;
}

const Key* find_key(std::string_view name) {
  for (const Key& k : keys()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

std::vector<Penalty> parse_penalties(std::initializer_list<const char*> tokens) {
  std::vector<Penalty> out;
  for (const char* t : tokens) out.push_back(parse_penalty(t));
  return out;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

bool power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : InvalidArgument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                      (key.empty() ? std::string() : "'" + key + "': ") + message),
      line_(line),
      key_(std::move(key)) {}

std::string_view problem_name(Problem p) {
  switch (p) {
    case P::Cs: return "cs";
    case P::Regress: return "regress";
    case P::Separate: return "separate";
    case P::Inpaint: return "inpaint";
    case P::Cov: return "cov";
    case P::Complete: return "complete";
    case P::Rpca: return "rpca";
  }
  return "?";
}

Problem parse_problem(std::string_view name) {
  for (P p : kAll) {
    if (problem_name(p) == name) return p;
  }
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.rfind("log:", 0) == 0) {
    const auto parts = split(text.substr(4), ":");
    if (parts.size() != 3) throw InvalidArgument("log grid must be log:lo:hi:count");
    const double lo = parse_double(parts[0], "grid lo");
    const double hi = parse_double(parts[1], "grid hi");
    const long long count = parse_int(parts[2], "grid count");
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi) || count < 1) {
      throw InvalidArgument("log grid needs 0 < lo <= hi and count >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (long long i = 0; i < count; ++i) {
      out[static_cast<std::size_t>(i)] =
          count == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
  }
  return parse_list(text, "grid");
}

ExperimentConfig ExperimentConfig::defaults(Problem p) {
  ExperimentConfig c;
  c.problem = p;
  c.lambda_grid = parse_grid("log:1e-4:10:30");
  c.snr_db = {INFINITY};
  c.sparsity = {0.02};
  c.solver.max_iter = 1000;
  c.solver.tol = 1e-6;
  switch (p) {
    case P::Cs:
      c.penalties = parse_penalties({"soft", "hard", "lq:q=0.5"});
      c.snr_db = {50.0};
      c.model = "phantom";
      break;
    case P::Regress:
      c.penalties = parse_penalties({"soft", "hard", "scad", "mcp", "lq:q=0.5"});
      c.snr_db = {10.0, 20.0, 30.0, 40.0, 50.0};
      break;
    case P::Separate:
      c.penalties = parse_penalties({"soft", "lq:q=0.5"});
      c.model = "impulsive";
      c.sparsity = {0.08};
      c.lambda2 = 3.0;
      break;
    case P::Inpaint:
      c.penalties = parse_penalties({"soft", "lq:q=0.5"});
      c.model = "saltpepper";
      c.side = 32;
      c.corruption = 0.1;
      c.lambda2 = 10.0;
      break;
    case P::Cov:
      c.penalties = parse_penalties({"soft", "hard", "scad", "lq:q=0.5"});
      c.model = "block";
      c.lambda_grid = {0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
      c.solver.rho = 3.0;
      c.solver.tol = 1e-4;
      break;
    case P::Complete:
      c.penalties = parse_penalties({"soft", "hard", "lq:q=0.2"});
      c.model = "lowrank";
      c.snr_db = {40.0};
      c.decay = 0.14;
      break;
    case P::Rpca:
      c.penalties = parse_penalties({"soft", "hard"});
      break;
  }
  return c;
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < trials; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const char* key, const std::string& msg) { throw ConfigError(0, key, msg); };
  auto positive_grid = [&](const char* key, const std::vector<double>& g, bool allow_empty) {
    if (g.empty() && !allow_empty) fail(key, "grid must be nonempty");
    for (double v : g) {
      if (!(v > 0.0) || !std::isfinite(v)) fail(key, "grid values must be positive and finite");
    }
  };
  if (trials < 1) fail("trials", "must be >= 1");
  if (penalties.empty()) fail("penalties", "need at least one penalty");
  positive_grid("lambda_grid", lambda_grid, false);
  positive_grid("warmstart_grid", warmstart_grid, true);
  if (snr_db.empty()) fail("snr_db", "need at least one value");
  for (double s : snr_db) {
    if (std::isnan(s) || s == -INFINITY) fail("snr_db", "must be a number or inf");
  }
  if (sparsity.empty()) fail("sparsity", "need at least one value");
  for (double s : sparsity) {
    if (!(s > 0.0 && s <= 1.0)) fail("sparsity", "must be in (0, 1]");
  }
  try {
    solver.validate();
  } catch (const InvalidArgument& e) {
    fail("solver", e.what());
  }
  if (algorithm != "pgd" && algorithm != "admm") fail("algorithm", "must be pgd or admm");

  auto need = [&](bool ok, const char* key, const char* msg) {
    if (!ok) fail(key, msg);
  };
  switch (problem) {
    case P::Cs: {
      need(one_of(model, {"phantom", "compressible"}), "model", "cs models: phantom, compressible");
      need(power_of_two(side) && side >= 16, "side", "must be a power of two >= 16");
      need(measurement_ratio > 0.0 && measurement_ratio <= 1.0, "measurement_ratio", "must be in (0, 1]");
      const long long m_rows = std::llround(measurement_ratio * static_cast<double>(side * side));
      need(low_freq >= 0 && low_freq <= side && low_freq * low_freq <= m_rows, "low_freq",
           "low_freq^2 must not exceed the number of measurements");
      need(decay > 0.0 && std::isfinite(decay), "decay", "must be positive");
      break;
    }
    case P::Regress:
      need(n >= 1 && m >= 1, "n", "dimensions must be positive");
      break;
    case P::Separate:
      need(one_of(model, {"impulsive", "dct_gaussian"}), "model", "separate models: impulsive, dct_gaussian");
      need(n >= 1 && m >= 1, "n", "dimensions must be positive");
      need(model != "dct_gaussian" || n == m, "m", "dct_gaussian needs m == n");
      need(sas_alpha > 0.0 && sas_alpha <= 2.0, "sas_alpha", "must be in (0, 2]");
      need(sas_gamma > 0.0, "sas_gamma", "must be positive");
      need(mu > 0.0 && beta > 0.0, "mu", "mu and beta must be positive");
      need(lambda2 > 0.0 && std::isfinite(lambda2), "lambda2", "must be positive");
      break;
    case P::Inpaint:
      need(model == "saltpepper", "model", "inpaint model: saltpepper");
      need(side >= 2, "side", "must be >= 2");
      need(corruption >= 0.0 && corruption <= 1.0, "corruption", "must be in [0, 1]");
      need(mu > 0.0 && beta > 0.0, "mu", "mu and beta must be positive");
      need(lambda2 > 0.0 && std::isfinite(lambda2), "lambda2", "must be positive");
      break;
    case P::Cov:
      need(one_of(model, {"block", "banded"}), "model", "cov models: block, banded");
      need(one_of(estimator, {"pd", "threshold"}), "estimator", "must be pd or threshold");
      need(d >= 2, "d", "must be >= 2");
      need(samples >= 2, "samples", "must be >= 2");
      need(epsilon > 0.0 && epsilon <= 1.0, "epsilon", "must be in (0, 1]");
      need(block_size >= 1, "block_size", "must be >= 1");
      need(bandwidth >= 0, "bandwidth", "must be >= 0");
      need(block_rho > -1.0 && block_rho < 1.0, "block_rho", "must be in (-1, 1)");
      break;
    case P::Complete:
      need(one_of(model, {"lowrank", "decay"}), "model", "complete models: lowrank, decay");
      need(rows >= 1 && cols >= 1, "rows", "dimensions must be positive");
      need(rank >= 1 && rank <= std::min(rows, cols), "rank", "must be in [1, min(rows, cols)]");
      need(observed > 0.0 && observed <= 1.0, "observed", "must be in (0, 1]");
      need(decay > 0.0 && std::isfinite(decay), "decay", "must be positive");
      break;
    case P::Rpca:
      need(rows >= 1 && cols >= 1, "rows", "dimensions must be positive");
      need(rank >= 1 && rank <= std::min(rows, cols), "rank", "must be in [1, min(rows, cols)]");
      need(corruption >= 0.0 && corruption <= 1.0, "corruption", "must be in [0, 1]");
      need(corruption_scale > 0.0 && std::isfinite(corruption_scale), "corruption_scale", "must be positive");
      need(rank_threshold > 0.0 && std::isfinite(rank_threshold), "rank_threshold", "must be positive");
      need(mu > 0.0, "mu", "must be positive");
      break;
  }
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value, int line) {
  const Key* k = find_key(key);
  if (k == nullptr) throw ConfigError(line, std::string(key), "unknown key");
  if (!k->applies(cfg.problem)) {
    throw ConfigError(line, std::string(key),
                      "does not apply to problem '" + std::string(problem_name(cfg.problem)) + "'");
  }
  try {
    k->set(cfg, trim(value));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(line, std::string(key), e.what());
  }
}

std::vector<ConfigEntry> parse_config_text(std::istream& in) {
  std::vector<ConfigEntry> out;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "", "malformed section header");
      section = std::string(trim(s.substr(1, s.size() - 2)));
      if (section != "experiment" && section != "solver" && section != "data") {
        throw ConfigError(line, "", "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line, "", "expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    if (key.empty()) throw ConfigError(line, "", "empty key");
    const Key* k = find_key(key);
    if (k == nullptr) throw ConfigError(line, key, "unknown key");
    if (!section.empty() && section != k->section) {
      throw ConfigError(line, key, "belongs in [" + std::string(k->section) + "]");
    }
    out.push_back({section, key, std::string(trim(s.substr(eq + 1))), line});
  }
  return out;
}

ExperimentConfig make_config(Problem problem, const std::vector<ConfigEntry>& entries) {
  ExperimentConfig cfg = ExperimentConfig::defaults(problem);
  for (const ConfigEntry& e : entries) set_config_value(cfg, e.key, e.value, e.line);
  cfg.validate();
  return cfg;
}

std::vector<std::string> config_keys(Problem problem) {
  std::vector<std::string> out;
  for (const Key& k : keys()) {
    if (k.applies(problem)) out.emplace_back(k.name);
  }
  return out;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (const char* section : {"experiment", "solver", "data"}) {
    out << '[' << section << "]\n";
    for (const Key& k : keys()) {
      if (std::string_view(k.section) != section || !k.applies(cfg.problem)) continue;
      const std::string v = k.get(cfg);
      if (v.empty()) continue;
      out << k.name << " = " << v << '\n';
    }
  }
  return out.str();
}

}  // namespace ncvx
