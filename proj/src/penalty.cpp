#include "ncvx/penalty.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "ncvx/errors.hpp"
#include "ncvx/format.hpp"

namespace ncvx {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 100;

// One quadratic piece c2 x^2 + c1 x + c0 of a penalty on [lo, hi], x >= 0.
struct Piece {
  double lo, hi, c2, c1, c0;
};

double lq_beta(double lambda, double q) {
  return std::pow(2.0 * lambda * (1.0 - q), 1.0 / (2.0 - q));
}

double lq_tau(double lambda, double q) {
  const double beta = lq_beta(lambda, q);
  return beta + lambda * q * std::pow(beta, q - 1.0);
}

// Larger root of h(y) = lambda q y^(q-1) + y - a on [beta, a] for a > tau;
// h is convex and increasing there, so Newton from the right stays inside
// the bracket except for rounding, which the bisection fallback absorbs.
double lq_newton(double lambda, double q, double a, double beta) {
  double lo = beta;
  double hi = a;
  double y = a;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const double pw = lambda * q * std::pow(y, q - 1.0);
    const double h = pw + y - a;
    if (h == 0.0) break;
    if (h > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double dh = 1.0 + (q - 1.0) * pw / y;
    double next = y - h / dh;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - y);
    y = next;
    if (step <= kNewtonTol * std::max(1.0, y)) break;
  }
  return y;
}

double lq_magnitude(double lambda, double q, double a) {
  const double beta = lq_beta(lambda, q);
  if (a <= beta + lambda * q * std::pow(beta, q - 1.0)) return 0.0;
  return lq_newton(lambda, q, a, beta);
}

double piece_objective(const Piece& pc, double s, double a, double x) {
  return s * ((pc.c2 * x + pc.c1) * x + pc.c0) + 0.5 * (x - a) * (x - a);
}

// Exact minimizer over x >= 0 of s * P(x) + (x - a)^2 / 2 for a piecewise
// quadratic P; ties go to the smaller x.
template <std::size_t N>
double piecewise_magnitude(const std::array<Piece, N>& pieces, double s, double a) {
  double best_x = 0.0;
  double best_f = piece_objective(pieces[0], s, a, 0.0);
  auto consider = [&](const Piece& pc, double x) {
    const double f = piece_objective(pc, s, a, x);
    if (f < best_f || (f == best_f && x < best_x)) {
      best_f = f;
      best_x = x;
    }
  };
  for (const Piece& pc : pieces) {
    consider(pc, pc.lo);
    if (std::isfinite(pc.hi)) consider(pc, pc.hi);
    const double quad = s * pc.c2 + 0.5;
    if (quad > 0.0) {
      const double lin = s * pc.c1 - a;
      double x = -lin / (2.0 * quad);
      x = std::clamp(x, pc.lo, pc.hi);
      consider(pc, x);
    }
  }
  return best_x;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<Piece, 3> scad_pieces(double lambda, double a) {
  const double den = 2.0 * (a - 1.0);
  return {{{0.0, lambda, 0.0, lambda, 0.0},
           {lambda, a * lambda, -1.0 / den, 2.0 * a * lambda / den, -lambda * lambda / den},
           {a * lambda, kInf, 0.0, 0.0, (a + 1.0) * lambda * lambda / 2.0}}};
}

std::array<Piece, 2> mcp_pieces(double lambda, double gamma) {
  return {{{0.0, gamma * lambda, -1.0 / (2.0 * gamma), lambda, 0.0},
           {gamma * lambda, kInf, 0.0, 0.0, gamma * lambda * lambda / 2.0}}};
}

std::array<Piece, 2> firm_pieces(double lambda, double mu) {
  return {{{0.0, mu, -lambda / (2.0 * mu), lambda, 0.0},
           {mu, kInf, 0.0, 0.0, lambda * mu / 2.0}}};
}

// Closed form for t >= 0; std::nullopt when the scaled subproblem leaves
// the regime where the tabulated rule is the global minimizer.
std::optional<double> closed_form_magnitude(const Penalty& p, double a, double s) {
  const double lam = p.lambda();
  switch (p.family()) {
    case PenaltyFamily::Soft:
      return std::max(a - s * lam, 0.0);
    case PenaltyFamily::Hard:
      return a > std::sqrt(2.0 * s * lam) ? a : 0.0;
    case PenaltyFamily::Lq:
      return lq_magnitude(s * lam, p.q(), a);
    case PenaltyFamily::QShrink: {
      const double sl = s * lam;
      if (a <= sl) return 0.0;
      return std::max(a - std::pow(sl, 2.0 - p.q()) * std::pow(a, p.q() - 1.0), 0.0);
    }
    case PenaltyFamily::Scad: {
      const double am = p.a();
      if (s >= am - 1.0) return std::nullopt;
      if (a <= (1.0 + s) * lam) return std::max(a - s * lam, 0.0);
      if (a <= am * lam) return ((am - 1.0) * a - s * am * lam) / (am - 1.0 - s);
      return a;
    }
    case PenaltyFamily::Mcp: {
      const double g = p.gamma();
      if (s >= g) return std::nullopt;
      if (a <= s * lam) return 0.0;
      if (a <= g * lam) return (a - s * lam) / (1.0 - s / g);
      return a;
    }
    case PenaltyFamily::Firm: {
      const double mu = p.mu();
      if (s * lam >= mu) return std::nullopt;
      if (a <= s * lam) return 0.0;
      if (a <= mu) return (a - s * lam) * mu / (mu - s * lam);
      return a;
    }
  }
  return std::nullopt;
}

double prox_magnitude(const Penalty& p, double a, double s) {
  if (auto closed = closed_form_magnitude(p, a, s)) return *closed;
  switch (p.family()) {
    case PenaltyFamily::Scad:
      return piecewise_magnitude(scad_pieces(p.lambda(), p.a()), s, a);
    case PenaltyFamily::Mcp:
      return piecewise_magnitude(mcp_pieces(p.lambda(), p.gamma()), s, a);
    case PenaltyFamily::Firm:
      return piecewise_magnitude(firm_pieces(p.lambda(), p.mu()), s, a);
    default:
      throw NumericalError("prox: no closed form for penalty " + to_token(p));
  }
}

void check_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("prox scale must be positive and finite");
  }
}

}  // namespace

Penalty Penalty::soft(double lambda) {
  Penalty p(PenaltyFamily::Soft, lambda);
  p.validate();
  return p;
}

Penalty Penalty::hard(double lambda) {
  Penalty p(PenaltyFamily::Hard, lambda);
  p.validate();
  return p;
}

Penalty Penalty::lq(double lambda, double q) {
  Penalty p(PenaltyFamily::Lq, lambda);
  p.q_ = q;
  p.validate();
  return p;
}

Penalty Penalty::qshrink(double lambda, double q) {
  Penalty p(PenaltyFamily::QShrink, lambda);
  p.q_ = q;
  p.validate();
  return p;
}

Penalty Penalty::scad(double lambda, double a) {
  Penalty p(PenaltyFamily::Scad, lambda);
  p.a_ = a;
  p.validate();
  return p;
}

Penalty Penalty::mcp(double lambda, double gamma) {
  Penalty p(PenaltyFamily::Mcp, lambda);
  p.gamma_ = gamma;
  p.validate();
  return p;
}

Penalty Penalty::firm(double lambda) {
  Penalty p(PenaltyFamily::Firm, lambda);
  p.mu_ = 2.0 * lambda;
  p.default_mu_ = true;
  p.validate();
  return p;
}

Penalty Penalty::firm(double lambda, double mu) {
  Penalty p(PenaltyFamily::Firm, lambda);
  p.mu_ = mu;
  p.validate();
  return p;
}

Penalty Penalty::with_lambda(double lambda) const {
  Penalty p = *this;
  p.lambda_ = lambda;
  if (family_ == PenaltyFamily::Firm && default_mu_) p.mu_ = 2.0 * lambda;
  p.validate();
  return p;
}

void Penalty::validate() const {
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw InvalidArgument("penalty lambda must be finite and >= 0");
  }
  switch (family_) {
    case PenaltyFamily::Lq:
    case PenaltyFamily::QShrink:
      if (!(q_ > 0.0 && q_ < 1.0)) throw InvalidArgument("penalty q must lie in (0, 1)");
      break;
    case PenaltyFamily::Scad:
      if (!(a_ > 2.0) || !std::isfinite(a_)) throw InvalidArgument("SCAD requires a > 2");
      break;
    case PenaltyFamily::Mcp:
      if (!(gamma_ > 1.0) || !std::isfinite(gamma_)) throw InvalidArgument("MCP requires gamma > 1");
      break;
    case PenaltyFamily::Firm:
      // Default mu = 2 lambda degenerates at lambda = 0 (the identity map).
      if (!(mu_ > lambda_) && !(default_mu_ && lambda_ == 0.0)) {
        throw InvalidArgument("firm thresholding requires mu > lambda");
      }
      break;
    default:
      break;
  }
}

std::string_view family_name(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::Soft: return "soft";
    case PenaltyFamily::Hard: return "hard";
    case PenaltyFamily::Lq: return "lq";
    case PenaltyFamily::QShrink: return "qshrink";
    case PenaltyFamily::Scad: return "scad";
    case PenaltyFamily::Mcp: return "mcp";
    case PenaltyFamily::Firm: return "firm";
  }
  return "unknown";
}

double penalty_value(const Penalty& p, double x) {
  const double ax = std::abs(x);
  const double lam = p.lambda();
  switch (p.family()) {
    case PenaltyFamily::Soft:
      return lam * ax;
    case PenaltyFamily::Hard:
      return ax != 0.0 ? lam : 0.0;
    case PenaltyFamily::Lq:
      return lam * std::pow(ax, p.q());
    case PenaltyFamily::QShrink:
      throw PenaltyUnavailable("q-shrinkage has no closed-form penalty");
    case PenaltyFamily::Scad: {
      const double a = p.a();
      if (ax < lam) return lam * ax;
      if (ax < a * lam) return (2.0 * a * lam * ax - ax * ax - lam * lam) / (2.0 * (a - 1.0));
      return (a + 1.0) * lam * lam / 2.0;
    }
    case PenaltyFamily::Mcp: {
      const double g = p.gamma();
      if (ax <= g * lam) return lam * ax - ax * ax / (2.0 * g);
      return g * lam * lam / 2.0;
    }
    case PenaltyFamily::Firm: {
      const double mu = p.mu();
      if (ax <= mu) return lam * (ax - ax * ax / (2.0 * mu));
      return lam * mu / 2.0;
    }
  }
  return 0.0;
}

double penalty_value(const Penalty& p, std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += penalty_value(p, v);
  return sum;
}

ScalarProx::ScalarProx(const Penalty& p, double scale) : p_(p), scale_(scale) {
  check_scale(scale);
  const double sl = scale * p.lambda();
  switch (p.family()) {
    case PenaltyFamily::Soft:
    case PenaltyFamily::QShrink:
      dead_zone_ = sl;
      break;
    case PenaltyFamily::Hard:
      dead_zone_ = std::sqrt(2.0 * sl);
      break;
    case PenaltyFamily::Lq:
      lq_beta_ = lq_beta(sl, p.q());
      dead_zone_ = lq_beta_ + sl * p.q() * std::pow(lq_beta_, p.q() - 1.0);
      break;
    case PenaltyFamily::Scad:
      dead_zone_ = scale < p.a() - 1.0 ? sl : 0.0;
      break;
    case PenaltyFamily::Mcp:
      dead_zone_ = scale < p.gamma() ? sl : 0.0;
      break;
    case PenaltyFamily::Firm:
      dead_zone_ = sl < p.mu() ? sl : 0.0;
      break;
  }
}

double ScalarProx::operator()(double t) const {
  if (t == 0.0) return 0.0;
  if (p_.lambda() == 0.0) return t;
  const double a = std::abs(t);
  if (a <= dead_zone_) return 0.0;
  const double mag = p_.family() == PenaltyFamily::Lq
                         ? lq_newton(scale_ * p_.lambda(), p_.q(), a, lq_beta_)
                         : prox_magnitude(p_, a, scale_);
  return t < 0.0 ? -mag : mag;
}

double prox_scalar(const Penalty& p, double t, double scale) { return ScalarProx(p, scale)(t); }

double zero_threshold(const Penalty& p, double scale) {
  check_scale(scale);
  const double lam = p.lambda();
  if (lam == 0.0) return 0.0;
  switch (p.family()) {
    case PenaltyFamily::Soft:
    case PenaltyFamily::QShrink:
      return scale * lam;
    case PenaltyFamily::Hard:
      return std::sqrt(2.0 * scale * lam);
    case PenaltyFamily::Lq:
      return lq_tau(scale * lam, p.q());
    case PenaltyFamily::Scad:
      if (scale < p.a() - 1.0) return scale * lam;
      break;
    case PenaltyFamily::Mcp:
      if (scale < p.gamma()) return scale * lam;
      break;
    case PenaltyFamily::Firm:
      if (scale * lam < p.mu()) return scale * lam;
      break;
  }
  // Nonconvex subproblem: the rule is monotone, so bisect on the dead zone.
  double lo = 0.0;
  double hi = 2.0 * std::max({lam * std::max({p.a(), p.gamma(), 1.0}), p.mu(), scale * lam}) + 1.0;
  while (prox_magnitude(p, hi, scale) == 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (prox_magnitude(p, mid, scale) == 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::vector<double> prox_elementwise(const Penalty& p, std::span<const double> t, double scale) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = prox_scalar(p, t[i], scale);
  return out;
}

Penalty with_zero_threshold(const Penalty& p, double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw InvalidArgument("threshold must be finite and >= 0");
  }
  switch (p.family()) {
    case PenaltyFamily::Hard:
      return p.with_lambda(threshold * threshold / 2.0);
    case PenaltyFamily::Lq: {
      // tau = kappa * lambda^(1/(2-q)) for fixed q.
      const double q = p.q();
      const double kappa = lq_tau(1.0, q);
      return p.with_lambda(std::pow(threshold / kappa, 2.0 - q));
    }
    default:
      return p.with_lambda(threshold);
  }
}

Penalty parse_penalty(std::string_view token) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  token = trim(token);
  const auto colon = token.find(':');
  const std::string_view name = trim(token.substr(0, colon));
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : token.substr(colon + 1);

  double lambda = 1.0;
  std::optional<double> q, a, gamma, mu;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("penalty token '" + std::string(token) + "': expected key=value, got '" +
                            std::string(item) + "'");
    }
    const std::string_view key = trim(item.substr(0, eq));
    const double value = parse_double(trim(item.substr(eq + 1)), key);
    if (key == "lambda") {
      lambda = value;
    } else if (key == "q") {
      q = value;
    } else if (key == "a") {
      a = value;
    } else if (key == "gamma") {
      gamma = value;
    } else if (key == "mu") {
      mu = value;
    } else {
      throw InvalidArgument("penalty token '" + std::string(token) + "': unknown key '" +
                            std::string(key) + "'");
    }
  }

  auto reject = [&](bool present, std::string_view key) {
    if (present) {
      throw InvalidArgument("penalty '" + std::string(name) + "' does not take '" +
                            std::string(key) + "'");
    }
  };
  if (name == "soft" || name == "hard") {
    reject(q.has_value(), "q");
    reject(a.has_value(), "a");
    reject(gamma.has_value(), "gamma");
    reject(mu.has_value(), "mu");
    return name == "soft" ? Penalty::soft(lambda) : Penalty::hard(lambda);
  }
  if (name == "lq" || name == "qshrink") {
    reject(a.has_value(), "a");
    reject(gamma.has_value(), "gamma");
    reject(mu.has_value(), "mu");
    const double qv = q.value_or(Penalty::kDefaultQ);
    return name == "lq" ? Penalty::lq(lambda, qv) : Penalty::qshrink(lambda, qv);
  }
  if (name == "scad") {
    reject(q.has_value(), "q");
    reject(gamma.has_value(), "gamma");
    reject(mu.has_value(), "mu");
    return Penalty::scad(lambda, a.value_or(Penalty::kDefaultScadA));
  }
  if (name == "mcp") {
    reject(q.has_value(), "q");
    reject(a.has_value(), "a");
    reject(mu.has_value(), "mu");
    return Penalty::mcp(lambda, gamma.value_or(Penalty::kDefaultMcpGamma));
  }
  if (name == "firm") {
    reject(q.has_value(), "q");
    reject(a.has_value(), "a");
    reject(gamma.has_value(), "gamma");
    return mu ? Penalty::firm(lambda, *mu) : Penalty::firm(lambda);
  }
  throw InvalidArgument("unknown penalty family '" + std::string(name) + "'");
}

namespace {

std::string shape_params(const Penalty& p) {
  switch (p.family()) {
    case PenaltyFamily::Lq:
    case PenaltyFamily::QShrink:
      return "q=" + format_double(p.q());
    case PenaltyFamily::Scad:
      return "a=" + format_double(p.a());
    case PenaltyFamily::Mcp:
      return "gamma=" + format_double(p.gamma());
    default:
      return {};
  }
}

}  // namespace

std::string to_token(const Penalty& p) {
  std::string out(family_name(p.family()));
  std::string params = shape_params(p);
  if (p.family() == PenaltyFamily::Firm && !(p == Penalty::firm(p.lambda()))) {
    params = "mu=" + format_double(p.mu());
  }
  out += ':';
  if (!params.empty()) out += params + ",";
  out += "lambda=" + format_double(p.lambda());
  return out;
}

std::string shape_label(const Penalty& p) {
  std::string out(family_name(p.family()));
  const std::string params = shape_params(p);
  if (!params.empty()) out += ":" + params;
  return out;
}

}  // namespace ncvx
