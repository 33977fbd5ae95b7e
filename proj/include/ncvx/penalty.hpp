#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ncvx {

enum class PenaltyFamily { Soft, Hard, Lq, QShrink, Scad, Mcp, Firm };

/// A sparsity-inducing penalty P_lambda together with its shape parameters.
///
/// Construct through the named factories; every factory validates its
/// arguments and throws InvalidArgument on violation:
///   lambda >= 0, 0 < q < 1 (Lq, QShrink), a > 2 (Scad), gamma > 1 (Mcp),
///   mu > lambda (Firm).
class Penalty {
 public:
  static constexpr double kDefaultQ = 0.5;
  static constexpr double kDefaultScadA = 3.7;
  static constexpr double kDefaultMcpGamma = 2.0;

  static Penalty soft(double lambda);
  static Penalty hard(double lambda);
  static Penalty lq(double lambda, double q = kDefaultQ);
  static Penalty qshrink(double lambda, double q = kDefaultQ);
  static Penalty scad(double lambda, double a = kDefaultScadA);
  static Penalty mcp(double lambda, double gamma = kDefaultMcpGamma);
  /// Firm thresholding with mu = 2 * lambda.
  static Penalty firm(double lambda);
  static Penalty firm(double lambda, double mu);

  PenaltyFamily family() const noexcept { return family_; }
  double lambda() const noexcept { return lambda_; }
  double q() const noexcept { return q_; }
  double a() const noexcept { return a_; }
  double gamma() const noexcept { return gamma_; }
  double mu() const noexcept { return mu_; }

  /// Same family and shape with a new threshold parameter. A Firm penalty
  /// built with the default mu keeps mu = 2 * lambda.
  Penalty with_lambda(double lambda) const;

  /// Whether the family admits a closed-form penalty value (all but QShrink).
  bool has_value() const noexcept { return family_ != PenaltyFamily::QShrink; }

  /// True for the soft-thresholding (l1) family.
  bool is_convex() const noexcept { return family_ == PenaltyFamily::Soft; }

  friend bool operator==(const Penalty&, const Penalty&) = default;

 private:
  Penalty(PenaltyFamily family, double lambda) : family_(family), lambda_(lambda) {}
  void validate() const;

  PenaltyFamily family_;
  double lambda_;
  double q_ = 0.0;
  double a_ = 0.0;
  double gamma_ = 0.0;
  double mu_ = 0.0;
  bool default_mu_ = false;
};

std::string_view family_name(PenaltyFamily family);

/// P_lambda(x). Throws PenaltyUnavailable for QShrink.
double penalty_value(const Penalty& p, double x);

/// Sum of P_lambda over the entries.
double penalty_value(const Penalty& p, std::span<const double> x);

/// Global minimizer of scale * P_lambda(x) + (x - t)^2 / 2.
///
/// Closed forms are used whenever the scaled subproblem is weakly convex or
/// the family is closed under scaling. At the set-valued boundary of the
/// hard and lq rules the smaller-magnitude minimizer (zero) is returned.
/// SCAD, MCP and firm with a scale large enough to make the subproblem
/// nonconvex fall back to an exact piecewise search over their quadratic
/// pieces. QShrink scales its threshold parameter.
double prox_scalar(const Penalty& p, double t, double scale = 1.0);

/// prox_scalar(p, ., scale) with the per-penalty constants computed once;
/// results are bit-identical to prox_scalar. Throws like prox_scalar on an
/// invalid scale.
class ScalarProx {
 public:
  ScalarProx(const Penalty& p, double scale = 1.0);
  double operator()(double t) const;

 private:
  Penalty p_;
  double scale_;
  // |t| at or below this maps to zero; 0 when no cheap bound is known.
  double dead_zone_ = 0.0;
  double lq_beta_ = 0.0;
};

/// Largest T with prox_scalar(p, t, scale) == 0 for all |t| <= T.
double zero_threshold(const Penalty& p, double scale = 1.0);

std::vector<double> prox_elementwise(const Penalty& p, std::span<const double> t,
                                     double scale = 1.0);

/// Threshold parameter that gives `p`'s family (and shape) a zero threshold
/// of exactly `threshold` at unit scale.
Penalty with_zero_threshold(const Penalty& p, double threshold);

/// Parses tokens such as "soft:lambda=0.1", "lq:q=0.5,lambda=0.1" or
/// "scad:a=3.7". A missing lambda defaults to 1. Throws InvalidArgument.
Penalty parse_penalty(std::string_view token);

/// Canonical token; round-trips through parse_penalty.
std::string to_token(const Penalty& p);

/// Token without the lambda entry, e.g. "lq:q=0.5" or "soft".
std::string shape_label(const Penalty& p);

}  // namespace ncvx
