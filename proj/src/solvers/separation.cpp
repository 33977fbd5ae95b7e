#include "common.hpp"
#include "ncvx/proxext.hpp"

namespace ncvx {

namespace {

void check_weights(double mu, double beta) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
}

}  // namespace

double separation_objective(const LinearOperator& a1, const LinearOperator& a2,
                            const Eigen::VectorXd& y, const Penalty& g1, const Penalty& g2,
                            double mu, double beta, const Eigen::VectorXd& x1,
                            const Eigen::VectorXd& x2) {
  const Eigen::VectorXd r = a1.apply(x1) + a2.apply(x2) - y;
  return mu * detail::penalty_sum(g1, x1) + detail::penalty_sum(g2, x2) + r.squaredNorm() / beta;
}

SeparationSolution bcd_separation(const LinearOperator& a1, const LinearOperator& a2,
                                  const Eigen::VectorXd& y, const Penalty& g1,
                                  const Penalty& g2, double mu, double beta,
                                  const SolverOptions& opts, const Eigen::VectorXd& init1,
                                  const Eigen::VectorXd& init2) {
  opts.validate();
  check_weights(mu, beta);
  if (a1.out_dim() != a2.out_dim()) throw DimensionMismatch("A1 and A2 have different row counts");
  if (y.size() != a1.out_dim()) throw DimensionMismatch("y length does not match A1");
  if (init1.size() != 0 && init1.size() != a1.in_dim()) throw DimensionMismatch("init1 length");
  if (init2.size() != 0 && init2.size() != a2.in_dim()) throw DimensionMismatch("init2 length");
  detail::require_finite(y, "y");
  detail::require_finite(init1, "init1");
  detail::require_finite(init2, "init2");

  SeparationSolution sol;
  SolverReport& rep = sol.report =
      detail::start_report(opts, g1.has_value() && g2.has_value());
  const double eta1 = detail::step_constant(opts.step_margin, 2.0 * op_norm_sq(a1).value);
  const double eta2 = detail::step_constant(opts.step_margin, 2.0 * op_norm_sq(a2).value);
  rep.step_constants = {eta1, eta2};

  Eigen::VectorXd x1 = init1.size() ? init1 : Eigen::VectorXd::Zero(a1.in_dim());
  Eigen::VectorXd x2 = init2.size() ? init2 : Eigen::VectorXd::Zero(a2.in_dim());
  Eigen::VectorXd ax1 = a1.apply(x1);
  Eigen::VectorXd ax2 = a2.apply(x2);
  auto objective = [&] {
    return mu * detail::penalty_sum(g1, x1) + detail::penalty_sum(g2, x2) +
           (ax1 + ax2 - y).squaredNorm() / beta;
  };
  if (rep.objective_available) detail::record(rep, opts, objective());

  for (int k = 1; k <= opts.max_iter; ++k) {
    rep.iterations = k;
    Eigen::VectorXd r = ax1 + ax2 - y;
    Eigen::VectorXd n1 =
        detail::prox_vector(g1, x1 - (2.0 / eta1) * a1.apply_adjoint(r), beta * mu / eta1);
    Eigen::VectorXd an1 = a1.apply(n1);
    r = an1 + ax2 - y;
    Eigen::VectorXd n2 =
        detail::prox_vector(g2, x2 - (2.0 / eta2) * a2.apply_adjoint(r), beta / eta2);
    if (!n1.allFinite() || !n2.allFinite()) {
      rep.diverged = true;
      break;
    }
    rep.final_residual = detail::joint_relative_change(
        (n1 - x1).squaredNorm() + (n2 - x2).squaredNorm(), x1.squaredNorm() + x2.squaredNorm());
    x1 = std::move(n1);
    x2 = std::move(n2);
    ax1 = std::move(an1);
    ax2 = a2.apply(x2);
    if (rep.objective_available) detail::record(rep, opts, objective());
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  sol.x1 = std::move(x1);
  sol.x2 = std::move(x2);
  return sol;
}

MultitaskSolution bcd_separation_multitask(const LinearOperator& a1, const LinearOperator& a2,
                                           const Eigen::MatrixXd& y, const Penalty& g1,
                                           const Penalty& g2, double mu, double beta,
                                           const SolverOptions& opts,
                                           const Eigen::MatrixXd& init1,
                                           const Eigen::MatrixXd& init2) {
  opts.validate();
  check_weights(mu, beta);
  if (a1.out_dim() != a2.out_dim()) throw DimensionMismatch("A1 and A2 have different row counts");
  if (y.rows() != a1.out_dim()) throw DimensionMismatch("Y rows do not match A1");
  if (y.cols() < 1) throw DimensionMismatch("Y needs at least one column");
  const Eigen::Index channels = y.cols();
  if (init1.size() != 0 && (init1.rows() != a1.in_dim() || init1.cols() != channels)) {
    throw DimensionMismatch("init1 shape");
  }
  if (init2.size() != 0 && (init2.rows() != a2.in_dim() || init2.cols() != channels)) {
    throw DimensionMismatch("init2 shape");
  }
  detail::require_finite(y, "Y");
  detail::require_finite(init1, "init1");
  detail::require_finite(init2, "init2");

  MultitaskSolution sol;
  SolverReport& rep = sol.report =
      detail::start_report(opts, g1.has_value() && g2.has_value());
  const double eta1 = detail::step_constant(opts.step_margin, 2.0 * op_norm_sq(a1).value);
  const double eta2 = detail::step_constant(opts.step_margin, 2.0 * op_norm_sq(a2).value);
  rep.step_constants = {eta1, eta2};

  Eigen::MatrixXd x1 = init1.size() ? init1 : Eigen::MatrixXd::Zero(a1.in_dim(), channels);
  Eigen::MatrixXd x2 = init2.size() ? init2 : Eigen::MatrixXd::Zero(a2.in_dim(), channels);
  Eigen::MatrixXd ax1 = a1.apply_columns(x1);
  Eigen::MatrixXd ax2 = a2.apply_columns(x2);
  auto objective = [&] {
    return mu * row_penalty_value(g1, x1) + row_penalty_value(g2, x2) +
           (ax1 + ax2 - y).squaredNorm() / beta;
  };
  if (rep.objective_available) detail::record(rep, opts, objective());

  for (int k = 1; k <= opts.max_iter; ++k) {
    rep.iterations = k;
    Eigen::MatrixXd r = ax1 + ax2 - y;
    Eigen::MatrixXd n1 = prox_group_rows(
        g1, x1 - (2.0 / eta1) * a1.apply_adjoint_columns(r), beta * mu / eta1);
    Eigen::MatrixXd an1 = a1.apply_columns(n1);
    r = an1 + ax2 - y;
    Eigen::MatrixXd n2 =
        prox_group_rows(g2, x2 - (2.0 / eta2) * a2.apply_adjoint_columns(r), beta / eta2);
    if (!n1.allFinite() || !n2.allFinite()) {
      rep.diverged = true;
      break;
    }
    rep.final_residual = detail::joint_relative_change(
        (n1 - x1).squaredNorm() + (n2 - x2).squaredNorm(), x1.squaredNorm() + x2.squaredNorm());
    x1 = std::move(n1);
    x2 = std::move(n2);
    ax1 = std::move(an1);
    ax2 = a2.apply_columns(x2);
    if (rep.objective_available) detail::record(rep, opts, objective());
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  sol.x1 = std::move(x1);
  sol.x2 = std::move(x2);
  return sol;
}

}  // namespace ncvx
