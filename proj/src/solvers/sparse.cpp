#include <cmath>

#include "common.hpp"
#include "ncvx/errors.hpp"
#include "ncvx/solvers.hpp"

namespace ncvx {

void SolverOptions::validate() const {
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (!(step_margin > 0.0) || !std::isfinite(step_margin)) {
    throw InvalidArgument("step_margin must be positive");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("rho must be positive");
}

namespace {

void check_problem(const LinearOperator& a, const Eigen::VectorXd& y, const Eigen::VectorXd& init) {
  if (y.size() != a.out_dim()) throw DimensionMismatch("y length does not match A");
  if (init.size() != 0 && init.size() != a.in_dim()) {
    throw DimensionMismatch("init length does not match A");
  }
  detail::require_finite(y, "y");
  detail::require_finite(init, "init");
}

double half_sq(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

}  // namespace

double sparse_objective(const LinearOperator& a, const Eigen::VectorXd& y, const Penalty& p,
                        const Eigen::VectorXd& x) {
  return half_sq(a.apply(x) - y) + detail::penalty_sum(p, x);
}

VectorSolution pgd_sparse(const LinearOperator& a, const Eigen::VectorXd& y, const Penalty& p,
                          const SolverOptions& opts, const Eigen::VectorXd& init) {
  opts.validate();
  check_problem(a, y, init);

  VectorSolution sol;
  SolverReport& rep = sol.report = detail::start_report(opts, p.has_value());
  const double lf = detail::step_constant(opts.step_margin, op_norm_sq(a).value);
  rep.step_constants = {lf};

  Eigen::VectorXd x = init.size() ? init : Eigen::VectorXd::Zero(a.in_dim());
  // The residual computed for the gradient also gives the objective of the
  // current iterate, so each trace entry is recorded one step late.
  Eigen::VectorXd r = a.apply(x) - y;
  for (int k = 1; k <= opts.max_iter; ++k) {
    if (rep.objective_available) detail::record(rep, opts, half_sq(r) + detail::penalty_sum(p, x));
    const Eigen::VectorXd v = x - a.apply_adjoint(r) / lf;
    Eigen::VectorXd next = detail::prox_vector(p, v, 1.0 / lf);
    rep.iterations = k;
    if (!next.allFinite()) {
      rep.diverged = true;
      break;
    }
    rep.final_residual = detail::relative_change(next, x);
    x = std::move(next);
    r = a.apply(x) - y;
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  if (rep.objective_available && !rep.diverged) {
    detail::record(rep, opts, half_sq(r) + detail::penalty_sum(p, x));
  }
  sol.x = std::move(x);
  return sol;
}

VectorSolution admm_sparse(const LinearOperator& a, const Eigen::VectorXd& y, const Penalty& p,
                           const SolverOptions& opts, const Eigen::VectorXd& init) {
  opts.validate();
  check_problem(a, y, init);

  VectorSolution sol;
  SolverReport& rep = sol.report = detail::start_report(opts, p.has_value());
  const double eta = detail::step_constant(opts.step_margin, op_norm_sq(a).value);
  const double rho = opts.rho;
  rep.step_constants = {eta, rho};

  Eigen::VectorXd x = init.size() ? init : Eigen::VectorXd::Zero(a.in_dim());
  Eigen::VectorXd ax = a.apply(x);
  Eigen::VectorXd z = ax - y;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(y.size());
  const double y_scale = std::max(1.0, y.norm());
  if (rep.objective_available) detail::record(rep, opts, half_sq(ax - y) + detail::penalty_sum(p, x));

  for (int k = 1; k <= opts.max_iter; ++k) {
    const Eigen::VectorXd v = ax - y - z + w / rho;
    Eigen::VectorXd next = detail::prox_vector(p, x - a.apply_adjoint(v) / eta, 1.0 / (rho * eta));
    rep.iterations = k;
    if (!next.allFinite()) {
      rep.diverged = true;
      break;
    }
    const double dx = detail::relative_change(next, x);
    x = std::move(next);
    ax = a.apply(x);
    z = (rho / (1.0 + rho)) * (ax - y + w / rho);
    const Eigen::VectorXd primal = ax - y - z;
    w += rho * primal;
    if (!w.allFinite()) {
      rep.diverged = true;
      break;
    }
    rep.final_residual = std::max(dx, primal.norm() / y_scale);
    if (rep.objective_available) detail::record(rep, opts, half_sq(ax - y) + detail::penalty_sum(p, x));
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  sol.x = std::move(x);
  return sol;
}

}  // namespace ncvx
