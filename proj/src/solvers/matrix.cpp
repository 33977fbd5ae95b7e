#include <Eigen/Eigenvalues>

#include "common.hpp"
#include "ncvx/proxext.hpp"

namespace ncvx {

namespace {

constexpr int kCovMaxIter = 500;

void require_square_symmetric(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("matrix is not square");
  detail::require_finite(s, "S");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("matrix is not symmetric");
  }
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue decomposition failed");
  return es.eigenvalues()(0);
}

/// Projection onto {Theta : Theta >= epsilon I} in Frobenius norm.
Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& m, double epsilon) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue decomposition failed");
  const Eigen::VectorXd vals = es.eigenvalues().cwiseMax(epsilon);
  Eigen::MatrixXd out = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

Eigen::MatrixXd cov_threshold(const Eigen::MatrixXd& s, const Penalty& p) {
  require_square_symmetric(s);
  const Eigen::Index n = s.rows();
  Eigen::MatrixXd out = s;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      out(i, j) = prox_scalar(p, s(i, j));
      out(j, i) = out(i, j);
    }
  }
  return out;
}

double cov_objective(const Eigen::MatrixXd& r, const Eigen::MatrixXd& s, const Penalty& p) {
  if (r.rows() != s.rows() || r.cols() != s.cols()) throw DimensionMismatch("R and S differ");
  double pen = 0.0;
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      if (i != j) pen += penalty_value(p, r(i, j));
    }
  }
  return 0.5 * (r - s).squaredNorm() + pen;
}

Eigen::MatrixXd shrink_to_feasible(const Eigen::MatrixXd& r, double epsilon) {
  require_square_symmetric(r);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must be in (0, 1]");
  if (r.rows() == 0) return r;
  const double lmin = min_eigenvalue(r);
  if (lmin >= epsilon) return r;
  const double theta = (epsilon - lmin) / (1.0 - lmin);
  Eigen::MatrixXd out = (1.0 - theta) * r;
  out.diagonal().array() += theta;
  return out;
}

MatrixSolution cov_pd(const Eigen::MatrixXd& s, const Penalty& p, double epsilon,
                      const SolverOptions& opts) {
  opts.validate();
  require_square_symmetric(s);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must be in (0, 1]");
  if ((s.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10) {
    throw InvalidArgument("S must have a unit diagonal");
  }
  const Eigen::Index n = s.rows();
  const double rho = opts.rho;
  const int max_iter = std::min(opts.max_iter, kCovMaxIter);

  MatrixSolution sol;
  SolverReport& rep = sol.report = detail::start_report(opts, p.has_value());
  rep.step_constants = {rho};

  Eigen::MatrixXd theta = shrink_to_feasible(cov_threshold(s, p), epsilon);
  Eigen::MatrixXd r = theta;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (rep.objective_available) detail::record(rep, opts, cov_objective(r, s, p));

  const double scale = 1.0 / (1.0 + rho);
  for (int k = 1; k <= max_iter; ++k) {
    rep.iterations = k;
    const Eigen::MatrixXd v = (s + rho * theta - w) * scale;
    Eigen::MatrixXd next(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      next(j, j) = 1.0;
      for (Eigen::Index i = j + 1; i < n; ++i) {
        next(i, j) = prox_scalar(p, 0.5 * (v(i, j) + v(j, i)), scale);
        next(j, i) = next(i, j);
      }
    }
    if (!next.allFinite()) {
      rep.diverged = true;
      break;
    }
    const Eigen::MatrixXd theta_next = floor_eigenvalues(next + w / rho, epsilon);
    const Eigen::MatrixXd gap = next - theta_next;
    w += rho * gap;
    rep.final_residual = std::max(detail::relative_change(next, r),
                                  gap.norm() / std::max(1.0, next.norm()));
    r = std::move(next);
    theta = theta_next;
    if (rep.objective_available) detail::record(rep, opts, cov_objective(r, s, p));
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  sol.x = rep.diverged ? theta : shrink_to_feasible(r, epsilon);
  return sol;
}

double completion_objective(const ObservationMask& omega, const Eigen::MatrixXd& m_obs,
                            const Penalty& p, const Eigen::MatrixXd& x) {
  if (x.rows() != omega.rows() || x.cols() != omega.cols()) {
    throw DimensionMismatch("X shape does not match the mask");
  }
  return 0.5 * omega.project(x - m_obs).squaredNorm() + lowrank_penalty_value(p, x);
}

MatrixSolution mc_pgd(const ObservationMask& omega, const Eigen::MatrixXd& m_obs,
                      const Penalty& p, const SolverOptions& opts, const Eigen::MatrixXd& init) {
  opts.validate();
  if (m_obs.rows() != omega.rows() || m_obs.cols() != omega.cols()) {
    throw DimensionMismatch("observed matrix shape does not match the mask");
  }
  if (init.size() != 0 && (init.rows() != m_obs.rows() || init.cols() != m_obs.cols())) {
    throw DimensionMismatch("init shape");
  }
  const Eigen::MatrixXd observed = omega.project(m_obs);
  detail::require_finite(observed, "observed entries");
  detail::require_finite(init, "init");

  MatrixSolution sol;
  SolverReport& rep = sol.report = detail::start_report(opts, p.has_value());
  // P_Omega is a projection, so the Lipschitz constant of the gradient is 1.
  const double lf = opts.step_margin;
  rep.step_constants = {lf};

  Eigen::MatrixXd x = init.size() ? init : Eigen::MatrixXd::Zero(m_obs.rows(), m_obs.cols());
  if (rep.objective_available) detail::record(rep, opts, completion_objective(omega, observed, p, x));

  for (int k = 1; k <= opts.max_iter; ++k) {
    rep.iterations = k;
    const Eigen::MatrixXd v = x - (omega.project(x) - observed) / lf;
    if (!v.allFinite()) {
      rep.diverged = true;
      break;
    }
    ShrunkMatrix next = svt_shrink(p, v, 1.0 / lf);
    rep.final_residual = detail::relative_change(next.matrix, x);
    x = std::move(next.matrix);
    if (rep.objective_available) {
      detail::record(rep, opts,
                     0.5 * omega.project(x - observed).squaredNorm() +
                         singular_value_penalty(p, next.singular_values));
    }
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  sol.x = std::move(x);
  return sol;
}

double rpca_objective(const Eigen::MatrixXd& m, const Penalty& g1, const Penalty& g2,
                      const RpcaParams& params, const Eigen::MatrixXd& low_rank,
                      const Eigen::MatrixXd& sparse) {
  return lowrank_penalty_value(g1, low_rank) + params.lambda * detail::penalty_sum(g2, sparse) +
         (m - low_rank - sparse).squaredNorm() / (2.0 * params.mu);
}

RpcaSolution rpca_bcd(const Eigen::MatrixXd& m, const Penalty& g1, const Penalty& g2,
                      const RpcaParams& params, const SolverOptions& opts,
                      const Eigen::MatrixXd& init_low_rank, const Eigen::MatrixXd& init_sparse) {
  opts.validate();
  for (double v : {params.lambda, params.mu, params.c, params.d}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("rpca parameters must be positive");
  }
  detail::require_finite(m, "M");
  auto check_init = [&](const Eigen::MatrixXd& init, const char* what) {
    if (init.size() != 0 && (init.rows() != m.rows() || init.cols() != m.cols())) {
      throw DimensionMismatch(std::string(what) + " shape");
    }
    detail::require_finite(init, what);
  };
  check_init(init_low_rank, "init_low_rank");
  check_init(init_sparse, "init_sparse");

  RpcaSolution sol;
  SolverReport& rep = sol.report = detail::start_report(opts, g1.has_value() && g2.has_value());
  const double mu = params.mu;
  const double cl = params.c * mu;
  const double ds = params.d * mu;
  rep.step_constants = {1.0 + cl, 1.0 + ds};
  rep.guard_satisfied = true;

  Eigen::MatrixXd l = init_low_rank.size() ? init_low_rank : Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Eigen::MatrixXd s = init_sparse.size() ? init_sparse : Eigen::MatrixXd::Zero(m.rows(), m.cols());
  if (rep.objective_available) detail::record(rep, opts, rpca_objective(m, g1, g2, params, l, s));

  for (int k = 1; k <= opts.max_iter; ++k) {
    rep.iterations = k;
    ShrunkMatrix ln = svt_shrink(g1, (m - s + cl * l) / (1.0 + cl), mu / (1.0 + cl));
    Eigen::MatrixXd sn =
        detail::prox_matrix(g2, (m - ln.matrix + ds * s) / (1.0 + ds), params.lambda * mu / (1.0 + ds));
    if (!ln.matrix.allFinite() || !sn.allFinite()) {
      rep.diverged = true;
      break;
    }
    rep.final_residual = detail::joint_relative_change(
        (ln.matrix - l).squaredNorm() + (sn - s).squaredNorm(), l.squaredNorm() + s.squaredNorm());
    l = std::move(ln.matrix);
    s = std::move(sn);
    if (rep.objective_available) {
      detail::record(rep, opts,
                     singular_value_penalty(g1, ln.singular_values) +
                         params.lambda * detail::penalty_sum(g2, s) +
                         (m - l - s).squaredNorm() / (2.0 * mu));
    }
    if (rep.final_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  sol.low_rank = std::move(l);
  sol.sparse = std::move(s);
  return sol;
}

}  // namespace ncvx
