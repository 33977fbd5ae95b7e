#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ncvx/linop.hpp"
#include "ncvx/penalty.hpp"

namespace ncvx {

struct SolverOptions {
  int max_iter = 5000;
  /// Threshold on the relative iterate change ||x+ - x|| / max(1, ||x||).
  double tol = 1e-8;
  /// Multiplies operator-norm estimates when forming step constants. Values
  /// <= 1 violate the convergence guard; they are accepted and reported.
  double step_margin = 1.01;
  /// ADMM penalty parameter.
  double rho = 1.0;
  bool record_trace = true;

  /// Throws InvalidArgument unless max_iter >= 1, tol > 0, step_margin > 0,
  /// rho > 0.
  void validate() const;
};

struct SolverReport {
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  /// Objective at the initial point followed by one value per iteration.
  /// Empty when record_trace is off or a penalty has no closed form.
  std::vector<double> objective_trace;
  bool objective_available = true;
  /// Whether step_margin > 1, i.e. the descent guard holds.
  bool guard_satisfied = true;
  /// Iterates became non-finite; the solve was stopped early.
  bool diverged = false;
  /// Step constants actually used (L_f, eta_1/eta_2, L_F, ...).
  std::vector<double> step_constants;
};

struct VectorSolution {
  Eigen::VectorXd x;
  SolverReport report;
};

/// Proximal gradient descent on 1/2 ||A x - y||^2 + P(x) with
/// L_f = step_margin * lambda_max(A^T A).
VectorSolution pgd_sparse(const LinearOperator& a, const Eigen::VectorXd& y, const Penalty& p,
                          const SolverOptions& opts, const Eigen::VectorXd& init);

/// Linearized ADMM on min 1/2 ||z||^2 + P(x) s.t. A x - y - z = 0, started
/// from x = init (zero when empty), z = A x - y, w = 0. The trace records
/// 1/2 ||A x - y||^2 + P(x), which is not monotone in general.
VectorSolution admm_sparse(const LinearOperator& a, const Eigen::VectorXd& y, const Penalty& p,
                           const SolverOptions& opts, const Eigen::VectorXd& init = {});

struct SeparationSolution {
  Eigen::VectorXd x1;
  Eigen::VectorXd x2;
  SolverReport report;
};

/// Proximal BCD for the demixing model y = A1 x1 + A2 x2 on the surrogate
/// mu g1(x1) + g2(x2) + (1/beta) ||A1 x1 + A2 x2 - y||^2 with
/// eta_k = step_margin * 2 * lambda_max(A_k^T A_k). Empty inits mean zero.
SeparationSolution bcd_separation(const LinearOperator& a1, const LinearOperator& a2,
                                  const Eigen::VectorXd& y, const Penalty& g1,
                                  const Penalty& g2, double mu, double beta,
                                  const SolverOptions& opts, const Eigen::VectorXd& init1 = {},
                                  const Eigen::VectorXd& init2 = {});

struct MultitaskSolution {
  Eigen::MatrixXd x1;
  Eigen::MatrixXd x2;
  SolverReport report;
};

/// Multichannel version with joint-sparsity penalties sum_i G(||X[i,:]||_2);
/// the prox is applied row-wise. With a single column it reproduces
/// bcd_separation.
MultitaskSolution bcd_separation_multitask(const LinearOperator& a1, const LinearOperator& a2,
                                           const Eigen::MatrixXd& y, const Penalty& g1,
                                           const Penalty& g2, double mu, double beta,
                                           const SolverOptions& opts,
                                           const Eigen::MatrixXd& init1 = {},
                                           const Eigen::MatrixXd& init2 = {});

/// Generalized thresholding of a symmetric matrix: off-diagonal entries go
/// through the scalar prox, the diagonal is kept. Throws InvalidArgument if
/// S is not symmetric to 1e-10.
Eigen::MatrixXd cov_threshold(const Eigen::MatrixXd& s, const Penalty& p);

/// 1/2 ||R - S||_F^2 + sum_{i != j} P(R_ij).
double cov_objective(const Eigen::MatrixXd& r, const Eigen::MatrixXd& s, const Penalty& p);

/// Nearest point on the segment [R, I] with smallest eigenvalue >= epsilon:
/// (1 - theta) R + theta I. Keeps a unit diagonal and the zero pattern.
Eigen::MatrixXd shrink_to_feasible(const Eigen::MatrixXd& r, double epsilon);

struct MatrixSolution {
  Eigen::MatrixXd x;
  SolverReport report;
};

/// Sparse correlation estimate with diag(R) = I and R >= epsilon I.
///
/// ADMM on the split R = Theta: the R-step thresholds off-diagonals with the
/// diagonal pinned to one, the Theta-step floors eigenvalues at epsilon, and
/// the multiplier is updated with step rho. The final R is pulled toward I
/// just enough to satisfy the eigenvalue bound exactly. At most 500
/// iterations. Throws InvalidArgument unless S has a unit diagonal and
/// epsilon is in (0, 1].
MatrixSolution cov_pd(const Eigen::MatrixXd& s, const Penalty& p, double epsilon,
                      const SolverOptions& opts);

/// Proximal gradient (iterative singular-value thresholding) on
/// 1/2 ||P_Omega(X - M)||_F^2 + sum_i P(sigma_i(X)) with L_F = step_margin.
/// Entries of m_obs outside Omega are ignored. Empty init means zero.
MatrixSolution mc_pgd(const ObservationMask& omega, const Eigen::MatrixXd& m_obs,
                      const Penalty& p, const SolverOptions& opts,
                      const Eigen::MatrixXd& init = {});

struct RpcaSolution {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  SolverReport report;
};

struct RpcaParams {
  /// Weight of the sparse penalty.
  double lambda = 1.0;
  /// Quadratic coupling 1/(2 mu) ||M - L - S||_F^2.
  double mu = 1.0;
  /// Proximal weights on ||L - L^k||^2 and ||S - S^k||^2.
  double c = 1e-3;
  double d = 1e-3;
};

/// Proximal BCD on G1(L) + lambda G2(S) + 1/(2 mu) ||M - L - S||_F^2, G1
/// applied to singular values. Empty inits mean zero.
RpcaSolution rpca_bcd(const Eigen::MatrixXd& m, const Penalty& g1, const Penalty& g2,
                      const RpcaParams& params, const SolverOptions& opts,
                      const Eigen::MatrixXd& init_low_rank = {},
                      const Eigen::MatrixXd& init_sparse = {});

/// Objective values, exposed for tests and the experiment harness.
double sparse_objective(const LinearOperator& a, const Eigen::VectorXd& y, const Penalty& p,
                        const Eigen::VectorXd& x);
double separation_objective(const LinearOperator& a1, const LinearOperator& a2,
                            const Eigen::VectorXd& y, const Penalty& g1, const Penalty& g2,
                            double mu, double beta, const Eigen::VectorXd& x1,
                            const Eigen::VectorXd& x2);
double completion_objective(const ObservationMask& omega, const Eigen::MatrixXd& m_obs,
                            const Penalty& p, const Eigen::MatrixXd& x);
double rpca_objective(const Eigen::MatrixXd& m, const Penalty& g1, const Penalty& g2,
                      const RpcaParams& params, const Eigen::MatrixXd& low_rank,
                      const Eigen::MatrixXd& sparse);

}  // namespace ncvx
