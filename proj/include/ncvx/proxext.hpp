#pragma once

#include <Eigen/Dense>

#include "ncvx/penalty.hpp"

namespace ncvx {

/// Thin SVD M = U diag(values) V^T with values sorted nonincreasing.
struct SvdFactors {
  Eigen::MatrixXd left_vectors;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd right_vectors;
};

/// Singular values below this are treated as exact zeros.
inline constexpr double kRankTolerance = 1e-12;

/// Throws NumericalError on non-finite input.
SvdFactors thin_svd(const Eigen::MatrixXd& m);

/// Minimizer of scale * P(||x||_2) + ||x - t||^2 / 2: the scalar rule applied
/// to the norm, keeping the direction of t.
Eigen::VectorXd prox_group(const Penalty& p, const Eigen::VectorXd& t, double scale = 1.0);

/// Row-wise prox_group: rows are zeroed or shrunk jointly across columns.
Eigen::MatrixXd prox_group_rows(const Penalty& p, const Eigen::MatrixXd& t, double scale = 1.0);

/// Result of a singular-value shrinkage: the matrix and its (shrunk,
/// nonincreasing) singular values.
struct ShrunkMatrix {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd singular_values;
};

/// U diag(prox(sigma_i)) V^T for M = U diag(sigma) V^T. For q-shrinkage
/// this applies the shrinkage rule without an optimality guarantee since
/// the rule has no closed-form penalty.
ShrunkMatrix svt_shrink(const Penalty& p, const Eigen::MatrixXd& m, double scale = 1.0);

inline Eigen::MatrixXd svt_generalized(const Penalty& p, const Eigen::MatrixXd& m,
                                       double scale = 1.0) {
  return svt_shrink(p, m, scale).matrix;
}

/// Sum of P(sigma_i) over singular values above kRankTolerance.
double lowrank_penalty_value(const Penalty& p, const Eigen::MatrixXd& m);

/// Same sum from precomputed singular values.
double singular_value_penalty(const Penalty& p, const Eigen::VectorXd& singular_values);

/// Joint-sparsity penalty sum_i P(||row_i||_2).
double row_penalty_value(const Penalty& p, const Eigen::MatrixXd& x);

}  // namespace ncvx
