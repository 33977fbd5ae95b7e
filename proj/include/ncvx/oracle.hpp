#pragma once

#include <Eigen/Dense>

#include "ncvx/penalty.hpp"

/// Brute-force references for the prox operators, used by the tests.
namespace ncvx::oracle {

/// Penalty value for every family. QShrink has no closed form; its value is
/// the penalty whose exact prox is the q-shrinkage rule: with c = lambda^(2-q)
/// and u >= lambda solving u - c u^(q-1) = |x|,
///   P(x) = (c/q)(u^q - lambda^q) - (c^2/2)(u^(2q-2) - lambda^(2q-2)).
double penalty(const Penalty& p, double x);

/// scale * P(x) + (x - t)^2 / 2.
double prox_objective(const Penalty& p, double t, double x, double scale = 1.0);

/// Grid argmin of prox_objective over {-|t|, ..., |t|} at spacing grid_step
/// plus the points 0 and t; ties go to the smaller |x|.
double prox_oracle(const Penalty& p, double t, double grid_step, double scale = 1.0);

/// scale * P(|x|_2) + |x - t|^2 / 2 for 2-vectors.
double group_objective(const Penalty& p, const Eigen::Vector2d& t, const Eigen::Vector2d& x,
                       double scale = 1.0);

/// Grid argmin of group_objective over the disk of radius |t|_2. The disk is
/// scanned on a coarse grid which is then refined around the best point
/// until the spacing reaches grid_step; 0 and t are always candidates.
Eigen::Vector2d group_prox_oracle(const Penalty& p, const Eigen::Vector2d& t, double grid_step,
                                  double scale = 1.0);

/// Per-entry prox_oracle; reference for singular-value shrinkage of a
/// diagonal matrix.
Eigen::VectorXd svt_oracle_diag(const Penalty& p, const Eigen::VectorXd& diag_entries,
                                double grid_step = 1e-4);

}  // namespace ncvx::oracle
