#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ncvx/errors.hpp"
#include "ncvx/kernels.hpp"
#include "ncvx/solvers.hpp"

namespace ncvx::detail {

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& v, const std::string& what) {
  if (!v.derived().allFinite()) throw InvalidArgument(what + " contains NaN or Inf");
}

template <typename A, typename B>
double relative_change(const Eigen::MatrixBase<A>& next, const Eigen::MatrixBase<B>& prev) {
  return (next - prev).norm() / std::max(1.0, prev.norm());
}

inline double joint_relative_change(double diff_sq, double prev_sq) {
  return std::sqrt(diff_sq) / std::max(1.0, std::sqrt(prev_sq));
}

/// Step constant from a norm estimate; a zero operator has zero gradient,
/// so any positive step works.
inline double step_constant(double margin, double norm_sq) {
  return norm_sq > 0.0 ? margin * norm_sq : margin;
}

inline Eigen::VectorXd prox_vector(const Penalty& p, const Eigen::VectorXd& v, double scale) {
  Eigen::VectorXd out(v.size());
  kernels::parallel::prox_map(p, scale, {v.data(), static_cast<std::size_t>(v.size())},
                              {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

inline Eigen::MatrixXd prox_matrix(const Penalty& p, const Eigen::MatrixXd& v, double scale) {
  Eigen::MatrixXd out(v.rows(), v.cols());
  kernels::parallel::prox_map(p, scale, {v.data(), static_cast<std::size_t>(v.size())},
                              {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

inline double penalty_sum(const Penalty& p, const Eigen::MatrixXd& x) {
  return penalty_value(p, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

inline double penalty_sum(const Penalty& p, const Eigen::VectorXd& x) {
  return penalty_value(p, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

/// Report scaffolding shared by the iterative solvers.
inline SolverReport start_report(const SolverOptions& opts, bool objective_available) {
  SolverReport r;
  r.guard_satisfied = opts.step_margin > 1.0;
  r.objective_available = objective_available;
  return r;
}

inline void record(SolverReport& r, const SolverOptions& opts, double objective) {
  if (opts.record_trace && r.objective_available) r.objective_trace.push_back(objective);
}

}  // namespace ncvx::detail
