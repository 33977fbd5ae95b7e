#pragma once

#include <Eigen/Dense>
#include <span>

#include "ncvx/penalty.hpp"

/// Hot inner loops of the solvers in two builds: `serial` is the reference
/// implementation, `parallel` splits the same loop across OpenMP threads.
/// Every output element is computed by one thread with the same operation
/// order as the serial loop, so both produce bit-identical results.
namespace ncvx::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace serial {

/// y = A x.
void gemv(const RowMatrix& a, std::span<const double> x, std::span<double> y);

/// out[i] = prox_scalar(p, in[i], scale).
void prox_map(const Penalty& p, double scale, std::span<const double> in, std::span<double> out);

/// Row i of out = group prox of row i of in.
void group_prox_rows(const Penalty& p, double scale, const Eigen::MatrixXd& in,
                     Eigen::MatrixXd& out);

}  // namespace serial

namespace parallel {

void gemv(const RowMatrix& a, std::span<const double> x, std::span<double> y);
void prox_map(const Penalty& p, double scale, std::span<const double> in, std::span<double> out);
void group_prox_rows(const Penalty& p, double scale, const Eigen::MatrixXd& in,
                     Eigen::MatrixXd& out);

}  // namespace parallel

/// Number of OpenMP worker threads available (1 without OpenMP).
int max_threads();

}  // namespace ncvx::kernels
