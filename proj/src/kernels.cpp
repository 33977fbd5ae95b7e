#include "ncvx/kernels.hpp"

#include <cmath>

#include "ncvx/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ncvx::kernels {

namespace {

// Below this many output elements the fork/join overhead dominates.
constexpr std::ptrdiff_t kParallelGrain = 1024;

void check_gemv(const RowMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<Eigen::Index>(x.size()) != a.cols() ||
      static_cast<Eigen::Index>(y.size()) != a.rows()) {
    throw DimensionMismatch("gemv: operand sizes do not match the matrix");
  }
}

inline double row_dot(const RowMatrix& a, Eigen::Index i, const double* x) {
  const Eigen::Map<const Eigen::VectorXd> xv(x, a.cols());
  return a.row(i).dot(xv.transpose());
}

inline double group_factor(const ScalarProx& prox, const Eigen::MatrixXd& in, Eigen::Index i) {
  double sq = 0.0;
  for (Eigen::Index j = 0; j < in.cols(); ++j) sq += in(i, j) * in(i, j);
  const double norm = std::sqrt(sq);
  return norm == 0.0 ? 0.0 : prox(norm) / norm;
}

}  // namespace

namespace serial {

void gemv(const RowMatrix& a, std::span<const double> x, std::span<double> y) {
  check_gemv(a, x, y);
  for (Eigen::Index i = 0; i < a.rows(); ++i) y[i] = row_dot(a, i, x.data());
}

void prox_map(const Penalty& p, double scale, std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size()) throw DimensionMismatch("prox_map: size mismatch");
  const ScalarProx prox(p, scale);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = prox(in[i]);
}

void group_prox_rows(const Penalty& p, double scale, const Eigen::MatrixXd& in,
                     Eigen::MatrixXd& out) {
  out.resize(in.rows(), in.cols());
  const ScalarProx prox(p, scale);
  for (Eigen::Index i = 0; i < in.rows(); ++i) {
    const double f = group_factor(prox, in, i);
    for (Eigen::Index j = 0; j < in.cols(); ++j) out(i, j) = f * in(i, j);
  }
}

}  // namespace serial

namespace parallel {

void gemv(const RowMatrix& a, std::span<const double> x, std::span<double> y) {
  check_gemv(a, x, y);
  const std::ptrdiff_t rows = a.rows();
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for schedule(static) if (rows * a.cols() > kParallelGrain * 64)
  for (std::ptrdiff_t i = 0; i < rows; ++i) yp[i] = row_dot(a, i, xp);
}

void prox_map(const Penalty& p, double scale, std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size()) throw DimensionMismatch("prox_map: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const double* ip = in.data();
  double* op = out.data();
  // Construction validates the scale, so nothing throws inside the region.
  const ScalarProx prox(p, scale);
#pragma omp parallel for schedule(static) if (n > kParallelGrain)
  for (std::ptrdiff_t i = 0; i < n; ++i) op[i] = prox(ip[i]);
}

void group_prox_rows(const Penalty& p, double scale, const Eigen::MatrixXd& in,
                     Eigen::MatrixXd& out) {
  out.resize(in.rows(), in.cols());
  const ScalarProx prox(p, scale);
  const std::ptrdiff_t rows = in.rows();
#pragma omp parallel for schedule(static) if (rows > kParallelGrain)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double f = group_factor(prox, in, i);
    for (Eigen::Index j = 0; j < in.cols(); ++j) out(i, j) = f * in(i, j);
  }
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ncvx::kernels
