#include "ncvx/proxext.hpp"

#include <cmath>

#include "ncvx/errors.hpp"
#include "ncvx/kernels.hpp"

namespace ncvx {

SvdFactors thin_svd(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NumericalError("svd: matrix has non-finite entries");
  if (m.size() == 0) {
    return {Eigen::MatrixXd(m.rows(), 0), Eigen::VectorXd(0), Eigen::MatrixXd(m.cols(), 0)};
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("svd: decomposition failed");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Eigen::VectorXd prox_group(const Penalty& p, const Eigen::VectorXd& t, double scale) {
  const double norm = t.norm();
  if (norm == 0.0) {
    (void)prox_scalar(p, 0.0, scale);
    return Eigen::VectorXd::Zero(t.size());
  }
  return (prox_scalar(p, norm, scale) / norm) * t;
}

Eigen::MatrixXd prox_group_rows(const Penalty& p, const Eigen::MatrixXd& t, double scale) {
  Eigen::MatrixXd out;
  kernels::parallel::group_prox_rows(p, scale, t, out);
  return out;
}

ShrunkMatrix svt_shrink(const Penalty& p, const Eigen::MatrixXd& m, double scale) {
  const SvdFactors f = thin_svd(m);
  const Eigen::Index r = f.singular_values.size();
  Eigen::VectorXd shrunk(r);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double s = f.singular_values(i) > kRankTolerance ? f.singular_values(i) : 0.0;
    shrunk(i) = prox_scalar(p, s, scale);
    if (shrunk(i) != 0.0) keep = i + 1;
  }
  Eigen::MatrixXd out = f.left_vectors.leftCols(keep) * shrunk.head(keep).asDiagonal() *
                        f.right_vectors.leftCols(keep).transpose();
  if (keep == 0) out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  return {std::move(out), std::move(shrunk)};
}

double singular_value_penalty(const Penalty& p, const Eigen::VectorXd& singular_values) {
  if (!p.has_value()) throw PenaltyUnavailable("q-shrinkage has no closed-form penalty");
  double sum = 0.0;
  for (double s : singular_values) {
    if (s > kRankTolerance) sum += penalty_value(p, s);
  }
  return sum;
}

double lowrank_penalty_value(const Penalty& p, const Eigen::MatrixXd& m) {
  if (!p.has_value()) throw PenaltyUnavailable("q-shrinkage has no closed-form penalty");
  return singular_value_penalty(p, thin_svd(m).singular_values);
}

double row_penalty_value(const Penalty& p, const Eigen::MatrixXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) sum += penalty_value(p, x.row(i).norm());
  return sum;
}

}  // namespace ncvx
