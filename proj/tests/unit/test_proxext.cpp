#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ncvx/errors.hpp"
#include "ncvx/oracle.hpp"
#include "ncvx/proxext.hpp"
#include "ncvx/rng.hpp"

using namespace ncvx;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, n, rng));
  return qr.householderQ();
}

}  // namespace

TEST_CASE("group prox examples") {
  const Eigen::Vector2d t(3.0, 4.0);
  const Eigen::VectorXd soft = prox_group(Penalty::soft(1.0), t);
  CHECK(soft(0) == doctest::Approx(2.4));
  CHECK(soft(1) == doctest::Approx(3.2));
  CHECK(prox_group(Penalty::hard(2.0), Eigen::Vector2d(1.9, 0.0)).norm() == 0.0);
  CHECK(prox_group(Penalty::hard(2.0), Eigen::Vector2d(0.0, -1.9)).norm() == 0.0);
  CHECK(prox_group(Penalty::scad(1.0), Eigen::Vector3d::Zero()).norm() == 0.0);
  for (double s : {-3.0, -0.4, 0.9, 2.2}) {
    Eigen::VectorXd v(1);
    v << s;
    for (const Penalty& p : {Penalty::soft(1.0), Penalty::hard(1.0), Penalty::lq(0.7, 0.3),
                             Penalty::mcp(0.5), Penalty::firm(0.5)}) {
      CHECK(prox_group(p, v)(0) == doctest::Approx(prox_scalar(p, s)).epsilon(1e-14));
    }
  }
}

TEST_CASE("group prox is collinear and matches the 2-D oracle") {
  Rng rng(31);
  for (int draw = 0; draw < 15; ++draw) {
    const Eigen::Vector2d t(3.0 * rng.normal(), 3.0 * rng.normal());
    const double lambda = 0.2 + 2.0 * rng.uniform();
    for (const Penalty& p : {Penalty::soft(lambda), Penalty::hard(lambda), Penalty::lq(lambda, 0.5),
                             Penalty::scad(lambda), Penalty::mcp(lambda)}) {
      const Eigen::VectorXd x = prox_group(p, t);
      const double alpha = x.dot(t) / t.squaredNorm();
      CHECK(alpha >= 0.0);
      CHECK(alpha <= 1.0);
      CHECK((x - alpha * t).norm() <= 1e-12 * (1.0 + t.norm()));
      const Eigen::Vector2d xo = oracle::group_prox_oracle(p, t, 1e-3);
      CHECK(oracle::group_objective(p, t, x) <= oracle::group_objective(p, t, xo) + 1e-6);
    }
  }
}

TEST_CASE("row-wise group prox") {
  Eigen::MatrixXd t(2, 2);
  t << 3.0, 4.0, 0.3, 0.4;
  const Eigen::MatrixXd out = prox_group_rows(Penalty::soft(1.0), t);
  CHECK(out(0, 0) == doctest::Approx(2.4));
  CHECK(out(0, 1) == doctest::Approx(3.2));
  CHECK(out.row(1).norm() == 0.0);
  CHECK(prox_group_rows(Penalty::hard(1.0), Eigen::MatrixXd::Zero(3, 2)).norm() == 0.0);
  Eigen::VectorXd col(4);
  col << -2.0, 0.5, 1.2, 3.0;
  const Eigen::MatrixXd one = prox_group_rows(Penalty::soft(1.0), col);
  for (int i = 0; i < 4; ++i) CHECK(one(i, 0) == doctest::Approx(prox_scalar(Penalty::soft(1.0), col(i))));
}

TEST_CASE("singular value shrinkage examples") {
  const Eigen::MatrixXd m = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  const Eigen::MatrixXd soft = svt_generalized(Penalty::soft(2.0), m);
  CHECK((soft - Eigen::MatrixXd(Eigen::Vector2d(1.0, 0.0).asDiagonal())).norm() < 1e-12);
  const Eigen::MatrixXd hard = svt_generalized(Penalty::hard(2.0), m);
  CHECK((hard - Eigen::MatrixXd(Eigen::Vector2d(3.0, 0.0).asDiagonal())).norm() < 1e-12);
  CHECK(svt_generalized(Penalty::scad(1.0), Eigen::MatrixXd::Zero(3, 4)).norm() == 0.0);
  CHECK(svt_generalized(Penalty::scad(1.0), Eigen::MatrixXd::Zero(3, 4)).rows() == 3);
}

TEST_CASE("low-rank penalty values") {
  const Eigen::MatrixXd m = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  CHECK(lowrank_penalty_value(Penalty::soft(1.0), m) == doctest::Approx(4.0));
  CHECK(lowrank_penalty_value(Penalty::hard(1.0), m) == doctest::Approx(2.0));
  CHECK(lowrank_penalty_value(Penalty::hard(1.0), Eigen::MatrixXd::Zero(3, 3)) == 0.0);
  CHECK_THROWS_AS(lowrank_penalty_value(Penalty::qshrink(1.0), m), PenaltyUnavailable);
  CHECK_THROWS_AS(lowrank_penalty_value(Penalty::qshrink(1.0), Eigen::MatrixXd::Zero(2, 2)),
                  PenaltyUnavailable);
}

TEST_CASE("shrinkage of a diagonal matrix matches the diagonal oracle") {
  Eigen::VectorXd d(4);
  d << 4.1, 2.7, 1.3, 0.4;
  for (const Penalty& p : {Penalty::soft(1.0), Penalty::hard(1.0), Penalty::lq(1.0, 0.5),
                           Penalty::qshrink(1.0, 0.5), Penalty::mcp(1.0)}) {
    const Eigen::MatrixXd out = svt_generalized(p, d.asDiagonal());
    const Eigen::VectorXd expect = oracle::svt_oracle_diag(p, d);
    CHECK((out.diagonal() - expect).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((Eigen::MatrixXd(out.diagonal().asDiagonal()) - out).norm() < 1e-12);
  }
}

TEST_CASE("singular value shrinkage is unitarily invariant and optimal") {
  Rng rng(41);
  for (int draw = 0; draw < 10; ++draw) {
    const Eigen::MatrixXd m = 2.0 * random_matrix(4, 4, rng);
    const Eigen::MatrixXd q1 = random_orthogonal(4, rng);
    const Eigen::MatrixXd q2 = random_orthogonal(4, rng);
    const Penalty p = Penalty::lq(1.0, 0.5);
    const ShrunkMatrix base = svt_shrink(p, m);
    const Eigen::MatrixXd rotated = svt_generalized(p, q1 * m * q2.transpose());
    CHECK((rotated - q1 * base.matrix * q2.transpose()).norm() < 1e-8);

    const Eigen::VectorXd sin = thin_svd(m).singular_values;
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(base.singular_values(i) <= sin(i) + 1e-12);

    auto objective = [&](const Eigen::MatrixXd& x) {
      return lowrank_penalty_value(p, x) + 0.5 * (x - m).squaredNorm();
    };
    const double best = objective(base.matrix);
    for (int k = 0; k < 100; ++k) {
      CHECK(best <= objective(base.matrix + 0.05 * random_matrix(4, 4, rng)) + 1e-12);
    }
  }
}
