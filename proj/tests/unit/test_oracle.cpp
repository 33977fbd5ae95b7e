#include <doctest.h>

#include <cmath>

#include "ncvx/oracle.hpp"
#include "ncvx/rng.hpp"

using namespace ncvx;

TEST_CASE("scalar oracle") {
  CHECK(oracle::prox_oracle(Penalty::soft(1.0), 3.0, 1e-4) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(oracle::prox_oracle(Penalty::hard(1.0), 0.0, 1e-4) == 0.0);
  // At the hard threshold both 0 and t are minimizers; the oracle prefers 0.
  CHECK(oracle::prox_oracle(Penalty::hard(2.0), 2.0, 1e-4) == 0.0);
  CHECK(oracle::prox_oracle(Penalty::soft(1.0), -3.0, 1e-4) == doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("the implicit q-shrinkage penalty reproduces the rule") {
  const Penalty p = Penalty::qshrink(0.8, 0.4);
  CHECK(oracle::penalty(p, 0.0) == 0.0);
  // Slope at 0+ equals lambda, the zero threshold.
  CHECK(oracle::penalty(p, 1e-7) / 1e-7 == doctest::Approx(0.8).epsilon(1e-4));
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double t = 5.0 * rng.uniform();
    const double x = oracle::prox_oracle(p, t, 1e-4);
    CHECK(x == doctest::Approx(prox_scalar(p, t)).epsilon(2e-3));
  }
}

TEST_CASE("finer grids never do worse") {
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const double t = 6.0 * rng.uniform() - 3.0;
    for (const Penalty& p : {Penalty::lq(0.6, 0.3), Penalty::scad(0.5), Penalty::qshrink(0.5)}) {
      const double coarse = oracle::prox_objective(p, t, oracle::prox_oracle(p, t, 2e-3));
      const double fine = oracle::prox_objective(p, t, oracle::prox_oracle(p, t, 1e-3));
      CHECK(fine <= coarse + 1e-15);
    }
  }
}

TEST_CASE("group oracle") {
  CHECK(oracle::group_prox_oracle(Penalty::soft(1.0), Eigen::Vector2d::Zero(), 1e-3).norm() == 0.0);
  const Eigen::Vector2d t(3.0, 4.0);
  const Eigen::Vector2d x = oracle::group_prox_oracle(Penalty::soft(1.0), t, 1e-3);
  CHECK((x - Eigen::Vector2d(2.4, 3.2)).norm() < 2e-3);
  const double angle = std::acos(std::clamp(x.dot(t) / (x.norm() * t.norm()), -1.0, 1.0));
  CHECK(angle < 1e-3);
}

TEST_CASE("diagonal oracle") {
  CHECK(oracle::svt_oracle_diag(Penalty::soft(1.0), Eigen::Vector3d::Zero()).norm() == 0.0);
  const Eigen::VectorXd d = oracle::svt_oracle_diag(Penalty::soft(2.0), Eigen::Vector2d(3.0, 1.0));
  CHECK(d(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(d(1) == 0.0);
}
