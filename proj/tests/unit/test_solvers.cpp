#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ncvx/benchkit.hpp"
#include "ncvx/errors.hpp"
#include "ncvx/oracle.hpp"
#include "ncvx/proxext.hpp"
#include "ncvx/solvers.hpp"

using namespace ncvx;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * rng.normal();
  return m;
}

bool nonincreasing(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k] > trace[k - 1] + 1e-10 * std::max(1.0, std::abs(trace[k - 1]))) return false;
  }
  return true;
}

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_CASE("solver options are validated") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.tol = 0.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  o.max_iter = 0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  o.rho = -1.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
}

TEST_CASE("pgd with the identity operator is one prox step") {
  Eigen::VectorXd t(5);
  t << 3.0, -0.5, 1.2, -4.0, 0.0;
  for (const Penalty& p : {Penalty::soft(1.0), Penalty::hard(1.0), Penalty::lq(1.0, 0.5)}) {
    SolverOptions o;
    o.step_margin = 1.0;
    const VectorSolution sol = pgd_sparse(make_identity(5), t, p, o, Eigen::VectorXd::Zero(5));
    CHECK(sol.report.converged);
    for (int i = 0; i < 5; ++i) CHECK(sol.x(i) == doctest::Approx(prox_scalar(p, t(i))));
    CHECK(sol.report.iterations <= 2);
  }
}

TEST_CASE("pgd from zero data stays at zero") {
  Rng rng(1);
  const LinearOperator a = make_dense(gaussian(10, 20, rng));
  const VectorSolution sol =
      pgd_sparse(a, Eigen::VectorXd::Zero(10), Penalty::soft(0.1), {}, Eigen::VectorXd::Zero(20));
  CHECK(sol.x.norm() == 0.0);
  CHECK(sol.report.iterations == 1);
  CHECK(sol.report.converged);
  CHECK(sol.report.objective_trace.size() == 2);
}

TEST_CASE("pgd rejects bad input") {
  const LinearOperator a = make_identity(3);
  CHECK_THROWS_AS(pgd_sparse(a, Eigen::VectorXd::Zero(4), Penalty::soft(1), {}, Eigen::VectorXd::Zero(3)),
                  DimensionMismatch);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  y(1) = std::nan("");
  CHECK_THROWS_AS(pgd_sparse(a, y, Penalty::soft(1), {}, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST_CASE("pgd recovers a sparse vector with an lq warm start") {
  Rng rng(2);
  const Eigen::MatrixXd g = gaussian(100, 256, rng, 0.1);
  const LinearOperator a = make_dense(g);
  const Eigen::VectorXd x0 = gen_sparse_vector(256, 10, rng);
  const Eigen::VectorXd y = a.apply(x0);
  SolverOptions o;
  o.tol = 1e-12;
  o.max_iter = 20000;
  const double amax = a.apply_adjoint(y).cwiseAbs().maxCoeff();
  // The l1 solution locates the support; lq with a small lambda then removes
  // the shrinkage bias.
  const VectorSolution soft = pgd_sparse(a, y, Penalty::soft(1e-3 * amax), o, Eigen::VectorXd::Zero(256));
  const VectorSolution lq = pgd_sparse(a, y, Penalty::lq(1e-6 * amax, 0.5), o, soft.x);
  CHECK(rel_err_db(x0, lq.x) <= -80.0);
  CHECK(nonincreasing(lq.report.objective_trace));
  CHECK(nonincreasing(soft.report.objective_trace));
}

TEST_CASE("pgd objective descends and the fixed point is stationary") {
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const LinearOperator a = make_dense(gaussian(30, 60, rng));
    const Eigen::VectorXd y = a.apply(gen_sparse_vector(60, 5, rng)) + 0.01 * gaussian(30, 1, rng);
    for (const Penalty& p : {Penalty::hard(0.5), Penalty::scad(0.5), Penalty::mcp(0.5), Penalty::lq(0.5, 0.3)}) {
      SolverOptions o;
      o.tol = 1e-10;
      const VectorSolution sol = pgd_sparse(a, y, p, o, Eigen::VectorXd::Zero(60));
      CHECK(nonincreasing(sol.report.objective_trace));
      CHECK(sol.report.objective_trace.size() == static_cast<std::size_t>(sol.report.iterations) + 1);
      if (sol.report.converged) {
        SolverOptions one = o;
        one.max_iter = 1;
        const VectorSolution again = pgd_sparse(a, y, p, one, sol.x);
        CHECK((again.x - sol.x).norm() / std::max(1.0, sol.x.norm()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("a step margin below one is reported, not hidden") {
  Rng rng(3);
  const LinearOperator a = make_dense(gaussian(20, 20, rng));
  const Eigen::VectorXd y = gaussian(20, 1, rng);
  SolverOptions o;
  o.step_margin = 0.3;
  o.max_iter = 200;
  const VectorSolution sol = pgd_sparse(a, y, Penalty::soft(0.01), o, Eigen::VectorXd::Zero(20));
  CHECK_FALSE(sol.report.guard_satisfied);
  CHECK(!sol.report.objective_trace.empty());
  CHECK(sol.report.step_constants.size() == 1);
}

TEST_CASE("qshrink solves run without an objective trace") {
  Rng rng(4);
  const LinearOperator a = make_dense(gaussian(20, 40, rng));
  const VectorSolution sol =
      pgd_sparse(a, gaussian(20, 1, rng), Penalty::qshrink(0.2), {}, Eigen::VectorXd::Zero(40));
  CHECK_FALSE(sol.report.objective_available);
  CHECK(sol.report.objective_trace.empty());
  CHECK(sol.x.allFinite());
}

TEST_CASE("admm agrees with pgd on the soft penalty") {
  for (int seed = 0; seed < 3; ++seed) {
    Rng rng(200 + seed);
    const LinearOperator a = make_dense(gaussian(40, 80, rng));
    const Eigen::VectorXd y = a.apply(gen_sparse_vector(80, 6, rng));
    const Penalty p = Penalty::soft(0.05 * a.apply_adjoint(y).cwiseAbs().maxCoeff());
    SolverOptions o;
    o.tol = 1e-12;
    o.max_iter = 50000;
    const VectorSolution ref = pgd_sparse(a, y, p, o, Eigen::VectorXd::Zero(80));
    const VectorSolution admm = admm_sparse(a, y, p, o);
    CHECK((admm.x - ref.x).norm() / ref.x.norm() <= 1e-4);
    CHECK((a.apply(admm.x) - y).norm() >= 0.0);
  }
  const VectorSolution zero = admm_sparse(make_identity(4), Eigen::VectorXd::Zero(4), Penalty::lq(1.0), {});
  CHECK(zero.x.norm() == 0.0);
}

TEST_CASE("admm constraint residual vanishes at convergence") {
  Rng rng(5);
  const LinearOperator a = make_dense(gaussian(30, 50, rng));
  const Eigen::VectorXd y = a.apply(gen_sparse_vector(50, 4, rng));
  SolverOptions o;
  o.tol = 1e-10;
  o.max_iter = 50000;
  const VectorSolution sol = admm_sparse(a, y, Penalty::soft(0.1), o);
  CHECK(sol.report.converged);
  CHECK(sol.report.final_residual <= 1e-10);
}

TEST_CASE("separation with an identity second block") {
  Rng rng(6);
  const LinearOperator a1 = make_dense(gaussian(40, 80, rng, 1.0 / std::sqrt(40.0)));
  const Eigen::VectorXd x1 = gen_sparse_vector(80, 4, rng);
  const Eigen::VectorXd y = a1.apply(x1);
  SolverOptions o;
  o.tol = 1e-12;
  o.max_iter = 20000;
  const SeparationSolution sol = bcd_separation(a1, make_identity(40), y, Penalty::hard(0.01),
                                                Penalty::hard(0.5), 1.0, 1.0, o);
  CHECK(sol.x2.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(nonincreasing(sol.report.objective_trace));
  CHECK(sol.report.step_constants.size() == 2);
  CHECK_THROWS_AS(bcd_separation(a1, make_identity(41), Eigen::VectorXd::Zero(40), Penalty::soft(1),
                                 Penalty::soft(1), 1.0, 1.0, o),
                  DimensionMismatch);
  CHECK_THROWS_AS(bcd_separation(a1, make_identity(40), y, Penalty::soft(1), Penalty::soft(1), 0.0, 1.0, o),
                  InvalidArgument);
}

TEST_CASE("separation objective descends") {
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(300 + seed);
    const LinearOperator a1 = make_partial_dct(64, 32, seed);
    const LinearOperator a2 = make_dense(gaussian(32, 64, rng, 0.2));
    const Eigen::VectorXd y = a1.apply(gen_sparse_vector(64, 3, rng)) + a2.apply(gen_sparse_vector(64, 3, rng));
    const SeparationSolution sol = bcd_separation(a1, a2, y, Penalty::lq(0.05, 0.3),
                                                  Penalty::scad(0.05), 1.0, 0.5, {});
    CHECK(nonincreasing(sol.report.objective_trace));
    CHECK(sol.report.objective_trace.back() ==
          doctest::Approx(separation_objective(a1, a2, y, Penalty::lq(0.05, 0.3), Penalty::scad(0.05),
                                               1.0, 0.5, sol.x1, sol.x2)));
  }
}

TEST_CASE("multitask separation reduces to the single channel solver") {
  Rng rng(7);
  const LinearOperator a1 = make_dense(gaussian(20, 30, rng));
  const LinearOperator a2 = make_partial_dct(30, 20, 3);
  const Eigen::VectorXd y = gaussian(20, 1, rng);
  SolverOptions o;
  o.max_iter = 300;
  const SeparationSolution one = bcd_separation(a1, a2, y, Penalty::mcp(0.3), Penalty::hard(0.2), 0.7, 0.9, o);
  const MultitaskSolution many = bcd_separation_multitask(a1, a2, y, Penalty::mcp(0.3), Penalty::hard(0.2), 0.7, 0.9, o);
  CHECK((many.x1.col(0) - one.x1).norm() <= 1e-10);
  CHECK((many.x2.col(0) - one.x2).norm() <= 1e-10);
  CHECK(many.report.iterations == one.report.iterations);

  const MultitaskSolution zero = bcd_separation_multitask(a1, a2, Eigen::MatrixXd::Zero(20, 3),
                                                          Penalty::soft(0.1), Penalty::soft(0.1), 1.0, 1.0, o);
  CHECK(zero.x1.norm() == 0.0);
  CHECK(zero.x2.norm() == 0.0);
}

TEST_CASE("multitask separation recovers a joint support") {
  Rng rng(8);
  const Eigen::Index m = 60, n = 120, channels = 3;
  const LinearOperator a1 = make_dense(gaussian(m, n, rng, 1.0 / std::sqrt(double(m))));
  const LinearOperator a2 = make_identity(m);
  Eigen::MatrixXd x1 = Eigen::MatrixXd::Zero(n, channels);
  for (Eigen::Index r : {5, 17, 40, 77, 101}) {
    for (Eigen::Index c = 0; c < channels; ++c) x1(r, c) = 1.0 + rng.uniform();
  }
  const Eigen::MatrixXd y = a1.apply_columns(x1);
  SolverOptions o;
  o.tol = 1e-12;
  o.max_iter = 20000;
  const MultitaskSolution sol = bcd_separation_multitask(a1, a2, y, Penalty::hard(0.02), Penalty::hard(1.0),
                                                         1.0, 1.0, o);
  CHECK(nonincreasing(sol.report.objective_trace));
  for (Eigen::Index c = 0; c < channels; ++c) {
    CHECK(support_f1(x1.col(c), sol.x1.col(c), 1e-6) == 1.0);
  }
}

TEST_CASE("covariance thresholding") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(4, 4, 0.05);
  s.diagonal().setOnes();
  CHECK(cov_threshold(s, Penalty::soft(0.0)) == s);
  CHECK(cov_threshold(s, Penalty::soft(0.1)) == Eigen::MatrixXd::Identity(4, 4));
  for (const Penalty& p : {Penalty::hard(0.3), Penalty::scad(0.3), Penalty::lq(0.3)}) {
    CHECK(cov_threshold(Eigen::MatrixXd::Identity(5, 5), p) == Eigen::MatrixXd::Identity(5, 5));
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(0, 1) = 0.2;
  CHECK_THROWS_AS(cov_threshold(bad, Penalty::soft(0.1)), InvalidArgument);

  Rng rng(9);
  const Eigen::MatrixXd r = sample_correlation(gen_gaussian_samples(gen_cov_model(CovKind::Block, 12), 20, rng));
  const Penalty p = Penalty::scad(0.2);
  const Eigen::MatrixXd out = cov_threshold(r, p);
  CHECK(out == out.transpose());
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      if (i == j) {
        CHECK(out(i, j) == r(i, j));
      } else {
        const double xo = oracle::prox_oracle(p, r(i, j), 1e-4);
        CHECK(oracle::prox_objective(p, r(i, j), out(i, j)) <= oracle::prox_objective(p, r(i, j), xo) + 1e-10);
      }
    }
  }
}

TEST_CASE("positive definite correlation estimate") {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 0.9, 0.9, 1.0;
  const MatrixSolution two = cov_pd(s, Penalty::soft(0.0), 0.5, {});
  CHECK(std::abs(two.x(0, 1)) <= 0.5 + 1e-9);
  CHECK(min_eig(two.x) >= 0.5 - 1e-6);
  CHECK(two.x.diagonal().isOnes(1e-12));

  const Eigen::MatrixXd feasible = gen_cov_model(CovKind::Banded, 6);
  CHECK((cov_pd(feasible, Penalty::soft(0.0), 0.1, {}).x - feasible).norm() < 1e-8);

  CHECK_THROWS_AS(cov_pd(2.0 * feasible, Penalty::soft(0.1), 0.1, {}), InvalidArgument);
  CHECK_THROWS_AS(cov_pd(feasible, Penalty::soft(0.1), 0.0, {}), InvalidArgument);

  const Eigen::MatrixXd sigma = gen_cov_model(CovKind::Block, 40);
  for (int seed = 0; seed < 3; ++seed) {
    Rng rng(400 + seed);
    const Eigen::MatrixXd r = sample_correlation(gen_gaussian_samples(sigma, 20, rng));
    for (const Penalty& p : {Penalty::soft(0.3), Penalty::hard(0.4), Penalty::scad(0.3)}) {
      const double eps = 1e-2;
      const MatrixSolution sol = cov_pd(r, p, eps, {});
      CHECK((sol.x.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-8);
      CHECK(min_eig(sol.x) >= eps - 1e-6);
      CHECK(sol.x == sol.x.transpose());
      CHECK(cov_objective(sol.x, r, p) <=
            cov_objective(shrink_to_feasible(cov_threshold(r, p), eps), r, p) + 1e-9);
    }
  }
}

TEST_CASE("matrix completion") {
  Rng rng(10);
  const Eigen::MatrixXd m = gen_lowrank(12, 10, 2, rng);
  const ObservationMask all = ObservationMask::full(12, 10);
  SolverOptions o;
  o.tol = 1e-12;
  const MatrixSolution full = mc_pgd(all, m, Penalty::soft(1e-9), o);
  CHECK((full.x - m).norm() / m.norm() < 1e-8);
  const MatrixSolution zero = mc_pgd(all, Eigen::MatrixXd::Zero(12, 10), Penalty::hard(1.0), o);
  CHECK(zero.x.norm() == 0.0);
  CHECK_THROWS_AS(mc_pgd(all, Eigen::MatrixXd::Zero(3, 3), Penalty::hard(1.0), o), DimensionMismatch);
}

TEST_CASE("noiseless rank-one completion with the hard rule") {
  Rng rng(11);
  const Eigen::MatrixXd m = gen_lowrank(100, 100, 1, rng);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index j = 0; j < 100; ++j)
    for (Eigen::Index i = 0; i < 100; ++i)
      if (rng.uniform() < 0.5) entries.emplace_back(i, j);
  const ObservationMask omega(100, 100, entries);
  SolverOptions o;
  o.tol = 1e-10;
  o.max_iter = 3000;
  // Threshold above the spectrum of the sampling noise P_Omega(M) - M / 2.
  const double threshold = 0.4 * thin_svd(omega.project(m)).singular_values(0);
  const MatrixSolution sol = mc_pgd(omega, m, with_zero_threshold(Penalty::hard(1.0), threshold), o);
  CHECK(rel_err_db(m, sol.x) <= -60.0);
  CHECK(nonincreasing(sol.report.objective_trace));
}

TEST_CASE("robust PCA") {
  RpcaParams params;
  params.lambda = 1.0;
  params.mu = 1.0;
  const RpcaSolution zero = rpca_bcd(Eigen::MatrixXd::Zero(5, 6), Penalty::hard(1.0), Penalty::hard(1.0), params, {});
  CHECK(zero.low_rank.norm() == 0.0);
  CHECK(zero.sparse.norm() == 0.0);
  params.c = 0.0;
  CHECK_THROWS_AS(rpca_bcd(Eigen::MatrixXd::Zero(5, 6), Penalty::hard(1.0), Penalty::hard(1.0), params, {}),
                  InvalidArgument);

  Rng rng(12);
  const Eigen::MatrixXd l0 = gen_lowrank(100, 100, 5, rng);
  RpcaParams big;
  big.lambda = 1e6;
  big.mu = 0.1;
  SolverOptions o;
  o.tol = 1e-10;
  o.max_iter = 2000;
  const RpcaSolution clean = rpca_bcd(l0, Penalty::hard(1.0), Penalty::hard(1.0), big, o);
  CHECK(rel_err_db(l0, clean.low_rank) <= -60.0);
  CHECK(clean.sparse.norm() == 0.0);
  CHECK(nonincreasing(clean.report.objective_trace));
}
