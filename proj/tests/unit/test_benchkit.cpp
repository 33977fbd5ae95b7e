#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ncvx/benchkit.hpp"
#include "ncvx/errors.hpp"
#include "ncvx/linop.hpp"

using namespace ncvx;

TEST_CASE("sparse vectors") {
  Rng rng(1);
  CHECK(gen_sparse_vector(4, 0, rng).norm() == 0.0);
  CHECK((gen_sparse_vector(4, 4, rng).array() != 0.0).count() == 4);
  const Eigen::VectorXd x = gen_sparse_vector(100, 7, rng);
  CHECK((x.array() != 0.0).count() == 7);
  Rng a(2), b(2);
  CHECK(gen_sparse_vector(50, 5, a) == gen_sparse_vector(50, 5, b));
  CHECK_THROWS_AS(gen_sparse_vector(3, 4, rng), InvalidArgument);
}

TEST_CASE("noise at an exact SNR") {
  Rng rng(3);
  const Eigen::VectorXd x = gen_sparse_vector(200, 20, rng);
  for (double snr : {-5.0, 10.0, 33.3, 50.0}) {
    const Eigen::VectorXd noisy = add_noise_snr(x, snr, rng);
    CHECK(std::abs(measured_snr_db(x, noisy) - snr) <= 1e-10);
  }
  CHECK(add_noise_snr(x, std::numeric_limits<double>::infinity(), rng) == x);
  CHECK_THROWS_AS(add_noise_snr(Eigen::VectorXd(Eigen::VectorXd::Zero(5)), 10.0, rng), InvalidArgument);
  Rng a(4), b(4);
  CHECK(add_noise_snr(x, 20.0, a) == add_noise_snr(x, 20.0, b));
}

TEST_CASE("symmetric alpha-stable noise") {
  Rng rng(5);
  const double gamma = 1e-3;
  const Eigen::VectorXd gauss = gen_sas_noise(2.0, gamma, 1000000, rng);
  const double var = gauss.squaredNorm() / static_cast<double>(gauss.size());
  CHECK(var == doctest::Approx(2.0 * gamma * gamma).epsilon(0.05));

  const Eigen::VectorXd cauchy = gen_sas_noise(1.0, gamma, 1000000, rng);
  std::vector<double> mags(cauchy.size());
  for (Eigen::Index i = 0; i < cauchy.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(cauchy(i));
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  CHECK(mags[mags.size() / 2] == doctest::Approx(gamma).epsilon(0.05));

  CHECK_THROWS_AS(gen_sas_noise(0.0, 1.0, 3, rng), InvalidArgument);
  CHECK_THROWS_AS(gen_sas_noise(2.5, 1.0, 3, rng), InvalidArgument);
  Rng a(6), b(6);
  CHECK(gen_sas_noise(1.5, 0.1, 100, a) == gen_sas_noise(1.5, 0.1, 100, b));
}

TEST_CASE("covariance models") {
  CovParams one;
  one.block_size = 1;
  CHECK(gen_cov_model(CovKind::Block, 5, one) == Eigen::MatrixXd::Identity(5, 5));
  CovParams zero;
  zero.bandwidth = 0;
  CHECK(gen_cov_model(CovKind::Banded, 5, zero) == Eigen::MatrixXd::Identity(5, 5));
  CovParams b1;
  b1.bandwidth = 1;
  const Eigen::MatrixXd band = gen_cov_model(CovKind::Banded, 3, b1);
  CHECK(band(0, 1) == 0.5);
  CHECK(band(0, 2) == 0.0);
  // Eigenvalues of tridiag(0.5, 1, 0.5) are 1 + cos(k pi / 4).
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(band).eigenvalues();
  CHECK(ev(0) == doctest::Approx(1.0 - std::sqrt(0.5)));
  for (Eigen::Index d : {2, 37, 100, 400}) {
    for (CovKind kind : {CovKind::Block, CovKind::Banded}) {
      const Eigen::MatrixXd s = gen_cov_model(kind, d);
      CHECK(s.diagonal().isOnes());
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues()(0) > 0.0);
    }
  }
  CHECK(gen_cov_model(CovKind::Block, 40)(0, 19) == 0.5);
  CHECK(gen_cov_model(CovKind::Block, 40)(0, 20) == 0.0);
  CHECK_THROWS_AS(gen_cov_model(CovKind::Block, 1), InvalidArgument);
}

TEST_CASE("samples and sample correlation") {
  Rng rng(7);
  const Eigen::MatrixXd sigma = gen_cov_model(CovKind::Banded, 6);
  const Eigen::MatrixXd s = sample_correlation(gen_gaussian_samples(sigma, 100000, rng));
  CHECK(s.diagonal().isOnes(0.0));
  CHECK((s - sigma).cwiseAbs().maxCoeff() < 0.02);
  const Eigen::MatrixXd white = sample_correlation(gen_gaussian_samples(Eigen::MatrixXd::Identity(5, 5), 20000, rng));
  CHECK((white - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 0.05);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = bad(1, 0) = 2.0;
  CHECK_THROWS_AS(gen_gaussian_samples(bad, 5, rng), InvalidArgument);
}

TEST_CASE("low-rank generation and truncation") {
  Rng rng(8);
  const Eigen::MatrixXd m = gen_lowrank(30, 20, 4, rng);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  CHECK(sv(3) > 1e-6);
  CHECK(sv(4) < 1e-10 * sv(0));
  const Eigen::MatrixXd full = gen_lowrank(6, 5, 5, rng);
  CHECK((truncate_svd(full, 5) - full).norm() < 1e-10);
  const Eigen::MatrixXd d = Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal();
  const Eigen::MatrixXd t = truncate_svd(d, 1);
  CHECK((t - Eigen::MatrixXd(Eigen::Vector3d(3.0, 0.0, 0.0).asDiagonal())).norm() < 1e-12);
  const Eigen::MatrixXd r2 = truncate_svd(gen_lowrank(10, 10, 10, rng), 2);
  CHECK(Eigen::JacobiSVD<Eigen::MatrixXd>(r2).singularValues()(2) < 1e-10);
  CHECK_THROWS_AS(gen_lowrank(3, 3, 4, rng), InvalidArgument);
}

TEST_CASE("phantom image") {
  const Eigen::MatrixXd img = gen_phantom(64);
  CHECK(img.minCoeff() >= 0.0);
  CHECK(img.maxCoeff() <= 1.0);
  CHECK(gen_phantom(64) == img);
  const Eigen::VectorXd coeffs = make_haar2d(64).apply_adjoint(img.reshaped());
  const double fraction = static_cast<double>((coeffs.array().abs() > 1e-10).count()) / 4096.0;
  CHECK(fraction <= 0.10);
  CHECK(fraction > 0.01);
  CHECK_THROWS_AS(gen_phantom(8), InvalidArgument);
}

TEST_CASE("metrics") {
  Eigen::VectorXd x(2), z(2);
  x << 1.0, 0.0;
  z << 0.0, 0.0;
  CHECK(rel_err_db(x, x) == -300.0);
  CHECK(psnr(x, x) == 300.0);
  CHECK(rel_err_db(x, z) == doctest::Approx(0.0));
  CHECK_THROWS_AS(rel_err_db(z, x), InvalidArgument);
  Eigen::VectorXd a(3), b(3);
  a << 1.0, -2.0, 0.5;
  b << 1.1, -1.9, 0.4;
  CHECK(rel_err_db(a, b) == doctest::Approx(rel_err_db(-3.5 * a, -3.5 * b)).epsilon(1e-12));
  CHECK(rel_err_db(a, b) == doctest::Approx(20.0 * std::log10((b - a).norm() / a.norm())));
  // psnr with peak 1: mse = 0.01 -> 20 dB.
  CHECK(psnr(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Constant(4, 0.1)) == doctest::Approx(20.0));
  CHECK(support_f1(a, a) == 1.0);
  Eigen::VectorXd p(4), q(4);
  p << 1, 1, 0, 0;
  q << 1, 0, 1, 0;
  CHECK(support_f1(p, q) == doctest::Approx(0.5));
  CHECK(support_f1(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)) == 1.0);
  const Eigen::MatrixXd s = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  const Eigen::MatrixXd sh = Eigen::Vector2d(2.0, 1.5).asDiagonal();
  CHECK(spectral_rel_err(s, sh) == doctest::Approx(0.25));
}
