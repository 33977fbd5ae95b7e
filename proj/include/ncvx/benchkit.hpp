#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ncvx/linop.hpp"
#include "ncvx/rng.hpp"

namespace ncvx {

/// n-vector with K nonzeros at uniformly chosen positions, values N(0, 1).
Eigen::VectorXd gen_sparse_vector(Eigen::Index n, Eigen::Index k, Rng& rng);

/// x plus white Gaussian noise rescaled so that 10 log10(|x|^2 / |e|^2) is
/// exactly snr_db. snr_db = +inf returns x unchanged.
Eigen::VectorXd add_noise_snr(const Eigen::VectorXd& x, double snr_db, Rng& rng);
Eigen::MatrixXd add_noise_snr(const Eigen::MatrixXd& x, double snr_db, Rng& rng);

/// Measured 10 log10(|x|^2 / |noisy - x|^2).
double measured_snr_db(const Eigen::VectorXd& x, const Eigen::VectorXd& noisy);

/// Symmetric alpha-stable draws with dispersion gamma (Chambers-Mallows-Stuck).
Eigen::VectorXd gen_sas_noise(double alpha, double gamma, Eigen::Index n, Rng& rng);

enum class CovKind { Block, Banded };

struct CovParams {
  Eigen::Index block_size = 20;
  double block_rho = 0.5;
  Eigen::Index bandwidth = 3;
};

/// Block: unit diagonal, rho inside blocks of block_size (the last block
/// may be short). Banded: max(1 - |i - j| / (B + 1), 0).
Eigen::MatrixXd gen_cov_model(CovKind kind, Eigen::Index d, const CovParams& params = {});

/// n x d matrix whose rows are N(0, Sigma), drawn as z^T L^T with L the
/// Cholesky factor. Throws InvalidArgument if Sigma is not PD.
Eigen::MatrixXd gen_gaussian_samples(const Eigen::MatrixXd& sigma, Eigen::Index n, Rng& rng);

/// Centered sample covariance scaled to a unit diagonal.
Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& data);

/// Product of m x r and r x n standard normal factors.
Eigen::MatrixXd gen_lowrank(Eigen::Index m, Eigen::Index n, Eigen::Index r, Rng& rng);

/// Best rank-r approximation.
Eigen::MatrixXd truncate_svd(const Eigen::MatrixXd& m, Eigen::Index r);

/// Piecewise-constant test image in [0, 1] built from rectangles whose edges
/// sit on a coarse dyadic grid, so its full-depth Haar transform is sparse.
Eigen::MatrixXd gen_phantom(Eigen::Index side);

/// Three-channel version, one column per channel (pixels vectorized
/// column-major). Adds smooth ramps, so its DCT is compressible rather than
/// sparse.
Eigen::MatrixXd gen_color_phantom(Eigen::Index side);

/// n-vector whose k-th largest magnitude is exp(-k / (decay n)), at uniformly
/// permuted positions with random signs.
Eigen::VectorXd gen_compressible(Eigen::Index n, double decay, Rng& rng);

/// n x k matrix with orthonormal columns, uniformly distributed.
Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k, Rng& rng);

/// U diag(s) V^T with random orthonormal U, V and s_i = exp(-i / (decay r)),
/// r = min(m, n).
Eigen::MatrixXd gen_decaying_spectrum(Eigen::Index m, Eigen::Index n, double decay, Rng& rng);

/// Each entry observed independently with probability p.
ObservationMask gen_bernoulli_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng);

/// Sparse outliers: each entry is hit with probability `fraction` and set to
/// +-magnitude * U[0.5, 1].
Eigen::MatrixXd gen_gross_corruption(Eigen::Index rows, Eigen::Index cols, double fraction,
                                     double magnitude, Rng& rng);

/// Sets each pixel (row) with probability `fraction` to 0 or 1 in every
/// channel.
Eigen::MatrixXd salt_and_pepper(const Eigen::MatrixXd& pixels, double fraction, Rng& rng);

/// Peak 1; +inf is capped at 300 dB.
double psnr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat);
/// 20 log10(|xhat - x| / |x|), floored at -300 dB. Throws on x = 0.
double rel_err_db(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat);
/// |Sigmahat - Sigma|_2 / |Sigma|_2.
double spectral_rel_err(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& sigmahat);
/// F1 score of the patterns {|x_i| > tol} and {|xhat_i| > tol}; 1 when both
/// are empty.
double support_f1(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat, double tol = 1e-6);

inline constexpr double kDbCap = 300.0;

}  // namespace ncvx
