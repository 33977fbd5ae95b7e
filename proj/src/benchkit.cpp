#include "ncvx/benchkit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "ncvx/errors.hpp"

namespace ncvx {

namespace {

Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

template <typename M>
M add_noise_impl(const M& x, double snr_db, Rng& rng) {
  if (std::isnan(snr_db)) throw InvalidArgument("snr_db is NaN");
  if (snr_db == std::numeric_limits<double>::infinity()) return x;
  const double signal = x.squaredNorm();
  if (signal == 0.0) throw InvalidArgument("cannot set an SNR for a zero signal");
  M noise = normal_matrix(x.rows(), x.cols(), rng);
  const double target = signal / std::pow(10.0, snr_db / 10.0);
  noise *= std::sqrt(target / noise.squaredNorm());
  return x + noise;
}

}  // namespace

Eigen::VectorXd gen_sparse_vector(Eigen::Index n, Eigen::Index k, Rng& rng) {
  if (n < 0 || k < 0 || k > n) throw InvalidArgument("gen_sparse_vector: need 0 <= K <= n");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    x(idx[static_cast<std::size_t>(i)]) = v;
  }
  return x;
}

Eigen::VectorXd add_noise_snr(const Eigen::VectorXd& x, double snr_db, Rng& rng) {
  return add_noise_impl(x, snr_db, rng);
}

Eigen::MatrixXd add_noise_snr(const Eigen::MatrixXd& x, double snr_db, Rng& rng) {
  return add_noise_impl(x, snr_db, rng);
}

double measured_snr_db(const Eigen::VectorXd& x, const Eigen::VectorXd& noisy) {
  return 10.0 * std::log10(x.squaredNorm() / (noisy - x).squaredNorm());
}

Eigen::VectorXd gen_sas_noise(double alpha, double gamma, Eigen::Index n, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("alpha must be in (0, 2]");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
  if (n < 0) throw InvalidArgument("negative length");
  constexpr double pi = std::numbers::pi;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = pi * (rng.uniform_open() - 0.5);
    if (alpha == 1.0) {
      out(i) = gamma * std::tan(v);
      continue;
    }
    const double w = rng.exponential();
    const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
    out(i) = gamma * x;
  }
  return out;
}

Eigen::MatrixXd gen_cov_model(CovKind kind, Eigen::Index d, const CovParams& params) {
  if (d < 2) throw InvalidArgument("gen_cov_model: d must be >= 2");
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(d, d);
  if (kind == CovKind::Block) {
    if (params.block_size < 1) throw InvalidArgument("block size must be >= 1");
    if (!(params.block_rho >= 0.0 && params.block_rho < 1.0)) {
      throw InvalidArgument("block correlation must be in [0, 1)");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i != j && i / params.block_size == j / params.block_size) s(i, j) = params.block_rho;
      }
    }
  } else {
    if (params.bandwidth < 0) throw InvalidArgument("bandwidth must be >= 0");
    const double width = static_cast<double>(params.bandwidth + 1);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        s(i, j) = std::max(1.0 - static_cast<double>(std::abs(i - j)) / width, 0.0);
      }
    }
  }
  return s;
}

Eigen::MatrixXd gen_gaussian_samples(const Eigen::MatrixXd& sigma, Eigen::Index n, Rng& rng) {
  if (sigma.rows() != sigma.cols()) throw DimensionMismatch("Sigma is not square");
  if (n < 1) throw InvalidArgument("need at least one sample");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw InvalidArgument("Sigma is not positive definite");
  const Eigen::Index d = sigma.rows();
  Eigen::MatrixXd z(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.normal();
  }
  return z * llt.matrixL().transpose();
}

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw InvalidArgument("need at least two samples");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  if ((sd.array() <= 0.0).any()) throw InvalidArgument("a variable has zero variance");
  const Eigen::VectorXd inv = sd.cwiseInverse();
  Eigen::MatrixXd r = inv.asDiagonal() * cov * inv.asDiagonal();
  r = (0.5 * (r + r.transpose())).eval();
  r.diagonal().setOnes();
  return r;
}

Eigen::MatrixXd gen_lowrank(Eigen::Index m, Eigen::Index n, Eigen::Index r, Rng& rng) {
  if (m < 1 || n < 1 || r < 0 || r > std::min(m, n)) {
    throw InvalidArgument("gen_lowrank: need 0 <= r <= min(m, n)");
  }
  const Eigen::MatrixXd u = normal_matrix(m, r, rng);
  const Eigen::MatrixXd v = normal_matrix(r, n, rng);
  return u * v;
}

Eigen::MatrixXd truncate_svd(const Eigen::MatrixXd& m, Eigen::Index r) {
  if (r < 0 || r > std::min(m.rows(), m.cols())) throw InvalidArgument("rank out of range");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
         svd.matrixV().leftCols(r).transpose();
}

Eigen::MatrixXd gen_phantom(Eigen::Index side) {
  if (side < 16) throw InvalidArgument("phantom side must be >= 16");
  struct Rect {
    int r0, r1, c0, c1;
    double value;
  };
  // Coordinates in units of side / 16.
  static constexpr Rect kRects[] = {
      {2, 14, 3, 13, 0.6},  {3, 13, 4, 12, -0.3}, {5, 8, 5, 7, 0.5},
      {5, 8, 9, 11, 0.5},   {9, 12, 7, 9, 0.2},   {10, 11, 5, 6, 0.7},
  };
  Eigen::MatrixXd img = Eigen::MatrixXd::Zero(side, side);
  auto edge = [side](int units) { return static_cast<Eigen::Index>(units) * side / 16; };
  for (const Rect& rect : kRects) {
    img.block(edge(rect.r0), edge(rect.c0), edge(rect.r1) - edge(rect.r0),
              edge(rect.c1) - edge(rect.c0))
        .array() += rect.value;
  }
  return img.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::MatrixXd gen_color_phantom(Eigen::Index side) {
  const Eigen::MatrixXd base = gen_phantom(side);
  Eigen::MatrixXd ramp(side, side);
  for (Eigen::Index j = 0; j < side; ++j) {
    for (Eigen::Index i = 0; i < side; ++i) {
      ramp(i, j) = static_cast<double>(i + j) / static_cast<double>(2 * side);
    }
  }
  Eigen::MatrixXd out(side * side, 3);
  out.col(0) = base.reshaped();
  out.col(1) = (0.6 * base + 0.4 * ramp).reshaped();
  out.col(2) = (0.9 - 0.6 * base.array() - 0.3 * ramp.array()).cwiseMax(0.0).cwiseMin(1.0).matrix().reshaped();
  return out;
}

Eigen::VectorXd gen_compressible(Eigen::Index n, double decay, Rng& rng) {
  if (n < 1) throw InvalidArgument("gen_compressible: n must be positive");
  if (!(decay > 0.0) || !std::isfinite(decay)) throw InvalidArgument("decay must be positive");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Eigen::VectorXd x(n);
  const double scale = decay * static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x(idx[static_cast<std::size_t>(i)]) = sign * std::exp(-static_cast<double>(i) / scale);
  }
  return x;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k, Rng& rng) {
  if (k < 0 || k > n) throw InvalidArgument("random_orthonormal: need 0 <= k <= n");
  const Eigen::MatrixXd g = normal_matrix(n, k, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  // Sign fix so the distribution is uniform on the Stiefel manifold.
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Eigen::MatrixXd gen_decaying_spectrum(Eigen::Index m, Eigen::Index n, double decay, Rng& rng) {
  if (m < 1 || n < 1) throw InvalidArgument("gen_decaying_spectrum: empty shape");
  if (!(decay > 0.0) || !std::isfinite(decay)) throw InvalidArgument("decay must be positive");
  const Eigen::Index r = std::min(m, n);
  const Eigen::MatrixXd u = random_orthonormal(m, r, rng);
  const Eigen::MatrixXd v = random_orthonormal(n, r, rng);
  Eigen::VectorXd s(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    s(i) = std::exp(-static_cast<double>(i) / (decay * static_cast<double>(r)));
  }
  return u * s.asDiagonal() * v.transpose();
}

ObservationMask gen_bernoulli_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("observation probability must be in [0, 1]");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (rng.uniform() < p) entries.emplace_back(i, j);
    }
  }
  return ObservationMask(rows, cols, entries);
}

Eigen::MatrixXd gen_gross_corruption(Eigen::Index rows, Eigen::Index cols, double fraction,
                                     double magnitude, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("corruption fraction must be in [0, 1]");
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) throw InvalidArgument("bad corruption magnitude");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (rng.uniform() >= fraction) continue;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    s(i) = sign * magnitude * (0.5 + 0.5 * rng.uniform());
  }
  return s;
}

Eigen::MatrixXd salt_and_pepper(const Eigen::MatrixXd& pixels, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("corruption fraction must be in [0, 1]");
  Eigen::MatrixXd out = pixels;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (rng.uniform() >= fraction) continue;
    out.row(i).setConstant(rng.uniform() < 0.5 ? 0.0 : 1.0);
  }
  return out;
}

double psnr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) throw DimensionMismatch("psnr shapes");
  if (x.size() == 0) throw InvalidArgument("psnr of an empty image");
  const double mse = (x - xhat).squaredNorm() / static_cast<double>(x.size());
  if (mse == 0.0) return kDbCap;
  return std::min(kDbCap, -10.0 * std::log10(mse));
}

double rel_err_db(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw DimensionMismatch("rel_err_db shapes");
  }
  const double ref = x.norm();
  if (ref == 0.0) throw InvalidArgument("relative error against a zero reference");
  const double err = (xhat - x).norm();
  if (err == 0.0) return -kDbCap;
  return std::max(-kDbCap, 20.0 * std::log10(err / ref));
}

double spectral_rel_err(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& sigmahat) {
  if (sigma.rows() != sigmahat.rows() || sigma.cols() != sigmahat.cols()) {
    throw DimensionMismatch("spectral_rel_err shapes");
  }
  auto spectral = [](const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues()(0);
  };
  const double ref = spectral(sigma);
  if (ref == 0.0) throw InvalidArgument("relative error against a zero reference");
  return spectral(sigmahat - sigma) / ref;
}

double support_f1(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat, double tol) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) throw DimensionMismatch("support shapes");
  const auto a = (x.array().abs() > tol);
  const auto b = (xhat.array().abs() > tol);
  const double both = static_cast<double>((a && b).count());
  const double na = static_cast<double>(a.count());
  const double nb = static_cast<double>(b.count());
  if (na + nb == 0.0) return 1.0;
  return 2.0 * both / (na + nb);
}

}  // namespace ncvx
