#include <cmath>
#include <fstream>
#include <ostream>

#include "instance.hpp"
#include "ncvx/benchkit.hpp"
#include "ncvx/imageio.hpp"
#include "ncvx/proxext.hpp"
#include "ncvx/solvers.hpp"

namespace ncvx::detail {

namespace {

// Stream ids under each trial seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSupportStream = 3;
constexpr std::uint64_t kImpulseStream = 4;

void check(const SolverReport& r, const char* what) {
  if (r.diverged) throw NumericalError(std::string(what) + ": iterates became non-finite");
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(rows));
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = s * rng.normal();
  }
  return g;
}

Eigen::Index sparsity_count(double fraction, Eigen::Index n) {
  return std::max<Eigen::Index>(1, std::llround(fraction * static_cast<double>(n)));
}

Eigen::VectorXd noisy(const Eigen::VectorXd& x, double snr_db, std::uint64_t seed) {
  Rng rng(seed, kNoiseStream);
  return add_noise_snr(x, snr_db, rng);
}

Eigen::MatrixXd noisy(const Eigen::MatrixXd& x, double snr_db, std::uint64_t seed) {
  Rng rng(seed, kNoiseStream);
  return add_noise_snr(x, snr_db, rng);
}

Eigen::VectorXd init_vector(const Estimate* init, Eigen::Index n) {
  return init ? Eigen::VectorXd(init->a.reshaped()) : Eigen::VectorXd::Zero(n);
}

double max_row_norm(const Eigen::MatrixXd& m) { return m.rowwise().norm().maxCoeff(); }

bool power_of_two(Eigen::Index v) { return v > 0 && (v & (v - 1)) == 0; }

// Compressed sensing in a Haar basis from partial 2-D DCT measurements.
class CsInstance : public Instance {
 public:
  CsInstance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db)
      : algorithm_(cfg.algorithm), opts_(cfg.solver), image_metric_(cfg.model == "phantom") {
    Eigen::Index side = cfg.side;
    if (image_metric_) {
      if (cfg.image.empty()) {
        image_ = gen_phantom(side);
      } else {
        std::ifstream in(cfg.image);
        if (!in) throw ConfigError(0, "image", "cannot open '" + cfg.image + "'");
        image_ = read_pgm(in);
        side = image_.rows();
        if (image_.cols() != side || !power_of_two(side) || side < 16) {
          throw ConfigError(0, "image", "must be square with a power-of-two side >= 16");
        }
      }
    }
    side_ = side;
    haar_ = std::make_shared<LinearOperator>(make_haar2d(side));
    if (image_metric_) {
      truth_ = haar_->apply_adjoint(image_.reshaped());
    } else {
      Rng rng(seed, kDataStream);
      truth_ = gen_compressible(side * side, cfg.decay, rng);
    }
    const auto m = static_cast<Eigen::Index>(
        std::llround(cfg.measurement_ratio * static_cast<double>(side * side)));
    a_ = std::make_shared<LinearOperator>(
        compose(make_partial_dct2d(side, m, seed, std::min<Eigen::Index>(cfg.low_freq, side)), *haar_));
    y_ = noisy(a_->apply(truth_), snr_db, seed);
    scale_ = a_->apply_adjoint(y_).cwiseAbs().maxCoeff();
  }

  CellResult solve(const Penalty& p, const Penalty&, double factor, const Estimate* init) const override {
    const Penalty pen = with_zero_threshold(p, factor * scale_);
    VectorSolution sol = algorithm_ == "admm" ? admm_sparse(*a_, y_, pen, opts_, init_vector(init, truth_.size()))
                                              : pgd_sparse(*a_, y_, pen, opts_, init_vector(init, truth_.size()));
    check(sol.report, "cs");
    CellResult r;
    r.metric = image_metric_ ? psnr(image_.reshaped(), haar_->apply(sol.x)) : rel_err_db(truth_, sol.x);
    r.iterations = sol.report.iterations;
    r.est.a = std::move(sol.x);
    return r;
  }

  bool has_image() const override { return image_metric_; }
  std::string write_image(const Estimate& e, std::ostream& out) const override {
    const Eigen::VectorXd pixels = haar_->apply(e.a.reshaped());
    write_pgm(out, pixels.reshaped(side_, side_));
    return "pgm";
  }

 private:
  std::string algorithm_;
  SolverOptions opts_;
  bool image_metric_;
  Eigen::Index side_ = 0;
  Eigen::MatrixXd image_;
  Eigen::VectorXd truth_;
  std::shared_ptr<LinearOperator> haar_;
  std::shared_ptr<LinearOperator> a_;
  Eigen::VectorXd y_;
  double scale_ = 1.0;
};

// Sparse linear regression with a Gaussian design.
class RegressInstance : public Instance {
 public:
  RegressInstance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db, double sparsity)
      : algorithm_(cfg.algorithm), opts_(cfg.solver), a_(make_identity(1)) {
    Rng data(seed, kDataStream);
    a_ = make_dense(gaussian(cfg.m, cfg.n, data));
    Rng support(seed, kSupportStream);
    truth_ = gen_sparse_vector(cfg.n, sparsity_count(sparsity, cfg.n), support);
    y_ = noisy(a_.apply(truth_), snr_db, seed);
    scale_ = a_.apply_adjoint(y_).cwiseAbs().maxCoeff();
  }

  CellResult solve(const Penalty& p, const Penalty&, double factor, const Estimate* init) const override {
    const Penalty pen = with_zero_threshold(p, factor * scale_);
    VectorSolution sol = algorithm_ == "admm" ? admm_sparse(a_, y_, pen, opts_, init_vector(init, truth_.size()))
                                              : pgd_sparse(a_, y_, pen, opts_, init_vector(init, truth_.size()));
    check(sol.report, "regress");
    CellResult r;
    r.metric = rel_err_db(truth_, sol.x);
    r.iterations = sol.report.iterations;
    r.est.a = std::move(sol.x);
    return r;
  }

 private:
  std::string algorithm_;
  SolverOptions opts_;
  LinearOperator a_;
  Eigen::VectorXd truth_;
  Eigen::VectorXd y_;
  double scale_ = 1.0;
};

// y = A1 x1 + A2 x2: sparse signal plus impulsive noise (A2 = I), or two
// sparse components in a DCT and a Gaussian dictionary.
class SeparateInstance : public Instance {
 public:
  SeparateInstance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db, double sparsity)
      : opts_(cfg.solver), mu_(cfg.mu), beta_(cfg.beta), a1_(make_identity(1)), a2_(make_identity(1)) {
    Rng data(seed, kDataStream);
    Rng support(seed, kSupportStream);
    const Eigen::Index k = sparsity_count(sparsity, cfg.n);
    if (cfg.model == "impulsive") {
      a1_ = make_dense(gaussian(cfg.m, cfg.n, data));
      a2_ = make_identity(cfg.m);
      x1_ = gen_sparse_vector(cfg.n, k, support);
      Rng impulses(seed, kImpulseStream);
      x2_ = gen_sas_noise(cfg.sas_alpha, cfg.sas_gamma, cfg.m, impulses);
      joint_metric_ = false;
    } else {
      a1_ = make_dense(dct_matrix(cfg.n).transpose());
      a2_ = make_dense(gaussian(cfg.n, cfg.n, data));
      x1_ = gen_sparse_vector(cfg.n, k, support);
      x2_ = gen_sparse_vector(cfg.n, k, support);
      joint_metric_ = true;
    }
    y_ = noisy(Eigen::VectorXd(a1_.apply(x1_) + a2_.apply(x2_)), snr_db, seed);
    scale1_ = a1_.apply_adjoint(y_).cwiseAbs().maxCoeff();
    scale2_ = cfg.lambda2 * a2_.apply_adjoint(y_).cwiseAbs().maxCoeff();
  }

  CellResult solve(const Penalty& p, const Penalty& p2, double factor, const Estimate* init) const override {
    const Penalty g1 = with_zero_threshold(p, factor * scale1_);
    const Penalty g2 = with_zero_threshold(p2, factor * scale2_);
    SeparationSolution sol =
        init ? bcd_separation(a1_, a2_, y_, g1, g2, mu_, beta_, opts_, init->a.reshaped(), init->b.reshaped())
             : bcd_separation(a1_, a2_, y_, g1, g2, mu_, beta_, opts_);
    check(sol.report, "separate");
    CellResult r;
    if (joint_metric_) {
      Eigen::VectorXd truth(x1_.size() + x2_.size()), est(truth.size());
      truth << x1_, x2_;
      est << sol.x1, sol.x2;
      r.metric = rel_err_db(truth, est);
    } else {
      r.metric = rel_err_db(x1_, sol.x1);
    }
    r.iterations = sol.report.iterations;
    r.est.a = std::move(sol.x1);
    r.est.b = std::move(sol.x2);
    return r;
  }

 private:
  SolverOptions opts_;
  double mu_, beta_;
  LinearOperator a1_, a2_;
  Eigen::VectorXd x1_, x2_, y_;
  double scale1_ = 1.0, scale2_ = 1.0;
  bool joint_metric_ = false;
};

// Color image with salt-and-pepper pixels: jointly sparse DCT coefficients
// plus row-sparse outliers, solved channel-jointly.
class InpaintInstance : public Instance {
 public:
  InpaintInstance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db)
      : opts_(cfg.solver), mu_(cfg.mu), beta_(cfg.beta), a1_(make_identity(1)), a2_(make_identity(1)) {
    if (cfg.image.empty()) {
      if (cfg.side < 16) throw ConfigError(0, "side", "the built-in image needs side >= 16");
      clean_ = {cfg.side, cfg.side, gen_color_phantom(cfg.side)};
    } else {
      std::ifstream in(cfg.image);
      if (!in) throw ConfigError(0, "image", "cannot open '" + cfg.image + "'");
      clean_ = read_ppm(in);
      if (clean_.rows != clean_.cols) throw ConfigError(0, "image", "must be square");
    }
    const Eigen::Index side = clean_.rows;
    a1_ = adjoint(make_partial_dct2d(side, side * side, seed, 0));
    a2_ = make_identity(side * side);
    Rng support(seed, kSupportStream);
    const Eigen::MatrixXd corrupted = salt_and_pepper(clean_.channels, cfg.corruption, support);
    y_ = noisy(corrupted, snr_db, seed);
    scale1_ = max_row_norm(a1_.apply_adjoint_columns(y_));
    scale2_ = cfg.lambda2 * max_row_norm(y_);
  }

  CellResult solve(const Penalty& p, const Penalty& p2, double factor, const Estimate* init) const override {
    const Penalty g1 = with_zero_threshold(p, factor * scale1_);
    const Penalty g2 = with_zero_threshold(p2, factor * scale2_);
    MultitaskSolution sol =
        init ? bcd_separation_multitask(a1_, a2_, y_, g1, g2, mu_, beta_, opts_, init->a, init->b)
             : bcd_separation_multitask(a1_, a2_, y_, g1, g2, mu_, beta_, opts_);
    check(sol.report, "inpaint");
    CellResult r;
    r.metric = psnr(clean_.channels, a1_.apply_columns(sol.x1));
    r.iterations = sol.report.iterations;
    r.est.a = std::move(sol.x1);
    r.est.b = std::move(sol.x2);
    return r;
  }

  bool has_image() const override { return true; }
  std::string write_image(const Estimate& e, std::ostream& out) const override {
    write_ppm(out, ColorImage{clean_.rows, clean_.cols, a1_.apply_columns(e.a)});
    return "ppm";
  }

 private:
  SolverOptions opts_;
  double mu_, beta_;
  ColorImage clean_;
  LinearOperator a1_, a2_;
  Eigen::MatrixXd y_;
  double scale1_ = 1.0, scale2_ = 1.0;
};

// Sparse correlation estimation from few Gaussian samples. Grid values are
// absolute thresholds since correlations are already unit-free.
class CovInstance : public Instance {
 public:
  CovInstance(const ExperimentConfig& cfg, std::uint64_t seed)
      : opts_(cfg.solver), epsilon_(cfg.epsilon), pd_(cfg.estimator == "pd") {
    CovParams params;
    params.block_size = cfg.block_size;
    params.block_rho = cfg.block_rho;
    params.bandwidth = cfg.bandwidth;
    sigma_ = gen_cov_model(cfg.model == "block" ? CovKind::Block : CovKind::Banded, cfg.d, params);
    Rng data(seed, kDataStream);
    s_ = sample_correlation(gen_gaussian_samples(sigma_, cfg.samples, data));
  }

  CellResult solve(const Penalty& p, const Penalty&, double factor, const Estimate*) const override {
    const Penalty pen = with_zero_threshold(p, factor);
    CellResult r;
    if (pd_) {
      MatrixSolution sol = cov_pd(s_, pen, epsilon_, opts_);
      check(sol.report, "cov");
      r.iterations = sol.report.iterations;
      r.est.a = std::move(sol.x);
    } else {
      r.est.a = cov_threshold(s_, pen);
    }
    r.metric = spectral_rel_err(sigma_, r.est.a);
    return r;
  }

  bool uses_init() const override { return false; }

 private:
  SolverOptions opts_;
  double epsilon_;
  bool pd_;
  Eigen::MatrixXd sigma_, s_;
};

// Matrix completion from a Bernoulli sample of noisy entries.
class CompleteInstance : public Instance {
 public:
  CompleteInstance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db) : opts_(cfg.solver) {
    Rng data(seed, kDataStream);
    truth_ = cfg.model == "lowrank" ? gen_lowrank(cfg.rows, cfg.cols, cfg.rank, data)
                                    : gen_decaying_spectrum(cfg.rows, cfg.cols, cfg.decay, data);
    Rng support(seed, kSupportStream);
    omega_ = gen_bernoulli_mask(cfg.rows, cfg.cols, cfg.observed, support);
    if (omega_.empty()) throw ConfigError(0, "observed", "no entries were observed");
    m_obs_ = omega_.project(noisy(truth_, snr_db, seed));
    scale_ = thin_svd(m_obs_).singular_values(0);
  }

  CellResult solve(const Penalty& p, const Penalty&, double factor, const Estimate* init) const override {
    const Penalty pen = with_zero_threshold(p, factor * scale_);
    MatrixSolution sol = init ? mc_pgd(omega_, m_obs_, pen, opts_, init->a) : mc_pgd(omega_, m_obs_, pen, opts_);
    check(sol.report, "complete");
    CellResult r;
    r.metric = rel_err_db(truth_, sol.x);
    r.iterations = sol.report.iterations;
    r.est.a = std::move(sol.x);
    return r;
  }

 private:
  SolverOptions opts_;
  Eigen::MatrixXd truth_;
  ObservationMask omega_;
  Eigen::MatrixXd m_obs_;
  double scale_ = 1.0;
};

// Low-rank plus gross sparse corruption. The grid sweeps the sparse block's
// threshold; the low-rank threshold is fixed relative to sigma_1(M).
class RpcaInstance : public Instance {
 public:
  RpcaInstance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db) : opts_(cfg.solver) {
    params_.mu = cfg.mu;
    Rng data(seed, kDataStream);
    l0_ = gen_lowrank(cfg.rows, cfg.cols, cfg.rank, data);
    Rng support(seed, kSupportStream);
    const Eigen::MatrixXd s0 = gen_gross_corruption(cfg.rows, cfg.cols, cfg.corruption,
                                                    cfg.corruption_scale * l0_.cwiseAbs().maxCoeff(), support);
    m_ = noisy(Eigen::MatrixXd(l0_ + s0), snr_db, seed);
    threshold1_ = cfg.rank_threshold * thin_svd(m_).singular_values(0);
    scale2_ = m_.cwiseAbs().maxCoeff();
  }

  CellResult solve(const Penalty& p, const Penalty& p2, double factor, const Estimate* init) const override {
    const Penalty g1 = with_zero_threshold(p, threshold1_);
    const Penalty g2 = with_zero_threshold(p2, factor * scale2_);
    RpcaSolution sol = init ? rpca_bcd(m_, g1, g2, params_, opts_, init->a, init->b)
                            : rpca_bcd(m_, g1, g2, params_, opts_);
    check(sol.report, "rpca");
    CellResult r;
    r.metric = rel_err_db(l0_, sol.low_rank);
    r.iterations = sol.report.iterations;
    r.est.a = std::move(sol.low_rank);
    r.est.b = std::move(sol.sparse);
    return r;
  }

 private:
  SolverOptions opts_;
  RpcaParams params_;
  Eigen::MatrixXd l0_, m_;
  double threshold1_ = 1.0, scale2_ = 1.0;
};

}  // namespace

MetricInfo metric_info(const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case Problem::Cs:
      if (cfg.model == "phantom") return {"psnr_db", true};
      return {"rel_err_db", false};
    case Problem::Inpaint: return {"psnr_db", true};
    case Problem::Cov: return {"spectral_rel_err", false};
    default: return {"rel_err_db", false};
  }
}

bool uses_snr(Problem p) { return p != Problem::Cov; }
bool uses_sparsity(Problem p) { return p == Problem::Regress || p == Problem::Separate; }

std::unique_ptr<Instance> make_instance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db,
                                        double sparsity) {
  switch (cfg.problem) {
    case Problem::Cs: return std::make_unique<CsInstance>(cfg, seed, snr_db);
    case Problem::Regress: return std::make_unique<RegressInstance>(cfg, seed, snr_db, sparsity);
    case Problem::Separate: return std::make_unique<SeparateInstance>(cfg, seed, snr_db, sparsity);
    case Problem::Inpaint: return std::make_unique<InpaintInstance>(cfg, seed, snr_db);
    case Problem::Cov: return std::make_unique<CovInstance>(cfg, seed);
    case Problem::Complete: return std::make_unique<CompleteInstance>(cfg, seed, snr_db);
    case Problem::Rpca: return std::make_unique<RpcaInstance>(cfg, seed, snr_db);
  }
  throw InvalidArgument("unknown problem");
}

}  // namespace ncvx::detail
