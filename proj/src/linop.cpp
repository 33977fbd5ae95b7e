#include "ncvx/linop.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "ncvx/errors.hpp"
#include "ncvx/format.hpp"
#include "ncvx/kernels.hpp"
#include "ncvx/rng.hpp"

namespace ncvx {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// ObservationMask

ObservationMask::ObservationMask(Index rows, Index cols,
                                 const std::vector<std::pair<Index, Index>>& entries)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw InvalidArgument("mask: negative dimensions");
  linear_.reserve(entries.size());
  for (const auto& [i, j] : entries) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw InvalidArgument("mask: index (" + std::to_string(i) + "," + std::to_string(j) +
                            ") out of bounds");
    }
    linear_.push_back(i + j * rows);
  }
  std::sort(linear_.begin(), linear_.end());
  if (std::adjacent_find(linear_.begin(), linear_.end()) != linear_.end()) {
    throw InvalidArgument("mask: duplicate index");
  }
}

ObservationMask ObservationMask::full(Index rows, Index cols) {
  ObservationMask m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.linear_.resize(static_cast<std::size_t>(rows * cols));
  std::iota(m.linear_.begin(), m.linear_.end(), Index{0});
  return m;
}

std::vector<std::pair<Index, Index>> ObservationMask::entries() const {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(linear_.size());
  for (Index k : linear_) out.emplace_back(k % rows_, k / rows_);
  return out;
}

MatrixXd ObservationMask::project(const MatrixXd& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) throw DimensionMismatch("mask: matrix shape");
  MatrixXd out = MatrixXd::Zero(rows_, cols_);
  for (Index k : linear_) out.data()[k] = x.data()[k];
  return out;
}

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw InvalidArgument("LinearOperator: null implementation");
}

VectorXd LinearOperator::apply(const VectorXd& x) const {
  if (x.size() != in_dim()) {
    throw DimensionMismatch("operator: input has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(in_dim()));
  }
  VectorXd y(out_dim());
  impl_->forward(x, y);
  return y;
}

VectorXd LinearOperator::apply_adjoint(const VectorXd& u) const {
  if (u.size() != out_dim()) {
    throw DimensionMismatch("operator adjoint: input has length " + std::to_string(u.size()) +
                            ", expected " + std::to_string(out_dim()));
  }
  VectorXd x(in_dim());
  impl_->adjoint(u, x);
  return x;
}

MatrixXd LinearOperator::apply_columns(const MatrixXd& x) const {
  if (x.rows() != in_dim()) throw DimensionMismatch("operator: column length mismatch");
  MatrixXd y(out_dim(), x.cols());
  VectorXd col, out(out_dim());
  for (Index j = 0; j < x.cols(); ++j) {
    col = x.col(j);
    impl_->forward(col, out);
    y.col(j) = out;
  }
  return y;
}

MatrixXd LinearOperator::apply_adjoint_columns(const MatrixXd& u) const {
  if (u.rows() != out_dim()) throw DimensionMismatch("operator adjoint: column length mismatch");
  MatrixXd x(in_dim(), u.cols());
  VectorXd col, out(in_dim());
  for (Index j = 0; j < u.cols(); ++j) {
    col = u.col(j);
    impl_->adjoint(col, out);
    x.col(j) = out;
  }
  return x;
}

MatrixXd LinearOperator::to_dense() const {
  MatrixXd m(out_dim(), in_dim());
  VectorXd e = VectorXd::Zero(in_dim());
  VectorXd col(out_dim());
  for (Index j = 0; j < in_dim(); ++j) {
    e(j) = 1.0;
    impl_->forward(e, col);
    m.col(j) = col;
    e(j) = 0.0;
  }
  return m;
}

namespace {

class DenseImpl final : public LinearOperator::Impl {
 public:
  explicit DenseImpl(const MatrixXd& m) : a_(m), at_(m.transpose()) {}
  Index in_dim() const override { return a_.cols(); }
  Index out_dim() const override { return a_.rows(); }
  void forward(const VectorXd& x, VectorXd& y) const override {
    kernels::parallel::gemv(a_, {x.data(), static_cast<std::size_t>(x.size())},
                            {y.data(), static_cast<std::size_t>(y.size())});
  }
  void adjoint(const VectorXd& u, VectorXd& x) const override {
    kernels::parallel::gemv(at_, {u.data(), static_cast<std::size_t>(u.size())},
                            {x.data(), static_cast<std::size_t>(x.size())});
  }

 private:
  kernels::RowMatrix a_;
  kernels::RowMatrix at_;
};

class Dct2dImpl final : public LinearOperator::Impl {
 public:
  Dct2dImpl(Index side, std::vector<Index> rows)
      : side_(side), d_(dct_matrix(side)), rows_(std::move(rows)) {}
  Index in_dim() const override { return side_ * side_; }
  Index out_dim() const override { return static_cast<Index>(rows_.size()); }
  void forward(const VectorXd& x, VectorXd& y) const override {
    const Eigen::Map<const MatrixXd> img(x.data(), side_, side_);
    const MatrixXd c = d_ * img * d_.transpose();
    for (std::size_t k = 0; k < rows_.size(); ++k) y(static_cast<Index>(k)) = c.data()[rows_[k]];
  }
  void adjoint(const VectorXd& u, VectorXd& x) const override {
    MatrixXd c = MatrixXd::Zero(side_, side_);
    for (std::size_t k = 0; k < rows_.size(); ++k) c.data()[rows_[k]] = u(static_cast<Index>(k));
    Eigen::Map<MatrixXd> img(x.data(), side_, side_);
    img.noalias() = d_.transpose() * c * d_;
  }

 private:
  Index side_;
  MatrixXd d_;
  std::vector<Index> rows_;
};

constexpr double kInvSqrt2 = 0.70710678118654752440;

// One orthonormal Haar step on n = 2h strided samples: averages to the
// first half, details to the second.
void haar_step(double* base, Index stride, Index n, double* scratch) {
  const Index h = n / 2;
  for (Index k = 0; k < h; ++k) {
    const double a = base[(2 * k) * stride];
    const double b = base[(2 * k + 1) * stride];
    scratch[k] = (a + b) * kInvSqrt2;
    scratch[h + k] = (a - b) * kInvSqrt2;
  }
  for (Index k = 0; k < n; ++k) base[k * stride] = scratch[k];
}

void haar_step_inverse(double* base, Index stride, Index n, double* scratch) {
  const Index h = n / 2;
  for (Index k = 0; k < h; ++k) {
    const double a = base[k * stride];
    const double d = base[(h + k) * stride];
    scratch[2 * k] = (a + d) * kInvSqrt2;
    scratch[2 * k + 1] = (a - d) * kInvSqrt2;
  }
  for (Index k = 0; k < n; ++k) base[k * stride] = scratch[k];
}

class Haar2dImpl final : public LinearOperator::Impl {
 public:
  explicit Haar2dImpl(Index side) : side_(side) {}
  Index in_dim() const override { return side_ * side_; }
  Index out_dim() const override { return side_ * side_; }

  // Synthesis: coefficients -> image.
  void forward(const VectorXd& x, VectorXd& y) const override {
    y = x;
    std::vector<double> scratch(static_cast<std::size_t>(side_));
    double* m = y.data();
    for (Index s = 2; s <= side_; s *= 2) {
      for (Index i = 0; i < s; ++i) haar_step_inverse(m + i, side_, s, scratch.data());
      for (Index j = 0; j < s; ++j) haar_step_inverse(m + j * side_, 1, s, scratch.data());
    }
  }

  // Analysis: image -> coefficients.
  void adjoint(const VectorXd& u, VectorXd& x) const override {
    x = u;
    std::vector<double> scratch(static_cast<std::size_t>(side_));
    double* m = x.data();
    for (Index s = side_; s >= 2; s /= 2) {
      for (Index j = 0; j < s; ++j) haar_step(m + j * side_, 1, s, scratch.data());
      for (Index i = 0; i < s; ++i) haar_step(m + i, side_, s, scratch.data());
    }
  }

 private:
  Index side_;
};

class MaskImpl final : public LinearOperator::Impl {
 public:
  explicit MaskImpl(ObservationMask omega) : omega_(std::move(omega)) {}
  Index in_dim() const override { return omega_.rows() * omega_.cols(); }
  Index out_dim() const override { return in_dim(); }
  void forward(const VectorXd& x, VectorXd& y) const override {
    y.setZero();
    for (Index k : omega_.linear_indices()) y(k) = x(k);
  }
  void adjoint(const VectorXd& u, VectorXd& x) const override { forward(u, x); }

 private:
  ObservationMask omega_;
};

class IdentityImpl final : public LinearOperator::Impl {
 public:
  explicit IdentityImpl(Index n) : n_(n) {}
  Index in_dim() const override { return n_; }
  Index out_dim() const override { return n_; }
  void forward(const VectorXd& x, VectorXd& y) const override { y = x; }
  void adjoint(const VectorXd& u, VectorXd& x) const override { x = u; }

 private:
  Index n_;
};

class HStackImpl final : public LinearOperator::Impl {
 public:
  HStackImpl(LinearOperator a1, LinearOperator a2) : a1_(std::move(a1)), a2_(std::move(a2)) {}
  Index in_dim() const override { return a1_.in_dim() + a2_.in_dim(); }
  Index out_dim() const override { return a1_.out_dim(); }
  void forward(const VectorXd& x, VectorXd& y) const override {
    y = a1_.apply(x.head(a1_.in_dim())) + a2_.apply(x.tail(a2_.in_dim()));
  }
  void adjoint(const VectorXd& u, VectorXd& x) const override {
    x.head(a1_.in_dim()) = a1_.apply_adjoint(u);
    x.tail(a2_.in_dim()) = a2_.apply_adjoint(u);
  }

 private:
  LinearOperator a1_;
  LinearOperator a2_;
};

class ComposeImpl final : public LinearOperator::Impl {
 public:
  ComposeImpl(LinearOperator a, LinearOperator b) : a_(std::move(a)), b_(std::move(b)) {}
  Index in_dim() const override { return b_.in_dim(); }
  Index out_dim() const override { return a_.out_dim(); }
  void forward(const VectorXd& x, VectorXd& y) const override { y = a_.apply(b_.apply(x)); }
  void adjoint(const VectorXd& u, VectorXd& x) const override {
    x = b_.apply_adjoint(a_.apply_adjoint(u));
  }

 private:
  LinearOperator a_;
  LinearOperator b_;
};

class AdjointImpl final : public LinearOperator::Impl {
 public:
  explicit AdjointImpl(LinearOperator a) : a_(std::move(a)) {}
  Index in_dim() const override { return a_.out_dim(); }
  Index out_dim() const override { return a_.in_dim(); }
  void forward(const VectorXd& x, VectorXd& y) const override { y = a_.apply_adjoint(x); }
  void adjoint(const VectorXd& u, VectorXd& x) const override { x = a_.apply(u); }

 private:
  LinearOperator a_;
};

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

LinearOperator make_dense(const MatrixXd& m) {
  if (!m.allFinite()) throw InvalidArgument("make_dense: matrix has non-finite entries");
  return LinearOperator(std::make_shared<DenseImpl>(m));
}

MatrixXd dct_matrix(Index n) {
  MatrixXd c(n, n);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double s1 = std::sqrt(2.0 / static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < n; ++j) {
      c(k, j) = (k == 0 ? s0 : s1) *
                std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) /
                         (2.0 * static_cast<double>(n)));
    }
  }
  return c;
}

std::vector<Index> partial_dct_rows(Index n, Index m, std::uint64_t seed) {
  if (n <= 0) throw InvalidArgument("partial DCT: n must be positive");
  if (m < 0 || m > n) throw InvalidArgument("partial DCT: requires 0 <= m <= n");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed, 0xDC7);
  for (Index i = 0; i < m; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> rows(perm.begin(), perm.begin() + m);
  std::sort(rows.begin(), rows.end());
  return rows;
}

LinearOperator make_partial_dct(Index n, Index m, std::uint64_t seed) {
  const std::vector<Index> rows = partial_dct_rows(n, m, seed);
  const MatrixXd full = dct_matrix(n);
  MatrixXd sel(m, n);
  for (Index k = 0; k < m; ++k) sel.row(k) = full.row(rows[static_cast<std::size_t>(k)]);
  return make_dense(sel);
}

std::vector<Index> partial_dct2d_rows(Index side, Index m, std::uint64_t seed, Index low_freq) {
  if (side <= 0) throw InvalidArgument("partial 2-D DCT: side must be positive");
  if (low_freq < 0 || low_freq > side) throw InvalidArgument("partial 2-D DCT: bad low_freq");
  const Index n = side * side;
  const Index fixed = low_freq * low_freq;
  if (m < fixed || m > n) {
    throw InvalidArgument("partial 2-D DCT: requires low_freq^2 <= m <= side^2");
  }
  std::vector<Index> rows;
  std::vector<Index> pool;
  for (Index idx = 0; idx < n; ++idx) {
    const bool low = idx % side < low_freq && idx / side < low_freq;
    (low ? rows : pool).push_back(idx);
  }
  Rng rng(seed, 0xDC7);
  const Index draw = m - fixed;
  const auto size = static_cast<Index>(pool.size());
  for (Index i = 0; i < draw; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(size - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  rows.insert(rows.end(), pool.begin(), pool.begin() + draw);
  std::sort(rows.begin(), rows.end());
  return rows;
}

LinearOperator make_partial_dct2d(Index side, Index m, std::uint64_t seed, Index low_freq) {
  return LinearOperator(
      std::make_shared<Dct2dImpl>(side, partial_dct2d_rows(side, m, seed, low_freq)));
}

LinearOperator make_haar2d(Index side) {
  if (!is_power_of_two(side)) throw InvalidArgument("Haar transform: side must be a power of two");
  return LinearOperator(std::make_shared<Haar2dImpl>(side));
}

LinearOperator make_mask(Index rows, Index cols, const ObservationMask& omega) {
  if (omega.rows() != rows || omega.cols() != cols) {
    throw DimensionMismatch("make_mask: mask shape does not match dims");
  }
  return LinearOperator(std::make_shared<MaskImpl>(omega));
}

LinearOperator make_identity(Index n) {
  if (n <= 0) throw InvalidArgument("identity: dimension must be positive");
  return LinearOperator(std::make_shared<IdentityImpl>(n));
}

LinearOperator hstack(const LinearOperator& a1, const LinearOperator& a2) {
  if (a1.out_dim() != a2.out_dim()) {
    throw DimensionMismatch("hstack: operators have different output dimensions");
  }
  return LinearOperator(std::make_shared<HStackImpl>(a1, a2));
}

LinearOperator compose(const LinearOperator& a, const LinearOperator& b) {
  if (a.in_dim() != b.out_dim()) throw DimensionMismatch("compose: inner dimensions differ");
  return LinearOperator(std::make_shared<ComposeImpl>(a, b));
}

LinearOperator adjoint(const LinearOperator& a) {
  return LinearOperator(std::make_shared<AdjointImpl>(a));
}

NormEstimate op_norm_sq(const LinearOperator& a, double tol, int max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("op_norm_sq: tol must be positive");
  Rng rng(0x5EEDULL, 0x90);
  VectorXd v(a.in_dim());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  v.normalize();
  NormEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const VectorXd av = a.apply(v);
    const VectorXd w = a.apply_adjoint(av);
    const double rayleigh = av.squaredNorm();
    est.iterations = it;
    est.value = rayleigh;
    const double wn = w.norm();
    if (wn == 0.0) {
      est.value = 0.0;
      est.converged = true;
      return est;
    }
    if (it > 1 && std::abs(rayleigh - prev) <= tol * rayleigh) {
      est.converged = true;
      return est;
    }
    prev = rayleigh;
    v = w / wn;
  }
  return est;
}

void write_matrix_csv(std::ostream& out, const MatrixXd& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    fields.push_back(f);
  }
  return fields;
}

}  // namespace

MatrixXd read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("matrix csv: missing header");
  const auto header = split_csv(line);
  if (header.size() != 2) throw InvalidArgument("matrix csv: header must be 'rows,cols'");
  const auto rows = static_cast<Index>(parse_int(header[0], "rows"));
  const auto cols = static_cast<Index>(parse_int(header[1], "cols"));
  if (rows < 0 || cols < 0) throw InvalidArgument("matrix csv: negative dimensions");
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw InvalidArgument("matrix csv: expected " + std::to_string(rows) + " rows");
    }
    const auto fields = split_csv(line);
    if (static_cast<Index>(fields.size()) != cols) {
      throw InvalidArgument("matrix csv: row " + std::to_string(i + 1) + " has " +
                            std::to_string(fields.size()) + " fields");
    }
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(fields[static_cast<std::size_t>(j)], "entry");
  }
  return m;
}

void write_mask(std::ostream& out, const ObservationMask& mask) {
  for (const auto& [i, j] : mask.entries()) out << i << ',' << j << '\n';
}

ObservationMask read_mask(std::istream& in, Index rows, Index cols) {
  std::vector<std::pair<Index, Index>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw InvalidArgument("mask: line " + std::to_string(lineno) + " must be 'i,j'");
    }
    entries.emplace_back(static_cast<Index>(parse_int(fields[0], "i")),
                         static_cast<Index>(parse_int(fields[1], "j")));
  }
  return ObservationMask(rows, cols, entries);
}

}  // namespace ncvx
