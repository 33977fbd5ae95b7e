#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace ncvx {

/// Set of observed entries of a rows x cols matrix. Entries are stored as
/// column-major linear indices (i + j * rows), sorted ascending.
class ObservationMask {
 public:
  ObservationMask() = default;
  /// Throws InvalidArgument on out-of-range or duplicate (i, j).
  ObservationMask(Eigen::Index rows, Eigen::Index cols,
                  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& entries);

  static ObservationMask full(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return linear_.size(); }
  bool empty() const noexcept { return linear_.empty(); }
  const std::vector<Eigen::Index>& linear_indices() const noexcept { return linear_; }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries() const;

  /// P_Omega(X): zero outside the mask.
  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Eigen::Index> linear_;
};

/// A linear map R^in_dim -> R^out_dim with its adjoint. Immutable and cheap
/// to copy; apply/apply_adjoint are safe to call concurrently.
class LinearOperator {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual Eigen::Index in_dim() const = 0;
    virtual Eigen::Index out_dim() const = 0;
    virtual void forward(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
    virtual void adjoint(const Eigen::VectorXd& u, Eigen::VectorXd& x) const = 0;
  };

  explicit LinearOperator(std::shared_ptr<const Impl> impl);

  Eigen::Index in_dim() const { return impl_->in_dim(); }
  Eigen::Index out_dim() const { return impl_->out_dim(); }

  /// Throw DimensionMismatch on a wrong-length argument.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& u) const;

  /// Column-by-column application to an in_dim x L (resp. out_dim x L) matrix.
  Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd apply_adjoint_columns(const Eigen::MatrixXd& u) const;

  /// Materialized out_dim x in_dim matrix (probes with unit vectors).
  Eigen::MatrixXd to_dense() const;

 private:
  std::shared_ptr<const Impl> impl_;
};

LinearOperator make_dense(const Eigen::MatrixXd& m);

/// m rows of the orthonormal DCT-II matrix of size n, chosen uniformly
/// without replacement by `seed` and kept in ascending order. Throws
/// InvalidArgument if m > n or n == 0.
LinearOperator make_partial_dct(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

/// Row indices selected by make_partial_dct for the same arguments.
std::vector<Eigen::Index> partial_dct_rows(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

/// Orthonormal DCT-II matrix: C(k, j) = s_k cos(pi (2j + 1) k / (2n)).
Eigen::MatrixXd dct_matrix(Eigen::Index n);

/// m coefficients of the separable 2-D orthonormal DCT-II of a side x side
/// image (vectorized column-major). The low_freq x low_freq block of lowest
/// frequencies is always kept; the remaining m - low_freq^2 coefficients are
/// drawn uniformly without replacement by `seed`. With low_freq = 0 the
/// selection equals partial_dct_rows(side^2, m, seed). Same operator as rows
/// of the Kronecker product of two 1-D DCTs, applied in O(side^3).
LinearOperator make_partial_dct2d(Eigen::Index side, Eigen::Index m, std::uint64_t seed,
                                  Eigen::Index low_freq = 0);

/// Coefficient indices (i + j * side, ascending) used by make_partial_dct2d.
std::vector<Eigen::Index> partial_dct2d_rows(Eigen::Index side, Eigen::Index m,
                                             std::uint64_t seed, Eigen::Index low_freq = 0);

/// Full-depth orthonormal 2-D Haar synthesis (coefficients -> image) for a
/// side x side image, side = 2^k. The adjoint is the analysis transform.
/// Coefficients use the usual pyramid layout with the approximation at (0,0).
LinearOperator make_haar2d(Eigen::Index side);

/// P_Omega on vectorized rows x cols matrices; idempotent and self-adjoint.
LinearOperator make_mask(Eigen::Index rows, Eigen::Index cols, const ObservationMask& omega);

LinearOperator make_identity(Eigen::Index n);

/// [A1 A2]: (x1; x2) -> A1 x1 + A2 x2.
LinearOperator hstack(const LinearOperator& a1, const LinearOperator& a2);

/// A o B: x -> A (B x).
LinearOperator compose(const LinearOperator& a, const LinearOperator& b);

/// A^T as an operator in its own right.
LinearOperator adjoint(const LinearOperator& a);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on A^T A from a fixed seeded unit vector; stops when the
/// Rayleigh quotient changes by at most tol relative.
NormEstimate op_norm_sq(const LinearOperator& a, double tol = 1e-6, int max_iter = 1000);

// Text formats: a dense matrix is a "rows,cols" header followed by one
// comma-separated line per row; a mask is one zero-based "i,j" per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);
void write_mask(std::ostream& out, const ObservationMask& mask);
ObservationMask read_mask(std::istream& in, Eigen::Index rows, Eigen::Index cols);

}  // namespace ncvx
