#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace daecert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Thrown on malformed inputs (dimension mismatch, bad ranges, parse errors).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense symmetric matrix.  The stored matrix equals its transpose exactly:
/// construction copies the upper triangle into the lower one.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Eigen::Index dim) : m_(Matrix::Zero(dim, dim)) {}
  /// Uses the upper triangle of `m`; `m` must be square.
  explicit SymmetricMatrix(const Matrix& m);

  static SymmetricMatrix identity(Eigen::Index dim);
  /// (m + mᵀ)/2.
  static SymmetricMatrix symmetrize(const Matrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  /// Writes both (i, j) and (j, i).
  void set(Eigen::Index i, Eigen::Index j, double v);

  const Matrix& full() const { return m_; }

  SymmetricMatrix operator+(const SymmetricMatrix& o) const;
  SymmetricMatrix operator-(const SymmetricMatrix& o) const;
  SymmetricMatrix operator*(double s) const;

 private:
  Matrix m_;
};

/// True when every entry is finite.
bool all_finite(const Matrix& m);

/// Largest |entry|; 0 for an empty matrix.
double max_abs(const Matrix& m);

/// Orthonormal basis of ker(M).  Singular values below tol·σ_max count as
/// zero.  A zero matrix has the identity as kernel basis; a trivial kernel
/// yields a cols×0 matrix.
Matrix null_space_orthonormal(const Matrix& m, double tol = 1e-10);

struct TruncatedSvd {
  Matrix u;       // rows × r, orthonormal columns
  Vector s;       // r values, non-increasing
  Matrix v;       // cols × r, orthonormal columns
  Vector tail;    // discarded singular values σ_{r+1}, …
  Matrix reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

/// Best rank-r approximation in the Frobenius norm.  Throws InputError when
/// r > min(rows, cols).
TruncatedSvd truncated_svd(const Matrix& m, Eigen::Index r);

/// Smallest eigenvalue of a symmetric matrix (+inf for an empty one).
double min_eigenvalue_sym(const SymmetricMatrix& s);
double min_eigenvalue_sym(const Matrix& s);

/// Spectral abscissa max Re λ(A).
double spectral_abscissa(const Matrix& a);

/// Block-diagonal concatenation.
Matrix block_diag(const Matrix& a, const Matrix& b);

/// Horizontal / vertical concatenation with dimension checks.
Matrix hcat(std::initializer_list<const Matrix*> parts);
Matrix vcat(std::initializer_list<const Matrix*> parts);

}  // namespace daecert
