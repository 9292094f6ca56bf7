#include "daecert/core/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace daecert {

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InputError("SymmetricMatrix: matrix is not square");
  }
  m_ = m.triangularView<Eigen::Upper>();
  m_.triangularView<Eigen::StrictlyLower>() =
      m_.transpose().triangularView<Eigen::StrictlyLower>();
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index dim) {
  return SymmetricMatrix(Matrix::Identity(dim, dim));
}

SymmetricMatrix SymmetricMatrix::symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InputError("SymmetricMatrix: matrix is not square");
  }
  return SymmetricMatrix(Matrix(0.5 * (m + m.transpose())));
}

void SymmetricMatrix::set(Eigen::Index i, Eigen::Index j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

SymmetricMatrix SymmetricMatrix::operator+(const SymmetricMatrix& o) const {
  return SymmetricMatrix(Matrix(m_ + o.m_));
}

SymmetricMatrix SymmetricMatrix::operator-(const SymmetricMatrix& o) const {
  return SymmetricMatrix(Matrix(m_ - o.m_));
}

SymmetricMatrix SymmetricMatrix::operator*(double s) const {
  return SymmetricMatrix(Matrix(m_ * s));
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix null_space_orthonormal(const Matrix& m, double tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > tol * smax) ++rank;
    }
  }
  Matrix q = svd.matrixV().rightCols(n - rank);
  // Fix signs so the largest-magnitude entry of each column is positive.
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    Eigen::Index imax = 0;
    q.col(j).cwiseAbs().maxCoeff(&imax);
    if (q(imax, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

TruncatedSvd truncated_svd(const Matrix& m, Eigen::Index r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (r < 0 || r > k) {
    throw InputError("truncated_svd: rank " + std::to_string(r) +
                     " outside [0, " + std::to_string(k) + "]");
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.s = svd.singularValues().head(r);
  out.v = svd.matrixV().leftCols(r);
  out.tail = svd.singularValues().tail(k - r);
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index imax = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.u(imax, j) < 0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

double min_eigenvalue_sym(const SymmetricMatrix& s) {
  return min_eigenvalue_sym(s.full());
}

double min_eigenvalue_sym(const Matrix& s) {
  if (s.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_abscissa(const Matrix& a) {
  if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix hcat(std::initializer_list<const Matrix*> parts) {
  Eigen::Index rows = -1, cols = 0;
  for (const Matrix* p : parts) {
    if (rows >= 0 && p->rows() != rows) throw InputError("hcat: row mismatch");
    rows = p->rows();
    cols += p->cols();
  }
  Matrix out(std::max<Eigen::Index>(rows, 0), cols);
  Eigen::Index c = 0;
  for (const Matrix* p : parts) {
    out.middleCols(c, p->cols()) = *p;
    c += p->cols();
  }
  return out;
}

Matrix vcat(std::initializer_list<const Matrix*> parts) {
  Eigen::Index cols = -1, rows = 0;
  for (const Matrix* p : parts) {
    if (cols >= 0 && p->cols() != cols) throw InputError("vcat: col mismatch");
    cols = p->cols();
    rows += p->rows();
  }
  Matrix out(rows, std::max<Eigen::Index>(cols, 0));
  Eigen::Index r = 0;
  for (const Matrix* p : parts) {
    out.middleRows(r, p->rows()) = *p;
    r += p->rows();
  }
  return out;
}

}  // namespace daecert
