#include "daecert/power/envelope.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace daecert::power {

Matrix UncertaintyEnvelope::constraint_at(const Vector& theta) const {
  if (theta.size() != static_cast<Eigen::Index>(terms.size())) {
    throw InputError("theta has " + std::to_string(theta.size()) + " entries, envelope has " +
                     std::to_string(terms.size()) + " terms");
  }
  Matrix g = g_base;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double w = (1.0 - theta(i)) / 2.0;
    if (w != 0.0) g += w * terms[i].h * terms[i].j.transpose();
  }
  return g;
}

Vector UncertaintyEnvelope::vertex(int line_id) const {
  Vector theta = Vector::Ones(static_cast<Eigen::Index>(terms.size()));
  if (line_id == base_line) return theta;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].line_id == line_id) {
      theta(i) = -1.0;
      return theta;
    }
  }
  throw InputError("line " + std::to_string(line_id) + " is not part of the envelope");
}

Matrix UncertaintyEnvelope::j_stack() const {
  if (terms.empty()) return Matrix(g_base.cols(), 0);
  Matrix out(g_base.cols(), rank * static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) out.middleCols(i * rank, rank) = terms[i].j;
  return out;
}

UncertaintyEnvelope build_uncertainty_envelope(const Matrix& g,
                                               const std::map<int, Matrix>& delta_g,
                                               int base_line, const std::vector<int>& order,
                                               int rank, const Vector& shift) {
  const Eigen::Index n = g.rows();
  if (g.cols() != n || shift.size() != n) throw InputError("envelope: size mismatch");
  if (rank < 1 || rank > n) {
    throw InputError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(n) + "]");
  }
  auto find = [&](int line) -> const Matrix& {
    auto it = delta_g.find(line);
    if (it == delta_g.end()) throw InputError("no perturbation for line " + std::to_string(line));
    if (it->second.rows() != n || it->second.cols() != n) {
      throw InputError("perturbation for line " + std::to_string(line) + " has wrong size");
    }
    return it->second;
  };

  UncertaintyEnvelope env;
  env.base_line = base_line;
  env.rank = rank;
  const Matrix& base = find(base_line);
  env.g_base = g + base;

  const Vector u = shift.normalized();
  const Matrix proj = Matrix::Identity(n, n) - u * u.transpose();
  for (int line : order) {
    if (line == base_line) continue;
    const Matrix diff = find(line) - base;
    const TruncatedSvd svd = truncated_svd(diff, rank);
    EnvelopeTerm t;
    t.line_id = line;
    Eigen::JacobiSVD<Matrix> full(diff);
    t.singular_values = full.singularValues();
    const double s1 = t.singular_values(0);
    t.decay = (s1 > 0.0 && t.singular_values.size() > rank) ? t.singular_values(rank) / s1 : 0.0;

    // J ← orthonormal basis of (I − uuᵀ)V, H absorbs the triangular factor
    // so that H Jᵀ = U Σ Vᵀ(I − uuᵀ).
    const Matrix vp = proj * svd.v;
    Eigen::HouseholderQR<Matrix> qr(vp);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, rank);
    const Matrix r = q.transpose() * vp;
    t.j = q;
    t.h = svd.u * svd.s.asDiagonal() * r.transpose();
    t.truncation_residual = (t.h * t.j.transpose() - diff).norm();
    env.terms.push_back(std::move(t));
  }

  const Eigen::Index nt = static_cast<Eigen::Index>(env.terms.size());
  env.g_v = env.g_base;
  env.g_xi = Matrix(n, rank * nt);
  for (Eigen::Index i = 0; i < nt; ++i) {
    env.g_v += 0.5 * env.terms[i].h * env.terms[i].j.transpose();
    env.g_xi.middleCols(i * rank, rank) = env.terms[i].h;
  }
  return env;
}

std::vector<double> singular_diagonal_points(const UncertaintyEnvelope& env) {
  std::vector<double> out;
  if (env.terms.empty()) return out;
  const Eigen::PartialPivLU<Matrix> lu(env.g_v);
  const Matrix loop = -env.j_stack().transpose() * lu.solve(env.g_xi);
  const Eigen::EigenSolver<Matrix> es(loop, false);
  for (const auto& mu : es.eigenvalues()) {
    if (std::fabs(mu.imag()) > 1e-9 * std::abs(mu) || std::fabs(mu.real()) < 2.0) continue;
    out.push_back(-2.0 / mu.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace daecert::power
