#include "daecert/dae/linear_dae.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <complex>

namespace daecert::dae {

LinearDae LinearDae::zeros(int n, int m, int p, int l, int k, int q) {
  if (n < 0 || m < 0 || p < 0 || l < 0 || k < 0 || q < 0) {
    throw InputError("negative dimension");
  }
  LinearDae s;
  s.a = Matrix::Zero(n, n);
  s.b_v = Matrix::Zero(n, m);
  s.b_w = Matrix::Zero(n, p);
  s.b_xi = Matrix::Zero(n, l);
  s.f = Matrix::Zero(k, n);
  s.g_v = Matrix::Zero(k, m);
  s.g_w = Matrix::Zero(k, p);
  s.g_xi = Matrix::Zero(k, l);
  s.c = Matrix::Zero(q, n);
  s.d_v = Matrix::Zero(q, m);
  return s;
}

namespace {

void expect(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InputError(std::string("block ") + name + " is " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()) + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!m.allFinite()) throw InputError(std::string("block ") + name + " has non-finite entries");
}

}  // namespace

void LinearDae::check() const {
  const int nn = static_cast<int>(a.rows());
  const int mm = static_cast<int>(b_v.cols());
  const int pp = static_cast<int>(b_w.cols());
  const int ll = static_cast<int>(b_xi.cols());
  const int kk = static_cast<int>(f.rows());
  const int qq = static_cast<int>(c.rows());
  expect(a, nn, nn, "A");
  expect(b_v, nn, mm, "B_v");
  expect(b_w, nn, pp, "B_w");
  expect(b_xi, nn, ll, "B_xi");
  expect(f, kk, nn, "F");
  expect(g_v, kk, mm, "G_v");
  expect(g_w, kk, pp, "G_w");
  expect(g_xi, kk, ll, "G_xi");
  expect(c, qq, nn, "C");
  expect(d_v, qq, mm, "D_v");
}

ValidationReport validate(const LinearDae& sys) {
  ValidationReport rep;
  try {
    sys.check();
    rep.dims_ok = true;
  } catch (const InputError& e) {
    rep.findings.emplace_back(e.what());
    return rep;
  }
  if (sys.m() == 0) {
    rep.index_one = true;
    rep.findings.emplace_back("no algebraic variables");
  } else if (sys.k() != sys.m()) {
    rep.findings.emplace_back("G_v is not square; index-1 witness unavailable");
  } else {
    Eigen::FullPivLU<Matrix> lu(sys.g_v);
    rep.index_one = lu.isInvertible();
    if (!rep.index_one) rep.findings.emplace_back("G_v is singular");
  }
  return rep;
}

namespace {

Eigen::PartialPivLU<Matrix> invertible_g_v(const LinearDae& sys) {
  if (sys.k() != sys.m()) throw InputError("G_v is not square");
  if (sys.m() > 0) {
    Eigen::FullPivLU<Matrix> full(sys.g_v);
    if (!full.isInvertible()) {
      throw InputError("G_v is singular; the algebraic equation cannot be eliminated");
    }
  }
  return Eigen::PartialPivLU<Matrix>(sys.g_v);
}

}  // namespace

LinearOde eliminate_algebraic(const LinearDae& sys) {
  sys.check();
  if (sys.l() > 0) throw InputError("elimination requires a system without ξ");
  LinearOde ode;
  if (sys.m() == 0) {
    ode.a = sys.a;
    ode.b = sys.b_w;
    ode.c = sys.c;
    ode.d = Matrix::Zero(sys.q(), sys.p());
    return ode;
  }
  auto lu = invertible_g_v(sys);
  const Matrix gf = lu.solve(sys.f);
  const Matrix gw = lu.solve(sys.g_w);
  ode.a = sys.a - sys.b_v * gf;
  ode.b = sys.b_w - sys.b_v * gw;
  ode.c = sys.c - sys.d_v * gf;
  ode.d = -sys.d_v * gw;
  return ode;
}

ComplexMatrix frequency_response(const LinearDae& sys, double omega) {
  sys.check();
  if (sys.k() != sys.m()) throw InputError("descriptor pencil is not square");
  const int n = sys.n(), m = sys.m();
  using C = std::complex<double>;
  ComplexMatrix lhs = ComplexMatrix::Zero(n + m, n + m);
  lhs.topLeftCorner(n, n) = C(0, omega) * ComplexMatrix::Identity(n, n) - sys.a.cast<C>();
  lhs.topRightCorner(n, m) = -sys.b_v.cast<C>();
  lhs.bottomLeftCorner(m, n) = sys.f.cast<C>();
  lhs.bottomRightCorner(m, m) = sys.g_v.cast<C>();
  ComplexMatrix rhs(n + m, sys.p());
  rhs.topRows(n) = sys.b_w.cast<C>();
  rhs.bottomRows(m) = -sys.g_w.cast<C>();
  Eigen::FullPivLU<ComplexMatrix> lu(lhs);
  if (!lu.isInvertible()) {
    throw InputError("descriptor pencil is singular at omega = " + std::to_string(omega));
  }
  const ComplexMatrix sol = lu.solve(rhs);
  return sys.c.cast<C>() * sol.topRows(n) + sys.d_v.cast<C>() * sol.bottomRows(m);
}

ComplexMatrix frequency_response(const LinearOde& sys, double omega) {
  using C = std::complex<double>;
  const Eigen::Index n = sys.a.rows();
  ComplexMatrix lhs = C(0, omega) * ComplexMatrix::Identity(n, n) - sys.a.cast<C>();
  Eigen::PartialPivLU<ComplexMatrix> lu(lhs);
  return sys.c.cast<C>() * lu.solve(sys.b.cast<C>()) + sys.d.cast<C>();
}

ComplexVector finite_poles(const LinearDae& sys) {
  sys.check();
  if (sys.k() != sys.m()) throw InputError("descriptor pencil is not square");
  const int n = sys.n(), m = sys.m();
  if (m == 0) {
    Eigen::EigenSolver<Matrix> es(sys.a, false);
    return es.eigenvalues();
  }
  Eigen::FullPivLU<Matrix> full(sys.g_v);
  if (full.isInvertible()) {
    const Matrix a_eff = sys.a - sys.b_v * full.solve(sys.f);
    Eigen::EigenSolver<Matrix> es(a_eff, false);
    return es.eigenvalues();
  }
  Matrix big = Matrix::Zero(n + m, n + m);
  big.topLeftCorner(n, n) = sys.a;
  big.topRightCorner(n, m) = sys.b_v;
  big.bottomLeftCorner(m, n) = sys.f;
  big.bottomRightCorner(m, m) = sys.g_v;
  Matrix e = Matrix::Zero(n + m, n + m);
  e.topLeftCorner(n, n).setIdentity();
  Eigen::GeneralizedEigenSolver<Matrix> ges(big, e, false);
  const auto& alphas = ges.alphas();
  const auto& betas = ges.betas();
  const double scale = 1.0 + big.norm();
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    const double b = std::fabs(betas(i));
    if (std::abs(alphas(i)) <= 1e-12 * scale && b <= 1e-12) {
      throw InputError("descriptor pencil is singular");
    }
    if (b <= 1e-12 * std::abs(alphas(i))) continue;
    out.push_back(alphas(i) / betas(i));
  }
  ComplexVector v(static_cast<Eigen::Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) v(static_cast<Eigen::Index>(i)) = out[i];
  return v;
}

}  // namespace daecert::dae
