#include "daecert/dae/supply_rate.hpp"

namespace daecert::dae {

Matrix QuadraticSupplyRate::over_xvw() const {
  const Eigen::Index n = xx.rows(), m = vv.rows(), p = ww.rows();
  Matrix s = Matrix::Zero(n + m + p, n + m + p);
  s.block(0, 0, n, n) = xx;
  s.block(0, n, n, m) = xv;
  s.block(n, 0, m, n) = xv.transpose();
  s.block(0, n + m, n, p) = xw;
  s.block(n + m, 0, p, n) = xw.transpose();
  s.block(n, n, m, m) = vv;
  s.block(n, n + m, m, p) = vw;
  s.block(n + m, n, p, m) = vw.transpose();
  s.block(n + m, n + m, p, p) = ww;
  return s;
}

double QuadraticSupplyRate::evaluate(const Vector& x, const Vector& v, const Vector& w) const {
  Vector z(x.size() + v.size() + w.size());
  z << x, v, w;
  return z.dot(over_xvw() * z);
}

double QuadraticSupplyRate::evaluate_yw(const Vector& y, const Vector& w) const {
  Vector z(y.size() + w.size());
  z << y, w;
  return z.dot(over_yw * z);
}

QuadraticSupplyRate expand_supply(const Matrix& over_yw, const LinearDae& sys) {
  sys.check();
  const int n = sys.n(), m = sys.m(), p = sys.p(), q = sys.q();
  if (over_yw.rows() != q + p || over_yw.cols() != q + p) {
    throw InputError("supply matrix must be (q+p)x(q+p)");
  }
  if (max_abs(over_yw - over_yw.transpose()) > 1e-12 * (1.0 + max_abs(over_yw))) {
    throw InputError("supply matrix is not symmetric");
  }
  Matrix t = Matrix::Zero(q + p, n + m + p);
  t.block(0, 0, q, n) = sys.c;
  t.block(0, n, q, m) = sys.d_v;
  t.block(q, n + m, p, p).setIdentity();
  const Matrix sym = 0.5 * (over_yw + over_yw.transpose());
  const Matrix full = t.transpose() * sym * t;
  QuadraticSupplyRate s;
  s.kind = SupplyKind::kCustom;
  s.over_yw = sym;
  s.xx = full.block(0, 0, n, n);
  s.xv = full.block(0, n, n, m);
  s.xw = full.block(0, n + m, n, p);
  s.vv = full.block(n, n, m, m);
  s.vw = full.block(n, n + m, m, p);
  s.ww = full.block(n + m, n + m, p, p);
  return s;
}

QuadraticSupplyRate make_supply_rate(SupplyKind kind, const LinearDae& sys, double gamma,
                                     const Matrix& over_yw) {
  sys.check();
  const int p = sys.p(), q = sys.q();
  Matrix x = Matrix::Zero(q + p, q + p);
  switch (kind) {
    case SupplyKind::kStability:
      break;
    case SupplyKind::kPassivity:
      if (p != q) throw InputError("passivity needs as many outputs as inputs");
      x.block(0, q, q, p) = 0.5 * Matrix::Identity(q, p);
      x.block(q, 0, p, q) = 0.5 * Matrix::Identity(p, q);
      break;
    case SupplyKind::kL2Gain:
      if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("l2gain needs gamma > 0");
      x.block(0, 0, q, q) = -Matrix::Identity(q, q);
      x.block(q, q, p, p) = gamma * gamma * Matrix::Identity(p, p);
      break;
    case SupplyKind::kCustom:
      x = over_yw;
      break;
  }
  QuadraticSupplyRate s = expand_supply(x, sys);
  s.kind = kind;
  s.gamma = kind == SupplyKind::kL2Gain ? gamma : 0.0;
  return s;
}

}  // namespace daecert::dae
