#include "daecert/power/linearize.hpp"

#include <cmath>

namespace daecert::power {

namespace {

double rel(const Vector& r, double scale) {
  return r.size() ? r.lpNorm<Eigen::Infinity>() / std::max(1.0, scale) : 0.0;
}

Vector y_d_im(const NetworkCase& c) {
  Vector y(c.n_gen());
  for (int g = 0; g < c.n_gen(); ++g) y(g) = -1.0 / c.generators[g].x_d;
  return y;
}

}  // namespace

Vector LinearizedPowerDae::state_shift() const {
  Vector s = Vector::Zero(2 * n_gen);
  s.head(n_gen).setOnes();
  return s;
}

Vector LinearizedPowerDae::angle_shift() const {
  Vector s = Vector::Zero(2 * (n_gen + n_load));
  s.segment(n_gen, n_gen).setOnes();
  s.tail(n_load).setOnes();
  return s;
}

ComplexMatrix augmented_admittance(const NetworkCase& c, const OperatingPoint& op,
                                   std::optional<int> skip_branch) {
  if (skip_branch && !is_connected(c, skip_branch)) {
    throw ConnectivityError("removing line " + std::to_string(*skip_branch) +
                            " disconnects the network");
  }
  const ComplexMatrix y = admittance(c, skip_branch);
  const auto order = c.model_order();
  const int n = static_cast<int>(order.size());
  ComplexMatrix out(n, n);
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) out(r, k) = y(order[r], order[k]);
  }
  for (int r = 0; r < n; ++r) {
    const Bus& b = c.buses[order[r]];
    const double v2 = op.vm(order[r]) * op.vm(order[r]);
    out(r, r) += Complex(b.p_load, -b.q_load) / v2;
  }
  for (int g = 0; g < c.n_gen(); ++g) out(g, g) += Complex(0.0, -1.0 / c.generators[g].x_d);
  return out;
}

Vector algebraic_point(const OperatingPoint& op) {
  Vector v(op.v_g.size() * 2 + op.v_l.size() * 2);
  v << op.v_g, op.theta_g, op.v_l, op.theta_l;
  return v;
}

Vector network_equations(const NetworkCase& c, const OperatingPoint& op,
                         const ComplexMatrix& y_aug, const Vector& delta, const Vector& v) {
  const int ng = c.n_gen(), nl = c.n_load(), n = ng + nl;
  ComplexVector volt(n);
  for (int k = 0; k < ng; ++k) volt(k) = std::polar(v(k), v(ng + k));
  for (int k = 0; k < nl; ++k) volt(ng + k) = std::polar(v(2 * ng + k), v(2 * ng + nl + k));
  ComplexVector r = y_aug * volt;
  const Vector yd = y_d_im(c);
  for (int g = 0; g < ng; ++g) r(g) -= Complex(0.0, yd(g)) * std::polar(op.e(g), delta(g));
  Vector out(2 * n);
  out << r.real(), r.imag();
  return out;
}

Matrix constraint_jacobian(const ComplexMatrix& y_aug, const OperatingPoint& op) {
  const int ng = static_cast<int>(op.v_g.size()), nl = static_cast<int>(op.v_l.size());
  const int n = ng + nl;
  const Matrix yre = y_aug.real(), yim = y_aug.imag();
  Vector vm(n), th(n);
  vm << op.v_g, op.v_l;
  th << op.theta_g, op.theta_l;

  // Columns for bus k: ∂/∂|V_k| and ∂/∂θ_k of Y·Ṽ, split into real and
  // imaginary rows.
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const double cs = std::cos(th(k)), sn = std::sin(th(k));
    const int col_m = k < ng ? k : 2 * ng + (k - ng);
    const int col_a = k < ng ? ng + k : 2 * ng + nl + (k - ng);
    g.col(col_m).head(n) = yre.col(k) * cs - yim.col(k) * sn;
    g.col(col_m).tail(n) = yre.col(k) * sn + yim.col(k) * cs;
    g.col(col_a).head(n) = -yre.col(k) * (vm(k) * sn) - yim.col(k) * (vm(k) * cs);
    g.col(col_a).tail(n) = yre.col(k) * (vm(k) * cs) - yim.col(k) * (vm(k) * sn);
  }
  return g;
}

LinearizedPowerDae assemble_linearization(const NetworkCase& c, const OperatingPoint& op) {
  const int ng = c.n_gen(), nl = c.n_load(), n = ng + nl;
  LinearizedPowerDae lin;
  lin.n_gen = ng;
  lin.n_load = nl;

  Vector h(ng), d(ng), xd(ng);
  for (int g = 0; g < ng; ++g) {
    h(g) = c.generators[g].h;
    d(g) = c.generators[g].d;
    xd(g) = c.generators[g].x_d;
  }
  const Vector ang = (op.delta - op.theta_g);
  const Vector denom = (2.0 * h.array() * xd.array()).matrix();
  const Vector cos_term = (op.e.array() * op.v_g.array() * ang.array().cos() / denom.array()).matrix();
  const Vector sin_term = (op.e.array() * ang.array().sin() / denom.array()).matrix();

  lin.a_bar = Matrix::Zero(2 * ng, 2 * ng);
  lin.a_bar.topRightCorner(ng, ng) = c.omega * Matrix::Identity(ng, ng);
  lin.a_bar.bottomLeftCorner(ng, ng) = (-cos_term).asDiagonal();
  lin.a_bar.bottomRightCorner(ng, ng) = (-d.array() / (2.0 * h.array())).matrix().asDiagonal();

  lin.b_v_bar = Matrix::Zero(2 * ng, 2 * n);
  lin.b_v_bar.block(ng, 0, ng, ng) = (-sin_term).asDiagonal();
  lin.b_v_bar.block(ng, ng, ng, ng) = cos_term.asDiagonal();

  lin.b_w_bar = Matrix::Zero(2 * ng, ng);
  lin.b_w_bar.bottomRows(ng).setIdentity();

  const Vector yd = y_d_im(c);
  lin.f_bar = Matrix::Zero(2 * n, 2 * ng);
  lin.f_bar.block(0, 0, ng, ng) = (yd.array() * op.e.array() * op.delta.array().cos()).matrix().asDiagonal();
  lin.f_bar.block(n, 0, ng, ng) = (yd.array() * op.e.array() * op.delta.array().sin()).matrix().asDiagonal();

  lin.g = constraint_jacobian(augmented_admittance(c, op), op);

  lin.c_bar = Matrix::Zero(ng, 2 * ng);
  lin.c_bar.rightCols(ng).setIdentity();

  Eigen::JacobiSVD<Matrix> svd(lin.g);
  const Vector& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-12 * s(0)) {
    throw PowerError("network Jacobian G is singular at the operating point");
  }
  return lin;
}

double ZeroModeResiduals::max() const { return std::max({dynamics, constraint, output}); }

ZeroModeResiduals zero_mode_residuals(const LinearizedPowerDae& lin, const Matrix* g) {
  const Matrix& gm = g ? *g : lin.g;
  const Vector xs = lin.state_shift(), vs = lin.angle_shift();
  ZeroModeResiduals r;
  r.dynamics = rel(lin.a_bar * xs + lin.b_v_bar * vs,
                   std::max(max_abs(lin.a_bar), max_abs(lin.b_v_bar)));
  r.constraint = rel(lin.f_bar * xs + gm * vs, std::max(max_abs(lin.f_bar), max_abs(gm)));
  r.output = rel(lin.c_bar * xs, max_abs(lin.c_bar));
  return r;
}

ReducedPowerDae reduce(const LinearizedPowerDae& lin) {
  const int ng = lin.n_gen;
  Matrix shift_row = Matrix::Zero(1, 2 * ng);
  shift_row.leftCols(ng).setOnes();
  ReducedPowerDae red;
  red.q = null_space_orthonormal(shift_row);
  red.a = red.q.transpose() * lin.a_bar * red.q;
  red.b_v = red.q.transpose() * lin.b_v_bar;
  red.b_w = red.q.transpose() * lin.b_w_bar;
  red.f = lin.f_bar * red.q;
  red.c = lin.c_bar * red.q;
  return red;
}

dae::LinearDae ReducedPowerDae::system(const Matrix& g_v, const Matrix& k) const {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b_v.cols());
  const int p = static_cast<int>(b_w.cols());
  const int q_out = static_cast<int>(c.rows());
  if (g_v.rows() != m || g_v.cols() != m) throw InputError("constraint matrix has wrong size");
  dae::LinearDae sys = dae::LinearDae::zeros(n, m, p, 0, m, q_out);
  sys.a = a;
  if (k.size() > 0) {
    if (k.rows() != p || k.cols() != n) throw InputError("feedback gain has wrong size");
    sys.a += b_w * k;
  }
  sys.b_v = b_v;
  sys.b_w = b_w;
  sys.f = f;
  sys.g_v = g_v;
  sys.c = c;
  return sys;
}

dae::LinearDae unreduced_system(const LinearizedPowerDae& lin, const Matrix& g_v) {
  const int n = static_cast<int>(lin.a_bar.rows());
  const int m = static_cast<int>(lin.g.cols());
  dae::LinearDae sys = dae::LinearDae::zeros(n, m, lin.n_gen, 0, m, lin.n_gen);
  sys.a = lin.a_bar;
  sys.b_v = lin.b_v_bar;
  sys.b_w = lin.b_w_bar;
  sys.f = lin.f_bar;
  sys.g_v = g_v;
  sys.c = lin.c_bar;
  return sys;
}

OutagePerturbation line_outage_perturbation(const NetworkCase& c, const OperatingPoint& op,
                                            int line_id) {
  c.branch_index(line_id);
  const Matrix g0 = constraint_jacobian(augmented_admittance(c, op), op);
  const Matrix g1 = constraint_jacobian(augmented_admittance(c, op, line_id), op);
  const Matrix raw = g1 - g0;

  const int ng = c.n_gen(), nl = c.n_load();
  Vector u = Vector::Zero(2 * (ng + nl));
  u.segment(ng, ng).setOnes();
  u.tail(nl).setOnes();

  OutagePerturbation out;
  out.line_id = line_id;
  out.raw_shift_residual = (raw * u).lpNorm<Eigen::Infinity>();
  out.delta_g = raw - (raw * u) * (u.transpose() / u.squaredNorm());
  const double base = raw.norm();
  out.projection_change = base > 0.0 ? (out.delta_g - raw).norm() / base : 0.0;
  return out;
}

JacobianAudit audit_jacobians(const NetworkCase& c, const OperatingPoint& op,
                              const LinearizedPowerDae& lin, double step) {
  const ComplexMatrix y = augmented_admittance(c, op);
  const Vector v0 = algebraic_point(op);
  const Eigen::Index m = v0.size(), ng = op.delta.size();
  Matrix g_fd(lin.g.rows(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    Vector vp = v0, vm = v0;
    vp(k) += step;
    vm(k) -= step;
    g_fd.col(k) = (network_equations(c, op, y, op.delta, vp) -
                   network_equations(c, op, y, op.delta, vm)) / (2.0 * step);
  }
  Matrix f_fd(lin.g.rows(), ng);
  for (Eigen::Index k = 0; k < ng; ++k) {
    Vector dp = op.delta, dm = op.delta;
    dp(k) += step;
    dm(k) -= step;
    f_fd.col(k) = (network_equations(c, op, y, dp, v0) -
                   network_equations(c, op, y, dm, v0)) / (2.0 * step);
  }
  JacobianAudit out;
  out.g_rel = (g_fd - lin.g).norm() / lin.g.norm();
  const Matrix f_angle = lin.f_bar.leftCols(ng);
  out.f_rel = (f_fd - f_angle).norm() / f_angle.norm();
  return out;
}

}  // namespace daecert::power
