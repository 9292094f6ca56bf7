#include <Eigen/LU>
#include <cmath>

#include "daecert/dae/linear_dae.hpp"

namespace daecert::dae {

Trajectory simulate(const LinearDae& sys, const Signal& w, const Vector& x0,
                    double dt, double horizon) {
  sys.check();
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw InputError("simulate: need dt > 0 and T >= 0");
  if (x0.size() != sys.n()) throw InputError("simulate: x0 has wrong size");
  if (sys.k() != sys.m()) throw InputError("simulate: G_v is not square");
  Eigen::FullPivLU<Matrix> glu(sys.g_v);
  if (sys.m() > 0 && !glu.isInvertible()) throw InputError("simulate: G_v is singular");

  const int n = sys.n(), m = sys.m(), p = sys.p();
  auto input = [&](double t) -> Vector {
    if (p == 0) return Vector();
    Vector wt = w ? w(t) : Vector::Zero(p);
    if (wt.size() != p) throw InputError("simulate: input signal has wrong size");
    return wt;
  };
  auto solve_v = [&](const Vector& x, const Vector& wt) -> Vector {
    if (m == 0) return Vector();
    Vector rhs = -(sys.f * x);
    if (p > 0) rhs -= sys.g_w * wt;
    return glu.solve(rhs);
  };
  auto residual = [&](const Vector& x, const Vector& v, const Vector& wt) {
    if (m == 0) return 0.0;
    Vector r = sys.f * x + sys.g_v * v;
    if (p > 0) r += sys.g_w * wt;
    return max_abs(r);
  };

  const LinearOde ode = eliminate_algebraic([&] {
    LinearDae s = sys;
    s.b_xi.resize(n, 0);
    s.g_xi.resize(sys.k(), 0);
    return s;
  }());
  const Eigen::Index steps = static_cast<Eigen::Index>(std::llround(horizon / dt));
  Trajectory tr;
  tr.t.resize(steps + 1);
  tr.x.resize(n, steps + 1);
  tr.v.resize(m, steps + 1);
  tr.y.resize(sys.q(), steps + 1);
  tr.energy_y = Vector::Zero(steps + 1);
  tr.energy_w = Vector::Zero(steps + 1);

  const Matrix id = Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> step_lu(id - 0.5 * dt * ode.a);
  const Matrix expl = id + 0.5 * dt * ode.a;

  Vector x = x0;
  Vector wt = input(0.0);
  Vector v = solve_v(x, wt);
  const double r0 = residual(x, v, wt);
  if (r0 > 1e-10 * (1.0 + x.norm())) throw InputError("simulate: inconsistent initial condition");
  auto output = [&](const Vector& xx, const Vector& vv) -> Vector {
    Vector y = sys.c * xx;
    if (m > 0) y += sys.d_v * vv;
    return y;
  };
  Vector y = output(x, v);
  tr.t(0) = 0.0;
  tr.x.col(0) = x;
  if (m > 0) tr.v.col(0) = v;
  tr.y.col(0) = y;
  tr.max_algebraic_residual = r0;
  for (Eigen::Index k = 1; k <= steps; ++k) {
    const double t1 = k * dt;
    const Vector w1 = input(t1);
    Vector rhs = expl * x;
    if (p > 0) rhs += 0.5 * dt * ode.b * (wt + w1);
    const Vector x1 = step_lu.solve(rhs);
    const Vector v1 = solve_v(x1, w1);
    const Vector y1 = output(x1, v1);
    tr.t(k) = t1;
    tr.x.col(k) = x1;
    if (m > 0) tr.v.col(k) = v1;
    tr.y.col(k) = y1;
    tr.energy_y(k) = tr.energy_y(k - 1) + 0.5 * dt * (y.squaredNorm() + y1.squaredNorm());
    const double ww = p > 0 ? wt.squaredNorm() + w1.squaredNorm() : 0.0;
    tr.energy_w(k) = tr.energy_w(k - 1) + 0.5 * dt * ww;
    tr.max_algebraic_residual = std::max(tr.max_algebraic_residual, residual(x1, v1, w1));
    x = x1;
    wt = w1;
    y = y1;
  }
  return tr;
}

}  // namespace daecert::dae
