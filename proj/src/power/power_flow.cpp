#include "daecert/power/power_flow.hpp"

#include <cmath>

namespace daecert::power {

namespace {

ComplexVector specified_injection(const NetworkCase& c) {
  const int n = static_cast<int>(c.buses.size());
  ComplexVector s(n);
  for (int i = 0; i < n; ++i) s(i) = -Complex(c.buses[i].p_load, c.buses[i].q_load);
  for (const auto& g : c.generators) s(c.bus_index(g.bus)) += g.p_gen;
  return s;
}

}  // namespace

ComplexVector OperatingPoint::voltage() const {
  ComplexVector v(vm.size());
  for (Eigen::Index i = 0; i < vm.size(); ++i) v(i) = std::polar(vm(i), va(i));
  return v;
}

ComplexVector injection_mismatch(const NetworkCase& c, const ComplexMatrix& y,
                                 const ComplexVector& v) {
  const ComplexVector i = y * v;
  return (v.array() * i.conjugate().array()).matrix() - specified_injection(c);
}

OperatingPoint solve_power_flow(const NetworkCase& c, const PowerFlowOptions& opts) {
  c.check();
  const int n = static_cast<int>(c.buses.size());
  const ComplexMatrix y = admittance(c);

  // Unknowns: angles of non-slack buses, then magnitudes of PQ buses.
  std::vector<int> ang, mag;
  for (int i = 0; i < n; ++i) {
    if (c.buses[i].type != BusType::kSlack) ang.push_back(i);
    if (c.buses[i].type == BusType::kPQ) mag.push_back(i);
  }
  const int na = static_cast<int>(ang.size()), nm = static_cast<int>(mag.size());

  Vector vm(n), va = Vector::Zero(n);
  for (int i = 0; i < n; ++i) vm(i) = c.buses[i].v_set;

  auto to_complex = [&] {
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v(i) = std::polar(vm(i), va(i));
    return v;
  };
  auto residual = [&](const ComplexVector& mis) {
    Vector f(na + nm);
    for (int k = 0; k < na; ++k) f(k) = mis(ang[k]).real();
    for (int k = 0; k < nm; ++k) f(na + k) = mis(mag[k]).imag();
    return f;
  };

  OperatingPoint op;
  ComplexVector v = to_complex();
  Vector f = residual(injection_mismatch(c, y, v));
  int it = 0;
  while (f.lpNorm<Eigen::Infinity>() > opts.tol) {
    if (it >= opts.max_iters) {
      throw PowerError("power flow did not converge in " + std::to_string(opts.max_iters) +
                       " iterations (mismatch " + std::to_string(f.lpNorm<Eigen::Infinity>()) + ")");
    }
    // dS/dθ = j·diag(V)·conj(diag(I) − Y·diag(V)),
    // dS/d|V| = diag(V)·conj(Y·diag(V/|V|)) + conj(diag(I))·diag(V/|V|).
    const ComplexVector cur = y * v;
    const ComplexVector unit = (v.array() / vm.array().cast<Complex>()).matrix();
    ComplexMatrix ds_da = -(y * v.asDiagonal().toDenseMatrix());
    ds_da.diagonal() += cur;
    ds_da = (Complex(0, 1) * (v.asDiagonal() * ds_da.conjugate())).eval();
    ComplexMatrix ds_dm = v.asDiagonal() * (y * unit.asDiagonal().toDenseMatrix()).conjugate();
    ds_dm.diagonal() += (cur.conjugate().array() * unit.array()).matrix();

    Matrix jac(na + nm, na + nm);
    for (int r = 0; r < na; ++r) {
      for (int k = 0; k < na; ++k) jac(r, k) = ds_da(ang[r], ang[k]).real();
      for (int k = 0; k < nm; ++k) jac(r, na + k) = ds_dm(ang[r], mag[k]).real();
    }
    for (int r = 0; r < nm; ++r) {
      for (int k = 0; k < na; ++k) jac(na + r, k) = ds_da(mag[r], ang[k]).imag();
      for (int k = 0; k < nm; ++k) jac(na + r, na + k) = ds_dm(mag[r], mag[k]).imag();
    }
    Eigen::PartialPivLU<Matrix> lu(jac);
    const Vector dx = lu.solve(-f);
    if (!dx.allFinite()) throw PowerError("power-flow Jacobian is singular");
    for (int k = 0; k < na; ++k) va(ang[k]) += dx(k);
    for (int k = 0; k < nm; ++k) vm(mag[k]) += dx(na + k);
    v = to_complex();
    f = residual(injection_mismatch(c, y, v));
    ++it;
  }
  op.vm = vm;
  op.va = va;
  op.mismatch = f.size() ? f.lpNorm<Eigen::Infinity>() : 0.0;
  op.iterations = it;

  // Generator output includes the local load; E∠δ = V + jX_d·I.
  const ComplexVector s = (v.array() * (y * v).conjugate().array()).matrix();
  const int ng = c.n_gen();
  op.e.resize(ng);
  op.delta.resize(ng);
  op.p_m.resize(ng);
  for (int g = 0; g < ng; ++g) {
    const int b = c.bus_index(c.generators[g].bus);
    const Complex sg = s(b) + Complex(c.buses[b].p_load, c.buses[b].q_load);
    const Complex ig = std::conj(sg / v(b));
    const Complex e = v(b) + Complex(0.0, c.generators[g].x_d) * ig;
    op.e(g) = std::abs(e);
    op.delta(g) = std::arg(e);
    op.p_m(g) = sg.real();
  }

  const auto order = c.model_order();
  const int nl = c.n_load();
  op.v_g.resize(ng);
  op.theta_g.resize(ng);
  op.v_l.resize(nl);
  op.theta_l.resize(nl);
  for (int k = 0; k < ng; ++k) {
    op.v_g(k) = vm(order[k]);
    op.theta_g(k) = va(order[k]);
  }
  for (int k = 0; k < nl; ++k) {
    op.v_l(k) = vm(order[ng + k]);
    op.theta_l(k) = va(order[ng + k]);
  }
  return op;
}

}  // namespace daecert::power
