#include "daecert/power/controller.hpp"

#include "daecert/power/network_case.hpp"
#include "daecert/sdp/problem.hpp"

namespace daecert::power {

ControllerDesign design_controller(const dae::LinearDae& sys, double alpha,
                                   const sdp::SolverOptions& solver) {
  if (alpha < 0.0) throw InputError("alpha must be nonnegative");
  sys.check();
  if (sys.l() != 0) throw InputError("controller design expects a system without uncertainty");
  const dae::LinearOde ode = dae::eliminate_algebraic(sys);
  const Matrix& a = ode.a;
  const Matrix& b = ode.b;
  const int n = static_cast<int>(a.rows()), p = static_cast<int>(b.cols());

  ControllerDesign out;
  const double open = spectral_abscissa(a);
  if (open < -alpha) {
    out.k = Matrix::Zero(p, n);
    out.abscissa = open;
    out.open_loop_sufficient = true;
    return out;
  }

  sdp::SdpProblem prob;
  const auto x = prob.add_matrix("X", n, sdp::Cone::kPsd, 1.0);
  std::vector<sdp::ScalarId> y(static_cast<std::size_t>(p * n));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) {
      y[i * n + j] = prob.add_scalar("Y[" + std::to_string(i) + "," + std::to_string(j) + "]");
    }
  }
  const auto t = prob.add_scalar("t", sdp::Sign::kNonnegative);

  // −(A X + X Aᵀ + 2αX + B Y + Yᵀ Bᵀ) ⪰ margin·I.
  const double margin = 1e-6 * std::max(1.0, max_abs(a));
  const int region = prob.add_constraint("region", n);
  prob.add_constant(region, -margin * Matrix::Identity(n, n));
  prob.add_linear_map(region, x, [&](const Matrix& e) -> Matrix {
    const Matrix ax = a * e;
    return -(ax + ax.transpose() + 2.0 * alpha * e);
  });
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) {
      Matrix c = Matrix::Zero(n, n);
      c.col(j) += b.col(i);
      c.row(j) += b.col(i).transpose();
      prob.add_term(region, y[i * n + j], -c);
    }
  }

  // [[t·I, Y], [Yᵀ, I]] ⪰ 0 bounds ‖Y‖² by t.
  const int norm = prob.add_constraint("gain_bound", p + n);
  Matrix tail = Matrix::Zero(p + n, p + n);
  tail.bottomRightCorner(n, n).setIdentity();
  prob.add_constant(norm, tail);
  Matrix head = Matrix::Zero(p + n, p + n);
  head.topLeftCorner(p, p).setIdentity();
  prob.add_term(norm, t, head);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) {
      Matrix c = Matrix::Zero(p + n, p + n);
      c(i, p + j) = 1.0;
      c(p + j, i) = 1.0;
      prob.add_term(norm, y[i * n + j], c);
    }
  }
  prob.set_objective({{t, 1.0}});

  const sdp::SdpSolution sol = sdp::solve(prob, solver);
  if (!sol.ok()) {
    throw PowerError("pole-placement LMI infeasible (" + sdp::to_string(sol.status) + ": " +
                     sol.message + ")");
  }
  const Matrix xv = sol.values.matrices[x.index];
  Matrix yv(p, n);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) yv(i, j) = sol.values.scalars[y[i * n + j].index];
  }
  out.k = xv.llt().solve(yv.transpose()).transpose();
  out.abscissa = spectral_abscissa(a + b * out.k);
  if (!(out.abscissa < -alpha)) {
    throw PowerError("designed gain misses the pole region (abscissa " +
                     std::to_string(out.abscissa) + ")");
  }
  return out;
}

}  // namespace daecert::power
