#include "daecert/certify/lmi.hpp"

#include <string>

namespace daecert::certify {

using dae::LinearDae;
using dae::ParamKind;
using dae::QuadraticSupplyRate;
using dae::UncertaintyKind;
using dae::UncertaintySpec;
using sdp::Cone;
using sdp::Sign;
using sdp::SdpProblem;
using sdp::SparseSym;

namespace {

void check_supply(const LinearDae& sys, const QuadraticSupplyRate& s) {
  const int n = sys.n(), m = sys.m(), p = sys.p();
  if (s.xx.rows() != n || s.xx.cols() != n || s.xv.rows() != n || s.xv.cols() != m ||
      s.xw.rows() != n || s.xw.cols() != p || s.vv.rows() != m || s.vv.cols() != m ||
      s.vw.rows() != m || s.vw.cols() != p || s.ww.rows() != p || s.ww.cols() != p) {
    throw InputError("supply rate does not match the system dimensions");
  }
}

// Supply blocks placed at the x, v and w offsets of a dim×dim matrix.
Matrix embed_supply(const QuadraticSupplyRate& s, int dim, int ox, int ov, int ow) {
  Matrix out = Matrix::Zero(dim, dim);
  const auto n = s.xx.rows(), m = s.vv.rows(), p = s.ww.rows();
  out.block(ox, ox, n, n) = s.xx;
  out.block(ox, ov, n, m) = s.xv;
  out.block(ov, ox, m, n) = s.xv.transpose();
  out.block(ox, ow, n, p) = s.xw;
  out.block(ow, ox, p, n) = s.xw.transpose();
  out.block(ov, ov, m, m) = s.vv;
  out.block(ov, ow, m, p) = s.vw;
  out.block(ow, ov, p, m) = s.vw.transpose();
  out.block(ow, ow, p, p) = s.ww;
  return out;
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Adds the multiplier terms zᵀM z with z = Z·(LMI vector): τ·ZᵀMZ for a
// fixed M, or ZᵀM₀Z + Σ θ_k ZᵀM_kZ over the family parameters.
void add_multiplier(SdpProblem& prob, int c, const UncertaintySpec& u, const Matrix& z) {
  if (u.params.empty()) {
    auto tau = prob.add_scalar("tau", Sign::kNonnegative);
    prob.add_term(c, tau, sym(z.transpose() * u.m * z));
    return;
  }
  if (u.m.size() > 0) prob.add_constant(c, sym(z.transpose() * u.m * z));
  for (const auto& par : u.params) {
    std::vector<int> slots;
    switch (par.kind) {
      case ParamKind::kNonnegative:
        slots.push_back(prob.slot(prob.add_scalar(par.name, Sign::kNonnegative)));
        break;
      case ParamKind::kSkew:
        for (int i = 0; i < par.dim; ++i) {
          for (int j = i + 1; j < par.dim; ++j) {
            const auto id = prob.add_scalar(
                par.name + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
            slots.push_back(prob.slot(id));
          }
        }
        break;
      default: {
        const Cone cone = par.kind == ParamKind::kPsd           ? Cone::kPsd
                          : par.kind == ParamKind::kDiagonalPsd ? Cone::kDiagonalPsd
                                                                : Cone::kSymmetric;
        const auto id = prob.add_matrix(par.name, par.dim, cone, par.margin);
        const auto& var = prob.matrices()[id.index];
        for (int k = 0; k < var.num_slots(); ++k) slots.push_back(var.first_slot + k);
      }
    }
    if (slots.size() != par.coeffs.size()) {
      throw InputError("parameter '" + par.name + "' has wrong coefficient count");
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      prob.add_slot_term(c, slots[k], SparseSym::from_dense(sym(z.transpose() * par.coeffs[k] * z)));
    }
  }
}

void add_gain(SdpProblem& prob, int c, int dim, int ow, int p) {
  Matrix e = Matrix::Zero(dim, dim);
  e.block(ow, ow, p, p).setIdentity();
  prob.add_term(c, prob.add_scalar("gamma_sq", Sign::kNonnegative), e);
}

}  // namespace

SdpProblem assemble_filtered_lmi(const LinearDae& sys, const QuadraticSupplyRate& s,
                                 const UncertaintySpec& u, const AssemblyOptions& opts) {
  sys.check();
  check_supply(sys, s);
  if (u.kind == UncertaintyKind::kPointwise) {
    throw InputError("pointwise constraints use the pointwise assembly");
  }
  u.check(sys.n(), sys.m(), sys.l());
  const int n = sys.n(), m = sys.m(), l = sys.l(), p = sys.p(), k = sys.k();
  const bool uncertain = u.kind != UncertaintyKind::kNone;
  const int ns = uncertain ? u.filter.states() : 0;
  const int n1 = n + m + l;
  const int dim = n1 + p + ns;
  const int ow = n1, opsi = n1 + p;

  // Storage derivative: 2xᵀP(A x + B_v v + B_ξ ξ + B_w w) = ẑᵀ(ĀᵀPE + EᵀPĀ)ẑ.
  Matrix sel = Matrix::Zero(n, dim);
  sel.leftCols(n).setIdentity();
  Matrix flow = Matrix::Zero(n, dim);
  flow.block(0, 0, n, n) = sys.a;
  flow.block(0, n, n, m) = sys.b_v;
  flow.block(0, n + m, n, l) = sys.b_xi;
  flow.block(0, ow, n, p) = sys.b_w;

  Matrix rows = Matrix::Zero(k, dim);
  rows.block(0, 0, k, n) = sys.f;
  rows.block(0, n, k, m) = sys.g_v;
  rows.block(0, n + m, k, l) = sys.g_xi;
  rows.block(0, ow, k, p) = sys.g_w;

  SdpProblem prob;
  const int c = prob.add_constraint(kDissipation, dim);
  prob.add_constant(c, embed_supply(s, dim, 0, n, ow));

  const auto pv = prob.add_matrix("P", n, Cone::kPsd, opts.p_margin);
  prob.add_linear_map(c, pv, [&](const Matrix& e) -> Matrix {
    const Matrix t = flow.transpose() * e * sel;
    return -(t + t.transpose());
  });
  const auto lam = prob.add_scalar("lambda", Sign::kNonnegative);
  prob.add_term(c, lam, rows.transpose() * rows);

  if (uncertain) {
    const int r = u.z_dim();
    Matrix z = Matrix::Zero(r, dim);
    z.leftCols(n1) = u.filter.d;
    z.block(0, opsi, r, ns) = u.filter.c;
    add_multiplier(prob, c, u, z);
    if (ns > 0) {
      Matrix sel_psi = Matrix::Zero(ns, dim);
      sel_psi.rightCols(ns).setIdentity();
      Matrix filt = Matrix::Zero(ns, dim);
      filt.leftCols(n1) = u.filter.b;
      filt.rightCols(ns) = u.filter.a;
      const auto pd = prob.add_matrix("P_delta", ns, Cone::kPsd, 0.0);
      prob.add_linear_map(c, pd, [&](const Matrix& e) -> Matrix {
        const Matrix t = filt.transpose() * e * sel_psi;
        return -(t + t.transpose());
      });
    }
  }
  if (opts.gain_variable) add_gain(prob, c, dim, ow, p);
  return prob;
}

SdpProblem assemble_pointwise_lmi(const LinearDae& sys, const QuadraticSupplyRate& s,
                                  const UncertaintySpec& u, const AssemblyOptions& opts) {
  sys.check();
  check_supply(sys, s);
  if (u.kind != UncertaintyKind::kPointwise) {
    throw InputError("pointwise assembly needs a pointwise constraint");
  }
  u.check(sys.n(), sys.m(), sys.l());
  const int n = sys.n(), m = sys.m(), l = sys.l(), p = sys.p();
  const int ov = n, oxi = n + m, ow = n + m + l;
  const int dim = ow + p;

  SdpProblem prob;
  const int c = prob.add_constraint(kDissipation, dim);
  prob.add_constant(c, embed_supply(s, dim, 0, ov, ow));

  // −[[AᵀP + PA, PB_v, PB_ξ, PB_w], [B_vᵀP, 0, 0, 0], ...].
  const auto pv = prob.add_matrix("P", n, Cone::kPsd, opts.p_margin);
  prob.add_linear_map(c, pv, [&](const Matrix& e) -> Matrix {
    Matrix out = Matrix::Zero(dim, dim);
    out.block(0, 0, n, n) = -(sys.a.transpose() * e + e * sys.a);
    const Matrix pbv = -e * sys.b_v, pbx = -e * sys.b_xi, pbw = -e * sys.b_w;
    out.block(0, ov, n, m) = pbv;
    out.block(ov, 0, m, n) = pbv.transpose();
    out.block(0, oxi, n, l) = pbx;
    out.block(oxi, 0, l, n) = pbx.transpose();
    out.block(0, ow, n, p) = pbw;
    out.block(ow, 0, p, n) = pbw.transpose();
    return out;
  });

  Matrix g(sys.k(), dim);
  g << sys.f, sys.g_v, sys.g_xi, sys.g_w;
  prob.add_term(c, prob.add_scalar("lambda", Sign::kNonnegative), g.transpose() * g);

  Matrix z = Matrix::Zero(u.z_dim(), dim);
  z.leftCols(ow) = u.filter.d;
  add_multiplier(prob, c, u, z);
  if (opts.gain_variable) add_gain(prob, c, dim, ow, p);
  return prob;
}

SdpProblem assemble_lossless_lmi(const LinearDae& sys, const QuadraticSupplyRate& s,
                                 const AssemblyOptions& opts) {
  sys.check();
  check_supply(sys, s);
  if (sys.l() != 0) throw InputError("lossless assembly needs a system without uncertainty");
  const int n = sys.n(), m = sys.m(), p = sys.p();
  const int dim = n + m + p;

  SdpProblem prob;
  const int c = prob.add_constraint(kDissipation, dim);
  prob.add_constant(c, s.over_xvw());

  const auto pv = prob.add_matrix("P", n, Cone::kPsd, opts.p_margin);
  prob.add_linear_map(c, pv, [&](const Matrix& e) -> Matrix {
    Matrix out = Matrix::Zero(dim, dim);
    out.topLeftCorner(n, n) = -(sys.a.transpose() * e + e * sys.a);
    Matrix pb(n, m + p);
    pb << e * sys.b_v, e * sys.b_w;
    out.block(0, n, n, m + p) = -pb;
    out.block(n, 0, m + p, n) = -pb.transpose();
    return out;
  });

  Matrix g(sys.k(), dim);
  g << sys.f, sys.g_v, sys.g_w;
  prob.add_term(c, prob.add_scalar("lambda", Sign::kNonnegative), g.transpose() * g);
  if (opts.gain_variable) add_gain(prob, c, dim, n + m, p);
  return prob;
}

namespace {

void need(const Matrix& mtx, Eigen::Index r, Eigen::Index c, const char* name) {
  if (mtx.rows() != r || mtx.cols() != c) {
    throw InputError(std::string("controller block ") + name + " must be " + std::to_string(r) +
                     "x" + std::to_string(c));
  }
}

}  // namespace

LinearDae closed_loop(const Plant& pl, const ImplicitController& k) {
  const auto np = pl.a.rows();
  const auto nu = pl.b_u.cols();
  const auto nw = pl.b_w.cols();
  const auto ny = pl.c.rows();
  const auto nk = k.a_k.rows();
  const auto nphi = k.d_vxi.rows();
  need(pl.a, np, np, "A_p");
  need(pl.b_u, np, nu, "B_u");
  need(pl.b_w, np, nw, "B_w");
  need(pl.c, ny, np, "C_p");
  need(k.a_k, nk, nk, "A_k");
  need(k.b_xi, nk, nphi, "B_xi");
  need(k.b_y, nk, ny, "B_y");
  need(k.c_u, nu, nk, "C_u");
  need(k.d_uxi, nu, nphi, "D_uxi");
  need(k.d_uy, nu, ny, "D_uy");
  need(k.c_v, nphi, nk, "C_v");
  need(k.d_vxi, nphi, nphi, "D_vxi");
  need(k.d_vy, nphi, ny, "D_vy");

  const int n = static_cast<int>(np + nk), m = static_cast<int>(nphi);
  LinearDae s = LinearDae::zeros(n, m, static_cast<int>(nw), m, m, static_cast<int>(ny));
  s.a.topLeftCorner(np, np) = pl.a + pl.b_u * k.d_uy * pl.c;
  s.a.topRightCorner(np, nk) = pl.b_u * k.c_u;
  s.a.bottomLeftCorner(nk, np) = k.b_y * pl.c;
  s.a.bottomRightCorner(nk, nk) = k.a_k;
  s.b_w.topRows(np) = pl.b_w;
  s.b_xi.topRows(np) = pl.b_u * k.d_uxi;
  s.b_xi.bottomRows(nk) = k.b_xi;
  s.f.leftCols(np) = k.d_vy * pl.c;
  s.f.rightCols(nk) = k.c_v;
  s.g_v = -Matrix::Identity(m, m);
  s.g_xi = k.d_vxi;
  s.c.leftCols(np) = pl.c;
  s.check();
  return s;
}

SdpProblem assemble_implicit_nn_lmi(const Plant& plant, const ImplicitController& k,
                                    double gamma, GainConvention convention, double margin) {
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  const LinearDae cl = closed_loop(plant, k);
  const int n = cl.n(), p = cl.p(), m = cl.m();
  const int ow = n, ov = n + p, oxi = n + p + m;
  const int dim = n + p + 2 * m;
  const double g2 = gamma * gamma;
  const double out_w = convention == GainConvention::kBoundOnOutput ? 1.0 : g2;
  const double in_w = convention == GainConvention::kBoundOnOutput ? g2 : 1.0;

  SdpProblem prob;
  const int c = prob.add_constraint(kDissipation, dim);

  // RHS − LHS with LHS = [[𝒜ᵀP + P𝒜 + c·CᵀC, Pℬ_w, 0, Pℬ_ξ], [·, −d·I, 0, 0], 0, [·, 0, 0, 0]].
  Matrix constant = Matrix::Zero(dim, dim);
  constant.topLeftCorner(n, n) = -out_w * cl.c.transpose() * cl.c;
  constant.block(ow, ow, p, p) = in_w * Matrix::Identity(p, p);
  prob.add_constant(c, constant);

  const auto pv = prob.add_matrix("P", n, Cone::kPsd, margin);
  prob.add_linear_map(c, pv, [&](const Matrix& e) -> Matrix {
    Matrix out = Matrix::Zero(dim, dim);
    out.topLeftCorner(n, n) = -(cl.a.transpose() * e + e * cl.a);
    const Matrix pbw = -e * cl.b_w, pbx = -e * cl.b_xi;
    out.block(0, ow, n, p) = pbw;
    out.block(ow, 0, p, n) = pbw.transpose();
    out.block(0, oxi, n, m) = pbx;
    out.block(oxi, 0, m, n) = pbx.transpose();
    return out;
  });

  // [[0, −Λ/2], [−Λ/2, Λ]] on (v, ξ).
  const auto lam_d = prob.add_matrix("Lambda", m, Cone::kDiagonalPsd, margin);
  prob.add_linear_map(c, lam_d, [&](const Matrix& e) -> Matrix {
    Matrix out = Matrix::Zero(dim, dim);
    out.block(ov, oxi, m, m) = -0.5 * e;
    out.block(oxi, ov, m, m) = -0.5 * e;
    out.block(oxi, oxi, m, m) = e;
    return out;
  });

  // λ·[𝒞ᵀ; 0; −I; 𝒟ᵀ][𝒞, 0, −I, 𝒟].
  Matrix row = Matrix::Zero(m, dim);
  row.leftCols(n) = cl.f;
  row.block(0, ov, m, m) = -Matrix::Identity(m, m);
  row.block(0, oxi, m, m) = cl.g_xi;
  prob.add_term(c, prob.add_scalar("lambda", Sign::kNonnegative), row.transpose() * row);
  return prob;
}

}  // namespace daecert::certify
