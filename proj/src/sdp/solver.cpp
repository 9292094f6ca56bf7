#include "daecert/sdp/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "daecert/kernels/kernels.hpp"

namespace daecert::sdp {

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kFeasible:
      return "feasible";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Where a cone block of the internal problem came from.
struct Origin {
  enum class Kind { kConstraint, kMatrixCone, kScalarSign, kDiagonalCone, kMarginCap };
  Kind kind = Kind::kConstraint;
  int index = 0;
  int entry = 0;
};

// ---------------------------------------------------------------------------
// Original-space description: coefficients indexed by problem slots.

struct RawBlock {
  int dim = 0;
  Origin origin;
  Matrix f0;
  std::map<int, Matrix> coef;
};

struct RawLp {
  Origin origin;
  double f0 = 0.0;
  std::map<int, double> coef;
};

struct Raw {
  int n = 0;
  std::vector<RawBlock> blocks;
  std::vector<RawLp> lps;
  Matrix eq;   // r × n
  Vector eq_rhs;
  // (constraint, a, b) for each equality row.
  std::vector<std::array<int, 3>> eq_src;
  Vector c;
};

Raw flatten(const SdpProblem& p) {
  Raw raw;
  raw.n = p.num_slots();
  raw.c = Vector::Zero(raw.n);
  for (const auto& [s, v] : p.objective()) raw.c(s) += v;

  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;

  const auto& cons = p.constraints();
  for (int k = 0; k < static_cast<int>(cons.size()); ++k) {
    const LmiConstraint& lmi = cons[k];
    if (lmi.dim == 0) continue;
    if (lmi.relation == Relation::kZero) {
      Matrix c0 = lmi.constant.to_dense();
      std::vector<Matrix> dense;
      for (int a = 0; a < lmi.dim; ++a) {
        for (int b = a; b < lmi.dim; ++b) {
          std::vector<double> row(raw.n, 0.0);
          bool any = false;
          for (const auto& [s, coeff] : lmi.terms) {
            for (const auto& e : coeff.entries) {
              if (e.i == a && e.j == b) {
                row[s] += e.v;
                any = true;
              }
            }
          }
          if (!any && c0(a, b) == 0.0) continue;
          eq_rows.push_back(std::move(row));
          eq_rhs.push_back(-c0(a, b));
          raw.eq_src.push_back({k, a, b});
        }
      }
      continue;
    }
    if (lmi.dim == 1) {
      RawLp lp;
      lp.origin = {Origin::Kind::kConstraint, k, 0};
      lp.f0 = lmi.constant.to_dense()(0, 0);
      for (const auto& [s, coeff] : lmi.terms) lp.coef[s] = coeff.to_dense()(0, 0);
      raw.lps.push_back(std::move(lp));
      continue;
    }
    RawBlock b;
    b.dim = lmi.dim;
    b.origin = {Origin::Kind::kConstraint, k, 0};
    b.f0 = lmi.constant.to_dense();
    for (const auto& [s, coeff] : lmi.terms) b.coef[s] = coeff.to_dense();
    raw.blocks.push_back(std::move(b));
  }

  for (int k = 0; k < static_cast<int>(p.scalars().size()); ++k) {
    const auto& v = p.scalars()[k];
    if (v.sign != Sign::kNonnegative) continue;
    RawLp lp;
    lp.origin = {Origin::Kind::kScalarSign, k, 0};
    lp.coef[v.slot] = 1.0;
    raw.lps.push_back(std::move(lp));
  }
  for (int k = 0; k < static_cast<int>(p.matrices().size()); ++k) {
    const auto& v = p.matrices()[k];
    if (v.dim == 0) continue;
    if (v.cone == Cone::kDiagonalPsd) {
      for (int i = 0; i < v.dim; ++i) {
        RawLp lp;
        lp.origin = {Origin::Kind::kDiagonalCone, k, i};
        lp.f0 = -v.margin;
        lp.coef[v.first_slot + i] = 1.0;
        raw.lps.push_back(std::move(lp));
      }
    } else if (v.cone == Cone::kPsd) {
      if (v.dim == 1) {
        RawLp lp;
        lp.origin = {Origin::Kind::kMatrixCone, k, 0};
        lp.f0 = -v.margin;
        lp.coef[v.first_slot] = 1.0;
        raw.lps.push_back(std::move(lp));
        continue;
      }
      RawBlock b;
      b.dim = v.dim;
      b.origin = {Origin::Kind::kMatrixCone, k, 0};
      b.f0 = -v.margin * Matrix::Identity(v.dim, v.dim);
      for (int s = 0; s < v.num_slots(); ++s) {
        b.coef[v.first_slot + s] = p.basis(MatrixId{k}, s);
      }
      raw.blocks.push_back(std::move(b));
    }
  }

  raw.eq.resize(static_cast<Eigen::Index>(eq_rows.size()), raw.n);
  raw.eq_rhs.resize(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    for (int s = 0; s < raw.n; ++s) raw.eq(r, s) = eq_rows[r][s];
    raw.eq_rhs(r) = eq_rhs[r];
  }
  return raw;
}

// ---------------------------------------------------------------------------
// Equality elimination y = y0 + N z via column-pivoted QR.

struct Elimination {
  bool identity = true;
  Vector y0;
  Matrix null;  // n × m
  bool consistent = true;
  Vector inconsistency;  // multiplier direction when inconsistent
  Eigen::ColPivHouseholderQR<Matrix> qr;
};

Elimination eliminate(const Raw& raw) {
  Elimination el;
  const int n = raw.n;
  el.y0 = Vector::Zero(n);
  if (raw.eq.rows() == 0) return el;
  el.identity = false;
  el.qr.compute(raw.eq);
  const double maxdiag =
      el.qr.matrixQR().rows() > 0 ? std::fabs(el.qr.matrixQR()(0, 0)) : 0.0;
  el.qr.setThreshold(1e-11);
  const Eigen::Index rank = maxdiag > 0 ? el.qr.rank() : 0;
  const Matrix& qrm = el.qr.matrixQR();
  const auto perm = el.qr.colsPermutation().indices();
  Matrix r11 = qrm.topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
  Matrix r12 = qrm.topRightCorner(rank, n - rank);
  Vector qtf = el.qr.householderQ().adjoint() * raw.eq_rhs;
  const double resid = qtf.tail(qtf.size() - rank).norm();
  if (resid > 1e-9 * (1.0 + raw.eq_rhs.norm())) {
    el.consistent = false;
    Vector tailv = Vector::Zero(qtf.size());
    tailv.tail(qtf.size() - rank) = qtf.tail(qtf.size() - rank);
    el.inconsistency = el.qr.householderQ() * tailv;
    return el;
  }
  Vector yb = r11.triangularView<Eigen::Upper>().solve(qtf.head(rank));
  Matrix t = r11.triangularView<Eigen::Upper>().solve(r12);
  el.null = Matrix::Zero(n, n - rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    el.y0(perm(i)) = yb(i);
    el.null.row(perm(i)) = -t.row(i);
  }
  for (Eigen::Index j = 0; j < n - rank; ++j) el.null(perm(rank + j), j) = 1.0;
  return el;
}

// Least-squares multipliers μ with Eᵀμ ≈ g.
Vector equality_multipliers(const Raw& raw, const Vector& g) {
  if (raw.eq.rows() == 0) return Vector();
  return raw.eq.transpose().colPivHouseholderQr().solve(g);
}

// ---------------------------------------------------------------------------
// Reduced problem in z-space.

struct Coef {
  int var = 0;
  bool low_rank = false;
  Matrix dense;
  Matrix a, b;  // F = a bᵀ
};

struct Block {
  int dim = 0;
  Origin origin;
  double scale = 1.0;
  Matrix f0;
  std::vector<Coef> coefs;
  Matrix a_all, b_all;
  std::vector<std::size_t> seg;
  std::vector<int> seg_var;
  std::vector<int> dense;
};

struct Reduced {
  int m = 0;
  std::vector<Block> blocks;
  Vector lp_f0;
  Matrix lp_a;  // n_lp × m
  Vector lp_scale;
  std::vector<Origin> lp_origin;
  Vector c;
  Vector var_scale;
  double offset = 0.0;
  int margin_var = -1;  // index of t in feasibility mode
  int total_dim = 0;
};

bool low_rank_factor(const Matrix& f, int max_rank, Matrix& a, Matrix& b) {
  const Eigen::Index d = f.rows();
  const double fmax = max_abs(f);
  std::vector<Vector> as, bs;
  if (fmax > 0.0) {
    Matrix r = f;
    for (;;) {
      const std::size_t idx = kernels::argmax_abs(
          std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
      const Eigen::Index p = static_cast<Eigen::Index>(idx) % d;
      const Eigen::Index q = static_cast<Eigen::Index>(idx) / d;
      const double piv = r(p, q);
      if (std::fabs(piv) <= 1e-13 * fmax) break;
      if (static_cast<int>(as.size()) == max_rank) return false;
      Vector av = r.col(q);
      Vector bv = r.row(p).transpose() / piv;
      r.noalias() -= av * bv.transpose();
      as.push_back(std::move(av));
      bs.push_back(std::move(bv));
    }
  }
  a.resize(d, static_cast<Eigen::Index>(as.size()));
  b.resize(d, static_cast<Eigen::Index>(bs.size()));
  for (std::size_t k = 0; k < as.size(); ++k) {
    a.col(static_cast<Eigen::Index>(k)) = as[k];
    b.col(static_cast<Eigen::Index>(k)) = bs[k];
  }
  return true;
}

void layout(Block& blk) {
  const int max_rank = std::max(4, blk.dim / 8);
  Eigen::Index k = 0;
  for (auto& cf : blk.coefs) {
    if (cf.var >= 0 && blk.dim > 1 && low_rank_factor(cf.dense, max_rank, cf.a, cf.b)) {
      cf.low_rank = true;
      k += cf.a.cols();
    }
  }
  blk.a_all.resize(blk.dim, k);
  blk.b_all.resize(blk.dim, k);
  blk.seg.assign(1, 0);
  blk.seg_var.clear();
  blk.dense.clear();
  Eigen::Index col = 0;
  for (int i = 0; i < static_cast<int>(blk.coefs.size()); ++i) {
    auto& cf = blk.coefs[i];
    if (!cf.low_rank) {
      blk.dense.push_back(i);
      continue;
    }
    if (cf.a.cols() == 0) continue;
    blk.a_all.middleCols(col, cf.a.cols()) = cf.a;
    blk.b_all.middleCols(col, cf.b.cols()) = cf.b;
    col += cf.a.cols();
    blk.seg.push_back(static_cast<std::size_t>(col));
    blk.seg_var.push_back(cf.var);
    cf.dense.resize(0, 0);
  }
}

Reduced reduce(const Raw& raw, const Elimination& el, bool feasibility) {
  Reduced red;
  const int n = raw.n;
  const int mz = el.identity ? n : static_cast<int>(el.null.cols());
  red.m = mz + (feasibility ? 1 : 0);

  // Transformed objective.
  Vector cz = el.identity ? raw.c : Vector(el.null.transpose() * raw.c);
  red.offset = raw.c.dot(el.y0);

  // Block data in z coordinates (before scaling).
  std::vector<std::map<int, Matrix>> bcoef(raw.blocks.size());
  for (std::size_t bi = 0; bi < raw.blocks.size(); ++bi) {
    const RawBlock& rb = raw.blocks[bi];
    Block blk;
    blk.dim = rb.dim;
    blk.origin = rb.origin;
    blk.f0 = rb.f0;
    if (el.identity) {
      bcoef[bi] = rb.coef;
    } else {
      for (const auto& [s, m] : rb.coef) {
        if (el.y0(s) != 0.0) blk.f0 += el.y0(s) * m;
        for (int z = 0; z < mz; ++z) {
          const double w = el.null(s, z);
          if (w == 0.0) continue;
          auto it = bcoef[bi].find(z);
          if (it == bcoef[bi].end()) {
            bcoef[bi].emplace(z, w * m);
          } else {
            it->second += w * m;
          }
        }
      }
    }
    red.blocks.push_back(std::move(blk));
  }

  const int nlp = static_cast<int>(raw.lps.size()) + (feasibility ? 1 : 0);
  red.lp_f0 = Vector::Zero(nlp);
  red.lp_a = Matrix::Zero(nlp, red.m);
  red.lp_scale = Vector::Ones(nlp);
  for (int r = 0; r < static_cast<int>(raw.lps.size()); ++r) {
    const RawLp& lp = raw.lps[r];
    red.lp_origin.push_back(lp.origin);
    red.lp_f0(r) = lp.f0;
    for (const auto& [s, v] : lp.coef) {
      if (el.identity) {
        red.lp_a(r, s) += v;
      } else {
        red.lp_f0(r) += v * el.y0(s);
        red.lp_a.row(r).head(mz) += v * el.null.row(s);
      }
    }
  }

  // Variable scaling: unit norm columns.
  red.var_scale = Vector::Ones(red.m);
  Vector sq = Vector::Zero(mz);
  for (const auto& bc : bcoef) {
    for (const auto& [z, m] : bc) sq(z) += m.squaredNorm();
  }
  for (int z = 0; z < mz; ++z) {
    sq(z) += red.lp_a.col(z).squaredNorm();
    red.var_scale(z) = sq(z) > 0 ? 1.0 / std::sqrt(sq(z)) : 1.0;
  }
  for (auto& bc : bcoef) {
    for (auto& [z, m] : bc) m *= red.var_scale(z);
  }
  for (int z = 0; z < mz; ++z) red.lp_a.col(z) *= red.var_scale(z);
  red.c = Vector::Zero(red.m);
  for (int z = 0; z < mz; ++z) red.c(z) = cz(z) * red.var_scale(z);

  // Block (row) scaling.
  for (std::size_t bi = 0; bi < red.blocks.size(); ++bi) {
    Block& blk = red.blocks[bi];
    double nrm = blk.f0.norm();
    for (const auto& [z, m] : bcoef[bi]) nrm = std::max(nrm, m.norm());
    blk.scale = nrm > 0 ? 1.0 / nrm : 1.0;
    blk.f0 *= blk.scale;
    for (auto& [z, m] : bcoef[bi]) {
      m *= blk.scale;
      Coef cf;
      cf.var = z;
      cf.dense = std::move(m);
      blk.coefs.push_back(std::move(cf));
    }
  }
  for (int r = 0; r < static_cast<int>(raw.lps.size()); ++r) {
    const double nrm = std::max(std::fabs(red.lp_f0(r)), red.lp_a.row(r).cwiseAbs().maxCoeff());
    red.lp_scale(r) = nrm > 0 ? 1.0 / nrm : 1.0;
    red.lp_f0(r) *= red.lp_scale(r);
    red.lp_a.row(r) *= red.lp_scale(r);
  }

  if (feasibility) {
    const int t = mz;
    red.margin_var = t;
    for (auto& blk : red.blocks) {
      Coef cf;
      cf.var = t;
      cf.dense = -Matrix::Identity(blk.dim, blk.dim);
      blk.coefs.push_back(std::move(cf));
    }
    for (int r = 0; r < static_cast<int>(raw.lps.size()); ++r) red.lp_a(r, t) = -1.0;
    const int cap = nlp - 1;
    red.lp_origin.push_back({Origin::Kind::kMarginCap, 0, 0});
    red.lp_f0(cap) = 1.0;
    red.lp_a(cap, t) = -1.0;
    red.c(t) = -1.0;
  }

  red.total_dim = nlp;
  for (auto& blk : red.blocks) {
    layout(blk);
    red.total_dim += blk.dim;
  }
  return red;
}

// ---------------------------------------------------------------------------
// Interior-point machinery.

struct Iterate {
  std::vector<Matrix> x, s;
  Vector xl, sl;
  Vector y;
};

double inner(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    v += kernels::dot(std::span<const double>(a[i].data(), a[i].size()),
                      std::span<const double>(b[i].data(), b[i].size()));
  }
  return v;
}

// Σ yᵢ Fᵢ for one block.
Matrix apply_at(const Block& blk, const Vector& y) {
  Matrix out = Matrix::Zero(blk.dim, blk.dim);
  if (blk.a_all.cols() > 0) {
    Vector w(blk.a_all.cols());
    for (std::size_t sgm = 0; sgm + 1 < blk.seg.size(); ++sgm) {
      w.segment(blk.seg[sgm], blk.seg[sgm + 1] - blk.seg[sgm])
          .setConstant(y(blk.seg_var[sgm]));
    }
    out.noalias() += blk.a_all * w.asDiagonal() * blk.b_all.transpose();
  }
  for (int di : blk.dense) {
    const Coef& cf = blk.coefs[di];
    const double v = y(cf.var);
    if (v == 0.0) continue;
    kernels::axpy(v, std::span<const double>(cf.dense.data(), cf.dense.size()),
                  std::span<double>(out.data(), out.size()));
  }
  return 0.5 * (out + out.transpose());
}

// ⟨Fᵢ, M⟩ for all i, accumulated into out.
void apply_a(const Block& blk, const Matrix& m, Vector& out) {
  if (blk.a_all.cols() > 0) {
    Matrix ma = m * blk.a_all;
    for (std::size_t sgm = 0; sgm + 1 < blk.seg.size(); ++sgm) {
      double acc = 0.0;
      for (std::size_t t = blk.seg[sgm]; t < blk.seg[sgm + 1]; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        acc += kernels::dot(
            std::span<const double>(blk.b_all.col(ti).data(), blk.dim),
            std::span<const double>(ma.col(ti).data(), blk.dim));
      }
      out(blk.seg_var[sgm]) += acc;
    }
  }
  for (int di : blk.dense) {
    const Coef& cf = blk.coefs[di];
    out(cf.var) += kernels::dot(
        std::span<const double>(cf.dense.data(), cf.dense.size()),
        std::span<const double>(m.data(), m.size()));
  }
}

void add_schur(const Block& blk, const Matrix& x, const Matrix& sinv, Matrix& h) {
  const Eigen::Index k = blk.a_all.cols();
  const std::size_t nseg = blk.seg_var.size();
  if (k > 0) {
    Matrix xa = x * blk.a_all;
    Matrix sa = sinv * blk.a_all;
    Matrix m1 = blk.b_all.transpose() * xa;
    Matrix m2t = (blk.b_all.transpose() * sa).transpose();
    std::vector<double> out(nseg * nseg);
    kernels::segment_hadamard_sum(
        std::span<const double>(m1.data(), m1.size()),
        std::span<const double>(m2t.data(), m2t.size()),
        static_cast<std::size_t>(k), blk.seg, out);
    for (std::size_t u = 0; u < nseg; ++u) {
      for (std::size_t v = 0; v < nseg; ++v) {
        h(blk.seg_var[u], blk.seg_var[v]) += out[u + nseg * v];
      }
    }
  }
  for (std::size_t p = 0; p < blk.dense.size(); ++p) {
    const Coef& ci = blk.coefs[blk.dense[p]];
    Matrix g = sinv * ci.dense * x;
    Matrix gt = g.transpose();
    for (std::size_t q = 0; q < blk.dense.size(); ++q) {
      const Coef& cj = blk.coefs[blk.dense[q]];
      h(ci.var, cj.var) += kernels::dot(
          std::span<const double>(cj.dense.data(), cj.dense.size()),
          std::span<const double>(gt.data(), gt.size()));
    }
    if (k > 0) {
      Matrix ga = g * blk.a_all;
      for (std::size_t sgm = 0; sgm < nseg; ++sgm) {
        double acc = 0.0;
        for (std::size_t t = blk.seg[sgm]; t < blk.seg[sgm + 1]; ++t) {
          const auto ti = static_cast<Eigen::Index>(t);
          acc += kernels::dot(
              std::span<const double>(blk.b_all.col(ti).data(), blk.dim),
              std::span<const double>(ga.col(ti).data(), blk.dim));
        }
        h(ci.var, blk.seg_var[sgm]) += acc;
        h(blk.seg_var[sgm], ci.var) += acc;
      }
    }
  }
}

// Largest α ≤ cap with M + αD ⪰ 0 (M ≻ 0).
double max_step(const Matrix& m, const Matrix& d) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  Matrix l = llt.matrixL();
  Matrix t = l.triangularView<Eigen::Lower>().solve(d);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0 ? kInf : -1.0 / lmin;
}

double max_step_lp(const Vector& v, const Vector& d) {
  double a = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (d(i) < 0) a = std::min(a, -v(i) / d(i));
  }
  return a;
}

Matrix inverse_spd(const Matrix& m, bool& ok) {
  Eigen::LLT<Matrix> llt(m);
  ok = llt.info() == Eigen::Success;
  if (!ok) return Matrix();
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

bool is_psd(const Matrix& m) {
  if (m.rows() == 0) return true;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

// ---------------------------------------------------------------------------

Vector recover_y(const Reduced& red, const Elimination& el, const Vector& zs) {
  const int mz = red.margin_var >= 0 ? red.m - 1 : red.m;
  Vector z = zs.head(mz).cwiseProduct(red.var_scale.head(mz));
  if (el.identity) return z;
  return el.y0 + el.null * z;
}

// Maps internal duals back to user-facing matrices and computes Σ-sums for
// the stationarity and objective checks in original slot space.
void export_duals(const SdpProblem& p, const Raw& raw, const Reduced& red,
                  const Iterate& it, double norm, std::vector<Matrix>& cduals,
                  std::vector<Matrix>& vduals, Vector& g) {
  cduals.assign(p.constraints().size(), Matrix());
  vduals.assign(p.scalars().size() + p.matrices().size(), Matrix());
  for (std::size_t k = 0; k < p.constraints().size(); ++k) {
    const int d = p.constraints()[k].dim;
    cduals[k] = Matrix::Zero(d, d);
  }
  for (std::size_t k = 0; k < p.scalars().size(); ++k) {
    if (p.scalars()[k].sign == Sign::kNonnegative) vduals[k] = Matrix::Zero(1, 1);
  }
  for (std::size_t k = 0; k < p.matrices().size(); ++k) {
    const auto& v = p.matrices()[k];
    if (v.cone != Cone::kSymmetric) {
      vduals[p.scalars().size() + k] = Matrix::Zero(v.dim, v.dim);
    }
  }
  auto place = [&](const Origin& o, const Matrix& z) {
    switch (o.kind) {
      case Origin::Kind::kConstraint:
        cduals[o.index] = z;
        break;
      case Origin::Kind::kMatrixCone:
        vduals[p.scalars().size() + o.index] = z;
        break;
      case Origin::Kind::kScalarSign:
        vduals[o.index] = z;
        break;
      case Origin::Kind::kDiagonalCone:
        vduals[p.scalars().size() + o.index](o.entry, o.entry) = z(0, 0);
        break;
      case Origin::Kind::kMarginCap:
        break;
    }
  };
  for (std::size_t b = 0; b < red.blocks.size(); ++b) {
    place(red.blocks[b].origin, it.x[b] * (red.blocks[b].scale / norm));
  }
  for (Eigen::Index r = 0; r < it.xl.size(); ++r) {
    Matrix z(1, 1);
    z(0, 0) = it.xl(r) * red.lp_scale(r) / norm;
    place(red.lp_origin[r], z);
  }
  // g_i = Σ ⟨Z, F_i⟩ over cone constraints, original slots.
  g = Vector::Zero(raw.n);
  for (std::size_t b = 0; b < raw.blocks.size(); ++b) {
    const Matrix z = red.blocks[b].scale / norm * it.x[b];
    for (const auto& [s, m] : raw.blocks[b].coef) g(s) += (z.array() * m.array()).sum();
  }
  for (std::size_t r = 0; r < raw.lps.size(); ++r) {
    const double z = it.xl(static_cast<Eigen::Index>(r)) * red.lp_scale(r) / norm;
    for (const auto& [s, v] : raw.lps[r].coef) g(s) += z * v;
  }
}

void export_equality_duals(const Raw& raw, const Vector& mu,
                           std::vector<Matrix>& cduals) {
  for (std::size_t r = 0; r < raw.eq_src.size(); ++r) {
    const auto [k, a, b] = raw.eq_src[r];
    const double v = mu(static_cast<Eigen::Index>(r));
    if (a == b) {
      cduals[k](a, a) = v;
    } else {
      cduals[k](a, b) = 0.5 * v;
      cduals[k](b, a) = 0.5 * v;
    }
  }
}

// Scales so that the cone multipliers have unit total trace and fills in
// the violation −Σ⟨Z, constant⟩.
void normalize_certificate(const SdpProblem& p, InfeasibilityCertificate& cert) {
  double tr = 0.0;
  for (std::size_t k = 0; k < p.constraints().size(); ++k) {
    if (p.constraints()[k].relation == Relation::kPsd && cert.constraint_duals[k].size() > 0) {
      tr += cert.constraint_duals[k].trace();
    }
  }
  for (const auto& z : cert.variable_duals) {
    if (z.size() > 0) tr += z.trace();
  }
  const double nrm = tr > 0 ? tr : 1.0;
  double c0 = 0.0;
  for (std::size_t k = 0; k < p.constraints().size(); ++k) {
    auto& z = cert.constraint_duals[k];
    z /= nrm;
    if (z.size() > 0) c0 += (z.array() * p.constraints()[k].constant.to_dense().array()).sum();
  }
  for (std::size_t k = 0; k < cert.variable_duals.size(); ++k) {
    auto& z = cert.variable_duals[k];
    z /= nrm;
    if (k >= p.scalars().size() && z.size() > 0) {
      c0 -= p.matrices()[k - p.scalars().size()].margin * z.trace();
    }
  }
  cert.violation = -c0;
}

double worst_violation(const SdpProblem& p, const Vector& y) {
  double worst = 0.0;
  for (int k = 0; k < static_cast<int>(p.constraints().size()); ++k) {
    const auto& lmi = p.constraints()[k];
    if (lmi.dim == 0) continue;
    Matrix m = p.evaluate(k, y);
    const double scale = 1.0 + max_abs(lmi.constant.to_dense());
    double v;
    if (lmi.relation == Relation::kZero) {
      v = max_abs(m);
    } else {
      v = std::max(0.0, -min_eigenvalue_sym(m));
    }
    worst = std::max(worst, v / scale);
  }
  Values vals = p.from_slots(y);
  for (std::size_t k = 0; k < p.scalars().size(); ++k) {
    if (p.scalars()[k].sign == Sign::kNonnegative) {
      worst = std::max(worst, -vals.scalars[k]);
    }
  }
  for (std::size_t k = 0; k < p.matrices().size(); ++k) {
    const auto& v = p.matrices()[k];
    if (v.cone == Cone::kSymmetric || v.dim == 0) continue;
    const Matrix& m = vals.matrices[k];
    const double lmin = v.cone == Cone::kDiagonalPsd ? m.diagonal().minCoeff()
                                                      : min_eigenvalue_sym(m);
    worst = std::max(worst, (v.margin - lmin) / (1.0 + v.margin));
  }
  return worst;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  SdpSolution sol;
  const bool feasibility = !problem.has_objective();
  const Raw raw = flatten(problem);
  const Elimination el = eliminate(raw);

  auto finish_point = [&](const Vector& y) {
    sol.slots = y;
    sol.values = problem.from_slots(y);
    sol.objective = problem.objective_value(y);
    sol.primal_residual = worst_violation(problem, y);
  };

  if (!el.consistent) {
    sol.status = Status::kInfeasible;
    sol.message = "linear equality constraints are inconsistent";
    InfeasibilityCertificate cert;
    cert.constraint_duals.assign(problem.constraints().size(), Matrix());
    for (std::size_t k = 0; k < problem.constraints().size(); ++k) {
      const int d = problem.constraints()[k].dim;
      cert.constraint_duals[k] = Matrix::Zero(d, d);
    }
    cert.variable_duals.assign(problem.scalars().size() + problem.matrices().size(), Matrix());
    // Eᵀμ = 0 and μᵀf ≠ 0: scale so that the certificate's constant part is −1.
    Vector mu = el.inconsistency;
    const double fm = mu.dot(raw.eq_rhs);
    mu /= fm;
    export_equality_duals(raw, -mu, cert.constraint_duals);
    cert.violation = 1.0;
    sol.certificate = std::move(cert);
    finish_point(el.y0);
    return sol;
  }

  Reduced red = reduce(raw, el, feasibility);
  const int m = red.m;
  const int nb = static_cast<int>(red.blocks.size());
  const int nlp = static_cast<int>(red.lp_f0.size());

  if (m == 0 || (nb == 0 && nlp == 0)) {
    const Vector y = recover_y(red, el, Vector::Zero(m));
    finish_point(y);
    sol.status = sol.primal_residual <= opts.tol ? Status::kFeasible : Status::kInfeasible;
    if (!feasibility && sol.status == Status::kFeasible) sol.status = Status::kOptimal;
    sol.message = "no free decision variables";
    return sol;
  }

  // Initial point (SDPT3-style scaling).
  Iterate it;
  it.y = Vector::Zero(m);
  double cmax = 0.0;
  for (int i = 0; i < m; ++i) cmax = std::max(cmax, std::fabs(red.c(i)));
  for (const auto& blk : red.blocks) {
    const double d = blk.dim;
    const double xi = std::max({10.0, std::sqrt(d), d * (1.0 + cmax)});
    const double eta = std::max({10.0, std::sqrt(d), 1.0 + blk.f0.norm()});
    it.x.push_back(xi * Matrix::Identity(blk.dim, blk.dim));
    it.s.push_back(eta * Matrix::Identity(blk.dim, blk.dim));
  }
  it.xl = Vector::Constant(nlp, std::max(10.0, 1.0 + cmax));
  it.sl = Vector::Constant(nlp, 10.0);

  const double c_norm = red.c.norm();
  double f0_norm = red.lp_f0.squaredNorm();
  for (const auto& blk : red.blocks) f0_norm += blk.f0.squaredNorm();
  f0_norm = std::sqrt(f0_norm);

  enum class Exit { kNone, kConverged, kFeasiblePoint, kStalled, kMaxIter, kUnbounded, kDualRay };
  Exit exit = Exit::kNone;
  int stall = 0;
  int frozen = 0;
  // Lowest-objective acceptable iterate of an optimization run; late
  // iterates can lose accuracy when the optimum is not attained.
  struct Snapshot {
    Iterate it;
    double pinf = kInf, dinf = kInf, gap = kInf, pobj = kInf;
  } best;
  double last_pobj = kInf;
  // Objective of the best snapshot when it last improved noticeably.
  double progress_pobj = kInf;
  int progress_iter = 0;
  double best_t = -kInf;
  double pinf = kInf, dinf = kInf, rgap = kInf;
  int iter = 0;

  std::vector<Matrix> sinv(nb), rd(nb);
  Vector rdl;

  for (iter = 0; iter < opts.max_iters; ++iter) {
    // Residuals.
    Vector ax = Vector::Zero(m);
    double rd_sq = 0.0;
    for (int b = 0; b < nb; ++b) {
      apply_a(red.blocks[b], it.x[b], ax);
      rd[b] = red.blocks[b].f0 + apply_at(red.blocks[b], it.y) - it.s[b];
      rd_sq += rd[b].squaredNorm();
    }
    ax += red.lp_a.transpose() * it.xl;
    rdl = red.lp_f0 + red.lp_a * it.y - it.sl;
    rd_sq += rdl.squaredNorm();
    const Vector rp = red.c - ax;

    double xs = inner(it.x, it.s) + it.xl.dot(it.sl);
    const double mu = xs / red.total_dim;
    const double pobj = red.c.dot(it.y);
    double dobj = -red.lp_f0.dot(it.xl);
    for (int b = 0; b < nb; ++b) dobj -= (red.blocks[b].f0.array() * it.x[b].array()).sum();
    pinf = std::sqrt(rd_sq) / (1.0 + f0_norm);
    dinf = rp.norm() / (1.0 + c_norm);
    rgap = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));

    if (opts.verbose) {
      std::fprintf(stderr, "it %3d pobj % .8e dobj % .8e pinf %.2e dinf %.2e gap %.2e mu %.2e\n",
                   iter, pobj, dobj, pinf, dinf, rgap, mu);
    }

    if (feasibility) {
      const double t = it.y(red.margin_var);
      best_t = std::max(best_t, t);
      if (opts.stop_at_first_feasible && t > 0.0) {
        bool all = true;
        Vector yt = it.y;
        yt(red.margin_var) = 0.0;
        for (int b = 0; b < nb && all; ++b) {
          all = is_psd(red.blocks[b].f0 + apply_at(red.blocks[b], yt));
        }
        if (all) {
          Vector lv = red.lp_f0 + red.lp_a * yt;
          for (int r = 0; r < nlp; ++r) {
            if (red.lp_origin[r].kind == Origin::Kind::kMarginCap) continue;
            if (lv(r) < 0) all = false;
          }
        }
        if (all) {
          exit = Exit::kFeasiblePoint;
          break;
        }
      }
    }
    if (pinf <= opts.tol && dinf <= opts.tol && rgap <= opts.tol) {
      exit = Exit::kConverged;
      break;
    }
    // Objective frozen while the gap no longer closes.
    if (!feasibility) {
      if (pinf <= opts.tol && dinf <= 1e3 * opts.tol && rgap <= opts.accept_gap &&
          pobj < best.pobj) {
        best = {it, pinf, dinf, rgap, pobj};
        if (progress_pobj - pobj > 1e-7 * (1.0 + std::fabs(pobj))) {
          progress_pobj = pobj;
          progress_iter = iter;
        }
      }
      // The best acceptable point no longer improves.
      if (best.gap < kInf && iter - progress_iter >= 25) {
        exit = Exit::kStalled;
        break;
      }
      if (pinf <= opts.tol && std::fabs(pobj - last_pobj) <= 1e-10 * (1.0 + std::fabs(pobj))) {
        if (++frozen >= 15) {
          exit = Exit::kStalled;
          break;
        }
      } else {
        frozen = 0;
      }
      last_pobj = pobj;
    }
    if (max_abs(it.y) > 1e12) {
      exit = Exit::kUnbounded;
      break;
    }
    // Dual ray: X large with A(X) ≈ 0 and −⟨F0, X⟩ > 0 growing.
    if (dobj > 1e8 * (1.0 + std::fabs(pobj)) && dinf < 1e-6 * dobj) {
      exit = Exit::kDualRay;
      break;
    }

    // Schur complement.
    Matrix h = Matrix::Zero(m, m);
    bool ok = true;
    for (int b = 0; b < nb && ok; ++b) {
      sinv[b] = inverse_spd(it.s[b], ok);
      if (ok) add_schur(red.blocks[b], it.x[b], sinv[b], h);
    }
    if (!ok) {
      exit = Exit::kStalled;
      break;
    }
    const Vector dl = it.xl.cwiseQuotient(it.sl);
    h.noalias() += red.lp_a.transpose() * dl.asDiagonal() * red.lp_a;
    h = 0.5 * (h + h.transpose());
    Eigen::LLT<Matrix> chol(h);
    if (chol.info() != Eigen::Success) {
      const double reg = 1e-13 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
      h.diagonal().array() += reg;
      chol.compute(h);
      if (chol.info() != Eigen::Success) {
        exit = Exit::kStalled;
        break;
      }
    }

    // Direction for target μ_t and optional second-order correction.
    auto direction = [&](double mu_t, const std::vector<Matrix>* cx,
                         const std::vector<Matrix>* cs, const Vector* cxl,
                         const Vector* csl, Vector& dy, std::vector<Matrix>& dx,
                         std::vector<Matrix>& ds, Vector& dxl, Vector& dsl) {
      Vector rhs = -red.c;
      std::vector<Matrix> rmat(nb);
      for (int b = 0; b < nb; ++b) {
        Matrix r = mu_t * sinv[b] - it.x[b] * rd[b] * sinv[b];
        if (cx) r -= (*cx)[b] * (*cs)[b] * sinv[b];
        rmat[b] = 0.5 * (r + r.transpose());
        apply_a(red.blocks[b], rmat[b], rhs);
      }
      Vector rl = (mu_t - it.xl.cwiseProduct(rdl).array()).matrix().cwiseQuotient(it.sl);
      if (cxl) rl -= cxl->cwiseProduct(*csl).cwiseQuotient(it.sl);
      rhs += red.lp_a.transpose() * rl;
      dy = chol.solve(rhs);
      dx.resize(nb);
      ds.resize(nb);
      for (int b = 0; b < nb; ++b) {
        ds[b] = rd[b] + apply_at(red.blocks[b], dy);
        Matrix r = mu_t * sinv[b] - it.x[b] - it.x[b] * ds[b] * sinv[b];
        if (cx) r -= (*cx)[b] * (*cs)[b] * sinv[b];
        dx[b] = 0.5 * (r + r.transpose());
      }
      dsl = rdl + red.lp_a * dy;
      dxl = (mu_t - it.xl.array() * it.sl.array() - it.xl.array() * dsl.array())
                .matrix()
                .cwiseQuotient(it.sl);
      if (cxl) dxl -= cxl->cwiseProduct(*csl).cwiseQuotient(it.sl);
    };

    auto step_lengths = [&](const std::vector<Matrix>& dx, const std::vector<Matrix>& ds,
                            const Vector& dxl, const Vector& dsl, double& ap, double& ad) {
      ap = max_step_lp(it.xl, dxl);
      ad = max_step_lp(it.sl, dsl);
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(it.x[b], dx[b]));
        ad = std::min(ad, max_step(it.s[b], ds[b]));
      }
    };

    Vector dy;
    std::vector<Matrix> dx, ds;
    Vector dxl, dsl;
    direction(0.0, nullptr, nullptr, nullptr, nullptr, dy, dx, ds, dxl, dsl);
    double ap, ad;
    step_lengths(dx, ds, dxl, dsl, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xs_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      xs_aff += ((it.x[b] + ap * dx[b]).array() * (it.s[b] + ad * ds[b]).array()).sum();
    }
    xs_aff += (it.xl + ap * dxl).dot(it.sl + ad * dsl);
    const double mu_aff = std::max(0.0, xs_aff / red.total_dim);
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3);
    sigma = std::clamp(sigma, 0.0, 1.0);
    // Keep some centering while infeasible.
    if (pinf > 1e-3 || dinf > 1e-3) sigma = std::max(sigma, 0.1);

    std::vector<Matrix> dxa = dx, dsa = ds;
    Vector dxla = dxl, dsla = dsl;
    direction(sigma * mu, &dxa, &dsa, &dxla, &dsla, dy, dx, ds, dxl, dsl);
    step_lengths(dx, ds, dxl, dsl, ap, ad);
    const double gamma = 0.95;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (int b = 0; b < nb; ++b) {
      it.x[b] += ap * dx[b];
      it.s[b] += ad * ds[b];
      it.x[b] = 0.5 * (it.x[b] + it.x[b].transpose());
      it.s[b] = 0.5 * (it.s[b] + it.s[b].transpose());
    }
    it.xl += ap * dxl;
    it.sl += ad * dsl;
    it.y += ad * dy;

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stall >= 3) {
        exit = Exit::kStalled;
        break;
      }
    } else {
      stall = 0;
    }
  }
  if (exit == Exit::kNone) exit = Exit::kMaxIter;
  sol.iterations = iter;
  const bool final_ok = pinf <= opts.tol && dinf <= 1e3 * opts.tol && rgap <= opts.accept_gap;
  if (!feasibility && (exit == Exit::kStalled || exit == Exit::kMaxIter) && best.gap < kInf &&
      (!final_ok || best.pobj < red.c.dot(it.y))) {
    it = std::move(best.it);
    pinf = best.pinf;
    dinf = best.dinf;
    rgap = best.gap;
  }

  const Vector y = recover_y(red, el, it.y);
  finish_point(y);
  sol.duality_gap = rgap;
  if (feasibility) sol.margin = it.y(red.margin_var);

  // Multipliers in user form.
  auto build_duals = [&](double norm, const Vector& cvec) {
    Vector g;
    export_duals(problem, raw, red, it, norm, sol.constraint_duals, sol.variable_duals, g);
    const Vector mu_eq = equality_multipliers(raw, cvec - g);
    if (mu_eq.size() > 0) export_equality_duals(raw, mu_eq, sol.constraint_duals);
    Vector stat = cvec - g;
    if (mu_eq.size() > 0) stat -= raw.eq.transpose() * mu_eq;
    return stat.norm() / (1.0 + cvec.norm());
  };

  const double feas_thr = 10.0 * opts.tol;
  switch (exit) {
    case Exit::kFeasiblePoint:
      sol.status = Status::kFeasible;
      sol.message = "strictly feasible point found";
      break;
    case Exit::kConverged:
      if (feasibility) {
        const double t = it.y(red.margin_var);
        if (t >= -feas_thr) {
          sol.status = Status::kFeasible;
          sol.message = t >= 0 ? "feasible" : "feasible within tolerance";
        } else {
          sol.status = Status::kInfeasible;
          sol.message = "maximal margin is negative";
          InfeasibilityCertificate cert;
          Vector g;
          export_duals(problem, raw, red, it, 1.0, cert.constraint_duals, cert.variable_duals, g);
          const Vector mu_eq = equality_multipliers(raw, -g);
          if (mu_eq.size() > 0) export_equality_duals(raw, mu_eq, cert.constraint_duals);
          normalize_certificate(problem, cert);
          sol.certificate = std::move(cert);
        }
      } else {
        sol.status = Status::kOptimal;
        sol.message = "converged";
      }
      break;
    case Exit::kDualRay: {
      sol.status = Status::kInfeasible;
      sol.message = "dual improving ray detected";
      InfeasibilityCertificate cert;
      Vector g;
      export_duals(problem, raw, red, it, 1.0, cert.constraint_duals, cert.variable_duals, g);
      const Vector mu_eq = equality_multipliers(raw, -g);
      if (mu_eq.size() > 0) export_equality_duals(raw, mu_eq, cert.constraint_duals);
      normalize_certificate(problem, cert);
      sol.certificate = std::move(cert);
      break;
    }
    case Exit::kUnbounded:
      sol.status = Status::kNumericalFailure;
      sol.message = "iterates diverged (unbounded or ill-posed problem); try rescaling";
      break;
    case Exit::kStalled:
    case Exit::kMaxIter:
    case Exit::kNone: {
      const bool loose = pinf <= 1e3 * opts.tol && dinf <= 1e3 * opts.tol &&
                         rgap <= std::max(1e3 * opts.tol, opts.accept_gap);
      if (feasibility && it.y(red.margin_var) >= -feas_thr && sol.primal_residual <= feas_thr) {
        sol.status = Status::kFeasible;
        sol.message = "feasible (solver stopped before full convergence)";
      } else if (!feasibility && loose && sol.primal_residual <= feas_thr) {
        sol.status = Status::kFeasible;
        sol.message = "near-optimal feasible point (stalled before reaching tol)";
      } else {
        sol.status = Status::kNumericalFailure;
        sol.message = exit == Exit::kMaxIter
                          ? "iteration limit reached without convergence; try rescaling"
                          : "search direction broke down; try rescaling";
      }
      break;
    }
  }

  if (!feasibility && sol.status != Status::kInfeasible) {
    Vector cvec = raw.c;
    sol.dual_residual = build_duals(1.0, cvec);
  }
  return sol;
}

}  // namespace daecert::sdp
