#include "daecert/power/analysis.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace daecert::power {

namespace {

std::string indexed(const std::string& base, int i) { return base + std::to_string(i + 1); }

}  // namespace

sdp::SdpProblem assemble_robust_gain(const UncertaintyEnvelope& env,
                                     const ReducedPowerDae& red, const Matrix& k,
                                     double p_margin) {
  const dae::LinearDae sys = red.system(env.g_v, k);
  const int n = sys.n(), m = sys.m(), p = sys.p();
  const int r = env.rank;
  const int nt = static_cast<int>(env.terms.size());
  const int l = r * nt;
  if (env.g_xi.cols() != l || env.g_v.rows() != m) throw InputError("envelope does not match the model");
  const int ov = n, ox = n + m, ow = n + m + l, dim = n + m + l + p;

  sdp::SdpProblem prob;
  const auto pm = prob.add_matrix("P", n, sdp::Cone::kPsd, p_margin);
  const auto lam = prob.add_scalar("lambda", sdp::Sign::kNonnegative);
  std::vector<sdp::MatrixId> xs;
  std::vector<std::vector<std::pair<std::pair<int, int>, sdp::ScalarId>>> ys(nt);
  for (int i = 0; i < nt; ++i) {
    xs.push_back(prob.add_matrix(indexed("X", i), r, sdp::Cone::kPsd));
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        const auto id = prob.add_scalar(indexed("Y", i) + "[" + std::to_string(a) + "," +
                                        std::to_string(b) + "]");
        ys[i].push_back({{a, b}, id});
      }
    }
  }
  const auto gsq = prob.add_scalar("gamma_sq", sdp::Sign::kNonnegative);

  const int c = prob.add_constraint("dissipation", dim);

  Matrix out_cost = Matrix::Zero(dim, dim);
  out_cost.topLeftCorner(n, n) = -sys.c.transpose() * sys.c;
  prob.add_constant(c, out_cost);

  prob.add_linear_map(c, pm, [&](const Matrix& e) -> Matrix {
    Matrix blk = Matrix::Zero(dim, dim);
    const Matrix pa = e * sys.a;
    blk.topLeftCorner(n, n) = -(pa + pa.transpose());
    const Matrix pbv = e * sys.b_v;
    blk.block(0, ov, n, m) = -pbv;
    blk.block(ov, 0, m, n) = -pbv.transpose();
    const Matrix pbw = e * sys.b_w;
    blk.block(0, ow, n, p) = -pbw;
    blk.block(ow, 0, p, n) = -pbw.transpose();
    return blk;
  });

  Matrix nmat = Matrix::Zero(m, dim);
  nmat.leftCols(n) = sys.f;
  nmat.block(0, ov, m, m) = sys.g_v;
  nmat.block(0, ox, m, l) = env.g_xi;
  const double s = std::max(1.0, max_abs(nmat));
  nmat /= s;
  prob.add_term(c, lam, nmat.transpose() * nmat);

  for (int i = 0; i < nt; ++i) {
    const Matrix& j = env.terms[i].j;
    prob.add_linear_map(c, xs[i], [&, i](const Matrix& e) -> Matrix {
      Matrix blk = Matrix::Zero(dim, dim);
      blk.block(ov, ov, m, m) = -0.25 * j * e * j.transpose();
      blk.block(ox + i * r, ox + i * r, r, r) = e;
      return blk;
    });
    for (const auto& [ab, id] : ys[i]) {
      // W block (v, ξᵢ) = −½ J Yᵀ = ½ J Y for skew Y.
      Matrix ymat = Matrix::Zero(r, r);
      ymat(ab.first, ab.second) = 1.0;
      ymat(ab.second, ab.first) = -1.0;
      const Matrix w = 0.5 * j * ymat;
      Matrix blk = Matrix::Zero(dim, dim);
      blk.block(ov, ox + i * r, m, r) = w;
      blk.block(ox + i * r, ov, r, m) = w.transpose();
      prob.add_term(c, id, blk);
    }
  }

  Matrix gain = Matrix::Zero(dim, dim);
  gain.bottomRightCorner(p, p).setIdentity();
  prob.add_term(c, gsq, gain);
  prob.set_objective({{gsq, 1.0}});
  return prob;
}

RobustGain certify_robust_gain(const UncertaintyEnvelope& env, const ReducedPowerDae& red,
                               const Matrix& k, const RobustGainOptions& opts) {
  const sdp::SdpProblem prob = assemble_robust_gain(env, red, k, opts.p_margin);
  RobustGain out;
  out.solution = sdp::solve(prob, opts.solver);
  out.message = out.solution.message;
  if (!out.solution.ok()) return out;

  out.verification = sdp::check_solution(prob, out.solution, opts.audit_factor * opts.solver.tol);
  const sdp::Values& v = out.solution.values;
  out.p = v.matrices[prob.find_matrix("P")->index];
  const double gsq = v.scalars[prob.find_scalar("gamma_sq")->index];
  out.gamma = std::sqrt(std::max(0.0, gsq));

  Matrix nmat(red.f.rows(), red.f.cols() + env.g_v.cols() + env.g_xi.cols());
  nmat << red.f, env.g_v, env.g_xi;
  const double s = std::max(1.0, max_abs(nmat));
  out.lambda = v.scalars[prob.find_scalar("lambda")->index] / (s * s);

  const int r = env.rank;
  for (std::size_t i = 0; i < env.terms.size(); ++i) {
    out.xs.push_back(v.matrices[prob.find_matrix(indexed("X", static_cast<int>(i)))->index]);
    Matrix y = Matrix::Zero(r, r);
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        const auto id = prob.find_scalar(indexed("Y", static_cast<int>(i)) + "[" +
                                         std::to_string(a) + "," + std::to_string(b) + "]");
        y(a, b) = v.scalars[id->index];
        y(b, a) = -y(a, b);
      }
    }
    out.ys.push_back(y);
  }
  out.certified = out.verification.pass;
  if (!out.certified) out.message = "solution failed the audit: " + out.message;
  return out;
}

GainValue lossless_gain(const ReducedPowerDae& red, const Matrix& g_v, const Matrix& k,
                        const certify::CertifyOptions& opts) {
  GainValue out;
  try {
    // 0 = G_v⁻¹F x + v has the same solutions and is far better conditioned
    // near the singular part of the envelope.
    dae::LinearDae sys = red.system(g_v, k);
    const Eigen::PartialPivLU<Matrix> lu(sys.g_v);
    sys.f = lu.solve(sys.f);
    sys.g_v.setIdentity();
    const auto res = certify::min_l2_gain(sys, dae::UncertaintySpec::none(), opts);
    out.status = certify::to_string(res.outcome);
    if (res.outcome == certify::Outcome::kCertified && res.certificate && res.certificate->gamma) {
      out.gamma = *res.certificate->gamma;
      out.ok = true;
    } else if (!res.message.empty()) {
      out.status += ": " + res.message;
    }
  } catch (const std::exception& e) {
    out.status = std::string("error: ") + e.what();
  }
  return out;
}

LineGain per_line_hinf(const LinearizedPowerDae& lin, const ReducedPowerDae& red,
                       const Matrix& delta_g, const Matrix& k, int line_id,
                       const certify::CertifyOptions& opts) {
  LineGain out;
  out.line_id = line_id;
  const Matrix g_v = lin.g + delta_g;
  out.lmi = lossless_gain(red, g_v, k, opts);
  const dae::HinfResult h = dae::hinf_oracle(red.system(g_v, k));
  out.oracle = h.gamma;
  out.oracle_omega = h.omega;
  out.rel_error = out.lmi.ok ? std::fabs(out.lmi.gamma - h.gamma) / h.gamma : INFINITY;
  return out;
}

LineGain per_line_hinf(const NetworkCase& c, const OperatingPoint& op, const Matrix& k,
                       int line_id, const certify::CertifyOptions& opts) {
  const LinearizedPowerDae lin = assemble_linearization(c, op);
  const ReducedPowerDae red = reduce(lin);
  const OutagePerturbation pert = line_outage_perturbation(c, op, line_id);
  return per_line_hinf(lin, red, pert.delta_g, k, line_id, opts);
}

std::vector<double> sweep_axis(double step) {
  if (!(step > 0.0) || step > 2.0) throw InputError("grid step must lie in (0, 2]");
  std::vector<double> axis;
  for (int i = 0;; ++i) {
    const double t = -1.0 + i * step;
    if (t > 1.0 - 1e-9) break;
    // Exact zero at the center despite rounding.
    axis.push_back(std::fabs(t) < 1e-12 ? 0.0 : t);
  }
  axis.push_back(1.0);
  return axis;
}

SweepReport sweep_theta(const UncertaintyEnvelope& env, const ReducedPowerDae& red,
                        const Matrix& k, double step, int jobs,
                        const certify::CertifyOptions& opts) {
  SweepReport rep;
  rep.step = step;
  rep.axis = sweep_axis(step);
  const int dims = static_cast<int>(env.terms.size());
  const std::size_t per_axis = rep.axis.size();
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= per_axis;

  rep.points.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vector theta(dims);
    std::size_t rest = idx;
    for (int d = dims - 1; d >= 0; --d) {
      theta(d) = rep.axis[rest % per_axis];
      rest /= per_axis;
    }
    rep.points[idx].theta = theta;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      SweepPoint& pt = rep.points[idx];
      pt.gain = lossless_gain(red, env.constraint_at(pt.theta), k, opts);
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& pt : rep.points) {
    if (!pt.gain.ok) {
      ++rep.failures;
      continue;
    }
    if (rep.argmax.size() == 0 || pt.gain.gamma > rep.max_gamma) {
      rep.max_gamma = pt.gain.gamma;
      rep.argmax = pt.theta;
    }
  }
  return rep;
}

}  // namespace daecert::power
