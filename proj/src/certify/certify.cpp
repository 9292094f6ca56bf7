#include "daecert/certify/certify.hpp"

#include <cmath>
#include <regex>

namespace daecert::certify {

using dae::UncertaintyKind;

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kCertified:
      return "certified";
    case Outcome::kInfeasible:
      return "infeasible";
    case Outcome::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

sdp::SdpProblem assemble(const dae::LinearDae& sys, const dae::QuadraticSupplyRate& s,
                         const dae::UncertaintySpec& u, const AssemblyOptions& opts) {
  switch (u.kind) {
    case UncertaintyKind::kNone:
      if (sys.l() == 0) return assemble_lossless_lmi(sys, s, opts);
      return assemble_filtered_lmi(sys, s, u, opts);
    case UncertaintyKind::kPointwise:
      return assemble_pointwise_lmi(sys, s, u, opts);
    case UncertaintyKind::kHardIqc:
      return assemble_filtered_lmi(sys, s, u, opts);
  }
  throw InputError("unknown uncertainty kind");
}

Certificate extract_certificate(const sdp::SdpProblem& problem, const sdp::SdpSolution& sol) {
  Certificate cert;
  const auto& vals = sol.values;
  bool has_tau = false;
  std::map<std::string, std::vector<std::pair<std::pair<int, int>, double>>> skew;
  static const std::regex skew_name(R"((.+)\[(\d+),(\d+)\])");
  for (std::size_t i = 0; i < problem.scalars().size(); ++i) {
    const auto& name = problem.scalars()[i].name;
    const double v = vals.scalars[i];
    std::smatch mt;
    if (name == "lambda") {
      cert.lambda = v;
    } else if (name == "tau") {
      cert.tau = v;
      has_tau = true;
    } else if (name == "gamma_sq") {
      cert.gamma = std::sqrt(std::max(v, 0.0));
    } else if (std::regex_match(name, mt, skew_name)) {
      skew[mt[1]].push_back({{std::stoi(mt[2]), std::stoi(mt[3])}, v});
    } else {
      cert.qc_params[name] = Matrix::Constant(1, 1, v);
    }
  }
  for (const auto& [name, entries] : skew) {
    int dim = 0;
    for (const auto& e : entries) dim = std::max(dim, e.first.second + 1);
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& [ij, v] : entries) {
      m(ij.first, ij.second) = v;
      m(ij.second, ij.first) = -v;
    }
    cert.qc_params[name] = m;
  }
  for (std::size_t i = 0; i < problem.matrices().size(); ++i) {
    const auto& name = problem.matrices()[i].name;
    if (name == "P") {
      cert.p = vals.matrices[i];
    } else if (name == "P_delta") {
      cert.p_delta = vals.matrices[i];
    } else {
      cert.qc_params[name] = vals.matrices[i];
    }
  }
  if (!has_tau && !cert.qc_params.empty()) cert.tau = 1.0;
  return cert;
}

CertifyResult solve_and_audit(const sdp::SdpProblem& problem, const CertifyOptions& opts) {
  CertifyResult res;
  res.solution = sdp::solve(problem, opts.solver);
  const auto& sol = res.solution;
  res.message = sol.message;
  if (sol.ok()) {
    Certificate cert = extract_certificate(problem, sol);
    cert.verification = sdp::check_solution(problem, sol, opts.audit_factor * opts.solver.tol);
    if (!cert.verification.pass) {
      res.outcome = Outcome::kNumericalFailure;
      res.message = "solver reported '" + sol.message +
                    "' but the certificate fails the audit; try rescaling the model";
    } else {
      res.outcome = Outcome::kCertified;
    }
    res.certificate = std::move(cert);
    return res;
  }
  if (sol.status == sdp::Status::kInfeasible) {
    res.outcome = Outcome::kInfeasible;
    if (sol.certificate) {
      res.infeasibility_audit =
          sdp::audit_certificate(problem, *sol.certificate, opts.audit_factor * opts.solver.tol);
    }
    return res;
  }
  res.outcome = Outcome::kNumericalFailure;
  if (res.message.find("rescal") == std::string::npos) {
    res.message += "; try rescaling the model (states, inputs or outputs)";
  }
  return res;
}

CertifyResult certify(const dae::LinearDae& sys, const dae::QuadraticSupplyRate& s,
                      const dae::UncertaintySpec& u, const CertifyOptions& opts) {
  return solve_and_audit(assemble(sys, s, u, opts.assembly), opts);
}

CertifyResult min_l2_gain(const dae::LinearDae& sys, const dae::UncertaintySpec& u,
                          const CertifyOptions& opts) {
  sys.check();
  if (sys.p() == 0 || sys.q() == 0) throw InputError("gain needs at least one input and one output");

  // Gain ≤ γ for w ↔ gain ≤ 1 for w = γ·w'; the scaled form stays well conditioned.
  dae::LinearDae scaled = sys;
  scaled.b_w /= kUnboundedGain;
  scaled.g_w /= kUnboundedGain;
  const auto bounded = dae::make_supply_rate(dae::SupplyKind::kL2Gain, scaled, 1.0);
  CertifyOptions first = opts;
  first.solver.stop_at_first_feasible = true;
  CertifyResult pre = certify(scaled, bounded, u, first);
  if (pre.outcome == Outcome::kInfeasible) {
    pre.message = "gain unbounded as modeled (no certificate at gamma = 1e6): " + pre.message;
    return pre;
  }
  if (pre.outcome == Outcome::kNumericalFailure) return pre;

  const int q = sys.q(), p = sys.p();
  Matrix over_yw = Matrix::Zero(q + p, q + p);
  over_yw.topLeftCorner(q, q) = -Matrix::Identity(q, q);
  const auto output_only = dae::expand_supply(over_yw, sys);
  AssemblyOptions aopts = opts.assembly;
  aopts.gain_variable = true;
  sdp::SdpProblem prob = assemble(sys, output_only, u, aopts);
  prob.set_objective({{*prob.find_scalar("gamma_sq"), 1.0}});
  CertifyResult res = solve_and_audit(prob, opts);
  if (res.outcome == Outcome::kInfeasible) {
    res.outcome = Outcome::kNumericalFailure;
    res.message = "gain problem reported infeasible after a feasible pre-check: " + res.message;
  }
  return res;
}

}  // namespace daecert::certify
