#include "daecert/sdp/check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace daecert::sdp {

namespace {

double constant_scale(const LmiConstraint& lmi) {
  double s = 0.0;
  for (const auto& e : lmi.constant.entries) s = std::max(s, std::fabs(e.v));
  return 1.0 + s;
}

}  // namespace

VerificationReport check_solution(const SdpProblem& problem,
                                  const SdpSolution& solution, double tol) {
  Vector y;
  try {
    y = problem.to_slots(solution.values);
  } catch (const InputError&) {
    throw InputError("check_solution: missing variable value");
  }
  VerificationReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  auto record = [&](ConstraintCheck c, double threshold) {
    c.pass = std::isfinite(c.min_eigenvalue) && c.min_eigenvalue >= -threshold;
    rep.worst = std::min(rep.worst, c.min_eigenvalue);
    rep.checks.push_back(std::move(c));
  };

  for (int k = 0; k < static_cast<int>(problem.constraints().size()); ++k) {
    const auto& lmi = problem.constraints()[k];
    if (lmi.dim == 0) continue;
    const Matrix m = problem.evaluate(k, y);
    ConstraintCheck c;
    c.name = lmi.name;
    if (lmi.relation == Relation::kZero) {
      c.kind = "equality";
      c.min_eigenvalue = -max_abs(m);
    } else {
      c.kind = "lmi";
      c.min_eigenvalue = min_eigenvalue_sym(m);
    }
    record(std::move(c), tol * constant_scale(lmi));
  }
  for (std::size_t k = 0; k < problem.scalars().size(); ++k) {
    const auto& v = problem.scalars()[k];
    if (v.sign != Sign::kNonnegative) continue;
    record({v.name, "sign", solution.values.scalars[k], false}, tol);
  }
  for (std::size_t k = 0; k < problem.matrices().size(); ++k) {
    const auto& v = problem.matrices()[k];
    if (v.cone == Cone::kSymmetric || v.dim == 0) continue;
    const Matrix& m = solution.values.matrices[k];
    const double lmin = v.cone == Cone::kDiagonalPsd ? m.diagonal().minCoeff()
                                                      : min_eigenvalue_sym(m);
    record({v.name, "cone", lmin - v.margin, false}, tol * (1.0 + v.margin));
  }
  if (rep.checks.empty()) rep.worst = 0.0;

  const bool have_duals =
      solution.constraint_duals.size() == problem.constraints().size() &&
      solution.variable_duals.size() ==
          problem.scalars().size() + problem.matrices().size();
  if (solution.status == Status::kOptimal && problem.has_objective() && have_duals) {
    double dual_obj = 0.0;
    for (std::size_t k = 0; k < problem.constraints().size(); ++k) {
      const Matrix& z = solution.constraint_duals[k];
      if (z.size() == 0) continue;
      dual_obj -= (z.array() * problem.constraints()[k].constant.to_dense().array()).sum();
    }
    for (std::size_t k = 0; k < problem.matrices().size(); ++k) {
      const Matrix& z = solution.variable_duals[problem.scalars().size() + k];
      if (z.size() > 0) dual_obj += problem.matrices()[k].margin * z.trace();
    }
    rep.gap_checked = true;
    rep.duality_gap = problem.objective_value(y) - dual_obj;
  }

  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const ConstraintCheck& c) { return c.pass; });
  if (rep.gap_checked) {
    const double obj = std::fabs(problem.objective_value(y));
    rep.pass = rep.pass && std::fabs(rep.duality_gap) <= tol * (1.0 + obj);
  }
  return rep;
}

CertificateAudit audit_certificate(const SdpProblem& problem,
                                   const InfeasibilityCertificate& cert,
                                   double tol) {
  if (cert.constraint_duals.size() != problem.constraints().size() ||
      cert.variable_duals.size() !=
          problem.scalars().size() + problem.matrices().size()) {
    throw InputError("audit_certificate: multiplier count mismatch");
  }
  CertificateAudit a;
  Vector g = Vector::Zero(problem.num_slots());
  double c0 = 0.0;
  double zmax = 0.0;
  a.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < problem.constraints().size(); ++k) {
    const auto& lmi = problem.constraints()[k];
    const Matrix& z = cert.constraint_duals[k];
    if (lmi.dim == 0 || z.size() == 0) continue;
    zmax = std::max(zmax, max_abs(z));
    if (lmi.relation == Relation::kPsd) {
      a.min_eigenvalue = std::min(a.min_eigenvalue, min_eigenvalue_sym(Matrix(0.5 * (z + z.transpose()))));
    }
    c0 += (z.array() * lmi.constant.to_dense().array()).sum();
    for (const auto& [s, coeff] : lmi.terms) {
      g(s) += (z.array() * coeff.to_dense().array()).sum();
    }
  }
  for (std::size_t k = 0; k < problem.scalars().size(); ++k) {
    const Matrix& z = cert.variable_duals[k];
    if (z.size() == 0) continue;
    a.min_eigenvalue = std::min(a.min_eigenvalue, z(0, 0));
    g(problem.scalars()[k].slot) += z(0, 0);
  }
  for (std::size_t k = 0; k < problem.matrices().size(); ++k) {
    const auto& v = problem.matrices()[k];
    const Matrix& z = cert.variable_duals[problem.scalars().size() + k];
    if (z.size() == 0 || v.dim == 0) continue;
    zmax = std::max(zmax, max_abs(z));
    a.min_eigenvalue = std::min(a.min_eigenvalue, min_eigenvalue_sym(Matrix(0.5 * (z + z.transpose()))));
    c0 -= v.margin * z.trace();
    for (int s = 0; s < v.num_slots(); ++s) {
      g(v.first_slot + s) += (z.array() * problem.basis(MatrixId{static_cast<int>(k)}, s).array()).sum();
    }
  }
  if (!std::isfinite(a.min_eigenvalue)) a.min_eigenvalue = 0.0;
  a.stationarity = g.size() > 0 ? max_abs(g) / std::max(1.0, zmax) : 0.0;
  a.violation = -c0;
  a.pass = a.min_eigenvalue >= -tol * std::max(1.0, zmax) &&
           a.stationarity <= std::max(1e-6, 100.0 * tol) && a.violation >= tol;
  return a;
}

}  // namespace daecert::sdp
