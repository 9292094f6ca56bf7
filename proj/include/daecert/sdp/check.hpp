#pragma once

#include <string>
#include <vector>

#include "daecert/sdp/problem.hpp"
#include "daecert/sdp/solver.hpp"

namespace daecert::sdp {

struct ConstraintCheck {
  std::string name;
  /// "lmi", "equality", "cone" or "sign".
  std::string kind;
  /// λ_min for ⪰-constraints and cones; −max|entry| for equalities.
  double min_eigenvalue = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<ConstraintCheck> checks;
  /// Smallest min_eigenvalue over all checks.
  double worst = 0.0;
  /// Objective minus dual objective, recomputed from the returned duals.
  /// Only set for optimal solutions of problems with an objective.
  bool gap_checked = false;
  double duality_gap = 0.0;
  bool pass = false;
};

/// Re-evaluates every constraint at the solution values.  A block passes
/// when λ_min ≥ −tol·(1 + max|constant|).
VerificationReport check_solution(const SdpProblem& problem,
                                  const SdpSolution& solution, double tol);

struct CertificateAudit {
  /// Largest |Σ⟨Z, Fᵢ⟩| over decision slots, relative to the multiplier size.
  double stationarity = 0.0;
  /// Smallest eigenvalue over multipliers of ⪰-constraints and cones.
  double min_eigenvalue = 0.0;
  /// −Σ⟨Z, constant⟩; positive for a valid certificate.
  double violation = 0.0;
  bool pass = false;
};

/// Independent audit of a Farkas certificate against the problem data.
CertificateAudit audit_certificate(const SdpProblem& problem,
                                   const InfeasibilityCertificate& cert,
                                   double tol);

}  // namespace daecert::sdp
