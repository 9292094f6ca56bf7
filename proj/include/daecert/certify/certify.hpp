#pragma once

#include <map>
#include <optional>
#include <string>

#include "daecert/certify/lmi.hpp"
#include "daecert/sdp/check.hpp"
#include "daecert/sdp/solver.hpp"

namespace daecert::certify {

struct Certificate {
  Matrix p;
  /// Empty when the constraint filter has no states.
  Matrix p_delta;
  double lambda = 0.0;
  /// 1 when the multiplier is a parameterized family, 0 without uncertainty.
  double tau = 0.0;
  /// Values of the multiplier-family parameters (skew parameters as full
  /// matrices).
  std::map<std::string, Matrix> qc_params;
  std::optional<double> gamma;
  sdp::VerificationReport verification;
};

enum class Outcome { kCertified, kInfeasible, kNumericalFailure };

std::string to_string(Outcome o);

struct CertifyOptions {
  AssemblyOptions assembly;
  sdp::SolverOptions solver;
  /// Certificates are audited at audit_factor × solver tolerance.
  double audit_factor = 10.0;
};

struct CertifyResult {
  Outcome outcome = Outcome::kNumericalFailure;
  std::optional<Certificate> certificate;
  sdp::SdpSolution solution;
  /// Audit of the Farkas certificate attached to an infeasible solve.
  std::optional<sdp::CertificateAudit> infeasibility_audit;
  std::string message;
};

/// Assembly selected by the uncertainty kind: lossless (none), pointwise,
/// or filtered (dynamic).
sdp::SdpProblem assemble(const dae::LinearDae& sys, const dae::QuadraticSupplyRate& s,
                         const dae::UncertaintySpec& u, const AssemblyOptions& opts = {});

/// Solves and audits an assembled dissipation problem.
CertifyResult solve_and_audit(const sdp::SdpProblem& problem, const CertifyOptions& opts = {});

CertifyResult certify(const dae::LinearDae& sys, const dae::QuadraticSupplyRate& s,
                      const dae::UncertaintySpec& u = dae::UncertaintySpec::none(),
                      const CertifyOptions& opts = {});

/// Gain above which a system counts as unbounded as modeled.
inline constexpr double kUnboundedGain = 1e6;

/// Minimizes γ² for the w → y gain.  Feasibility at kUnboundedGain is
/// checked first; failure there is reported as kInfeasible.
CertifyResult min_l2_gain(const dae::LinearDae& sys,
                          const dae::UncertaintySpec& u = dae::UncertaintySpec::none(),
                          const CertifyOptions& opts = {});

/// Reads the certificate variables back from a solved problem.
Certificate extract_certificate(const sdp::SdpProblem& problem, const sdp::SdpSolution& sol);

}  // namespace daecert::certify
