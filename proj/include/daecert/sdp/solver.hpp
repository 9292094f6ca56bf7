#pragma once

#include <optional>
#include <string>
#include <vector>

#include "daecert/sdp/problem.hpp"

namespace daecert::sdp {

enum class Status { kOptimal, kFeasible, kInfeasible, kNumericalFailure };

std::string to_string(Status s);

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 200;
  /// Feasibility problems stop at the first iterate that satisfies every
  /// constraint (min eigenvalue ≥ 0).  Disable to drive the margin problem
  /// to optimality instead.
  bool stop_at_first_feasible = true;
  /// A stalled optimization whose decision point is feasible is reported as
  /// kFeasible when its relative duality gap is below this bound.  Needed
  /// when the optimum is approached but not attained (a multiplier diverges).
  double accept_gap = 1e-3;
  bool verbose = false;
};

/// Farkas-type certificate of infeasibility: multipliers Zₖ for every
/// constraint (PSD for ⪰-constraints and cones, free for equalities) such
/// that the decision coefficients cancel and the constant part is negative.
struct InfeasibilityCertificate {
  std::vector<Matrix> constraint_duals;
  std::vector<Matrix> variable_duals;
  /// −Σ⟨Zₖ, constant⟩ after normalization Σ tr Zₖ(cones) = 1; positive.
  double violation = 0.0;
};

struct SdpSolution {
  Status status = Status::kNumericalFailure;
  Values values;
  Vector slots;
  double objective = 0.0;
  /// Largest constraint violation of the decision point (max of −λ_min over
  /// ⪰-constraints and cones, max |entry| over equalities, scaled by
  /// 1 + ‖constant‖).
  double primal_residual = 0.0;
  /// Relative stationarity residual of the returned multipliers.
  double dual_residual = 0.0;
  /// Relative duality gap (optimization problems only).
  double duality_gap = 0.0;
  int iterations = 0;
  /// Dual matrices per constraint and per variable cone (empty for free
  /// variables).
  std::vector<Matrix> constraint_duals;
  std::vector<Matrix> variable_duals;
  std::optional<InfeasibilityCertificate> certificate;
  /// Best margin t with F(y) ⪰ t·I reached by a feasibility solve.
  double margin = 0.0;
  std::string message;

  bool ok() const {
    return status == Status::kOptimal || status == Status::kFeasible;
  }
};

/// Primal-dual interior-point solve (HKM direction, Mehrotra
/// predictor-corrector).  Single-threaded; no global state.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts = {});

}  // namespace daecert::sdp
