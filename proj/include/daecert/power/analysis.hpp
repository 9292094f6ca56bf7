#pragma once

#include <string>
#include <vector>

#include "daecert/certify/certify.hpp"
#include "daecert/power/envelope.hpp"
#include "daecert/power/linearize.hpp"

namespace daecert::power {

struct RobustGainOptions {
  sdp::SolverOptions solver;
  double p_margin = 1e-6;
  double audit_factor = 10.0;
};

struct RobustGain {
  bool certified = false;
  double gamma = 0.0;
  Matrix p;
  /// Multiplier of the constraint term in the original scaling of [F G_v G_ξ].
  double lambda = 0.0;
  /// Per-term quadratic-constraint parameters: xs ⪰ 0, ys skew.
  std::vector<Matrix> xs, ys;
  sdp::SdpSolution solution;
  sdp::VerificationReport verification;
  std::string message;
};

/// Minimum-γ² program over P ≻ 0, λ ≥ 0, Xᵢ ⪰ 0, Yᵢ skew, in the variable
/// order (x, v, ξ, w):
///   [[A_clᵀP + P A_cl + CᵀC, P B_v, 0, P B_w], [B_vᵀP, 0, 0, 0],
///    [0, 0, 0, 0], [B_wᵀP, 0, 0, −γ²I]]
///     ⪯ λ NᵀN + [[0, 0, 0, 0], [0, −¼ΣJᵢXᵢJᵢᵀ, W, 0], [0, Wᵀ, X, 0], [0, 0, 0, 0]]
/// with N = [F G_v G_ξ 0]/s, W = −½[J₁Y₁ᵀ …], X = blkdiag(Xᵢ).  The scale s
/// is the largest entry of [F G_v G_ξ]; it only rescales λ.
sdp::SdpProblem assemble_robust_gain(const UncertaintyEnvelope& env,
                                     const ReducedPowerDae& red, const Matrix& k,
                                     double p_margin = 1e-6);

/// Solves the program above and audits the result with check_solution.
RobustGain certify_robust_gain(const UncertaintyEnvelope& env, const ReducedPowerDae& red,
                               const Matrix& k, const RobustGainOptions& opts = {});

struct GainValue {
  double gamma = 0.0;
  bool ok = false;
  std::string status;
};

/// Lossless minimum gain of the closed loop with constraint matrix g_v,
/// solved on the equivalent constraint 0 = G_v⁻¹F x + v.  G_v must be
/// invertible.
GainValue lossless_gain(const ReducedPowerDae& red, const Matrix& g_v, const Matrix& k,
                        const certify::CertifyOptions& opts = {});

struct LineGain {
  int line_id = 0;
  GainValue lmi;
  double oracle = 0.0;
  double oracle_omega = 0.0;
  /// |lmi − oracle| / oracle.
  double rel_error = 0.0;
};

/// Gain of the closed loop with `line_id` removed (no truncation), from the
/// LMI and from the frequency-sweep oracle.
LineGain per_line_hinf(const NetworkCase& c, const OperatingPoint& op, const Matrix& k,
                       int line_id, const certify::CertifyOptions& opts = {});
/// Same, reusing an assembled model.
LineGain per_line_hinf(const LinearizedPowerDae& lin, const ReducedPowerDae& red,
                       const Matrix& delta_g, const Matrix& k, int line_id,
                       const certify::CertifyOptions& opts = {});

struct SweepPoint {
  Vector theta;
  GainValue gain;
};

struct SweepReport {
  double step = 0.0;
  std::vector<double> axis;
  /// Grid order: last θ component varies fastest.
  std::vector<SweepPoint> points;
  double max_gamma = 0.0;
  Vector argmax;
  int failures = 0;
};

/// Grid values −1, −1 + step, …, 1 (1 always included).
std::vector<double> sweep_axis(double step);

/// Lossless gain at every grid point of [−1, 1]^r.  Points run on `jobs`
/// threads; results are stored in grid order.
SweepReport sweep_theta(const UncertaintyEnvelope& env, const ReducedPowerDae& red,
                        const Matrix& k, double step, int jobs = 1,
                        const certify::CertifyOptions& opts = {});

}  // namespace daecert::power
