#pragma once

#include <optional>

#include "daecert/dae/linear_dae.hpp"
#include "daecert/power/power_flow.hpp"

namespace daecert::power {

/// Swing dynamics in (dδ, dω) coupled to the network through
///   0 = F̄ [dδ; dω] + G v,   v = [dV_G; dθ_G; dV_L; dθ_L].
/// Constraint rows are [real parts; imaginary parts], each in model bus
/// order.
struct LinearizedPowerDae {
  int n_gen = 0;
  int n_load = 0;
  Matrix a_bar, b_v_bar, b_w_bar, f_bar, g, c_bar;

  /// [𝟙; 0] in state coordinates.
  Vector state_shift() const;
  /// [0; 𝟙; 0; 𝟙] in algebraic coordinates.
  Vector angle_shift() const;
};

/// Y + blkdiag(Y_d, Y_L) in model bus order.  Loads become constant
/// impedances conj(S)/|V|² at the operating voltage, including loads at
/// generator buses.
ComplexMatrix augmented_admittance(const NetworkCase& c, const OperatingPoint& op,
                                   std::optional<int> skip_branch = std::nullopt);

/// ∂/∂v of the stacked network equations for a given augmented admittance.
Matrix constraint_jacobian(const ComplexMatrix& y_aug, const OperatingPoint& op);

/// Nonlinear network equations [Re; Im] of y_aug·Ṽ − [Y_d·Ẽ; 0] with E held
/// at the operating point.
Vector network_equations(const NetworkCase& c, const OperatingPoint& op,
                         const ComplexMatrix& y_aug, const Vector& delta, const Vector& v);

/// Stacked algebraic vector at the operating point.
Vector algebraic_point(const OperatingPoint& op);

/// Throws PowerError when G is numerically singular.
LinearizedPowerDae assemble_linearization(const NetworkCase& c, const OperatingPoint& op);

struct JacobianAudit {
  /// ‖G − G_fd‖_F / ‖G‖_F.
  double g_rel = 0.0;
  /// Same for the rotor-angle columns of F̄.
  double f_rel = 0.0;
};

/// Central finite differences of network_equations at the operating point.
JacobianAudit audit_jacobians(const NetworkCase& c, const OperatingPoint& op,
                              const LinearizedPowerDae& lin, double step = 1e-6);

struct ZeroModeResiduals {
  /// ‖Ā[𝟙;0] + B̄_v[0;𝟙;0;𝟙]‖∞: the shift leaves ω̇ unchanged.
  double dynamics = 0.0;
  /// ‖F̄[𝟙;0] + G[0;𝟙;0;𝟙]‖∞.
  double constraint = 0.0;
  /// ‖C̄[𝟙;0]‖∞.
  double output = 0.0;
  double max() const;
};

/// Residuals relative to the largest entry of the blocks involved.  `g`
/// replaces the nominal G when given.
ZeroModeResiduals zero_mode_residuals(const LinearizedPowerDae& lin,
                                      const Matrix* g = nullptr);

/// Shift-free coordinates x = Qᵀ[dδ; dω] with Q spanning ker [𝟙ᵀ 0].
struct ReducedPowerDae {
  Matrix q, a, b_v, b_w, f, c;

  /// ẋ = (A + B_w K) x + B_v v + B_w w,  0 = F x + G_v v,  y = C x.
  /// K may be empty (open loop).
  dae::LinearDae system(const Matrix& g_v, const Matrix& k = Matrix()) const;
};

ReducedPowerDae reduce(const LinearizedPowerDae& lin);

/// Descriptor form of the unreduced model with constraint matrix g_v.
dae::LinearDae unreduced_system(const LinearizedPowerDae& lin, const Matrix& g_v);

struct OutagePerturbation {
  int line_id = 0;
  /// Shift-consistent change of G: ΔG_raw (I − uuᵀ/uᵀu).
  Matrix delta_g;
  /// ‖ΔG_raw u‖∞ before projection.
  double raw_shift_residual = 0.0;
  /// ‖ΔG − ΔG_raw‖_F / ‖ΔG_raw‖_F.
  double projection_change = 0.0;
};

/// Change of G when `line_id` is removed at the same operating point.
/// Throws ConnectivityError when the line is a bridge.
OutagePerturbation line_outage_perturbation(const NetworkCase& c, const OperatingPoint& op,
                                            int line_id);

}  // namespace daecert::power
