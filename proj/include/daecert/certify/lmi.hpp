#pragma once

#include "daecert/dae/linear_dae.hpp"
#include "daecert/dae/supply_rate.hpp"
#include "daecert/dae/uncertainty.hpp"
#include "daecert/sdp/problem.hpp"

namespace daecert::certify {

/// Name of the single dissipation LMI in every assembled problem.
inline constexpr const char* kDissipation = "dissipation";

struct AssemblyOptions {
  /// P ⪰ margin·I.
  double p_margin = 1e-6;
  /// Adds a nonnegative scalar "gamma_sq" entering +γ²·I on the w block.
  /// Pair it with a supply whose w-block carries no gain term.
  bool gain_variable = false;
};

/// Filtered (dynamic IQC) dissipation LMI, block order (x, v, ξ | w | ψ).
/// Variables, in order: P, lambda, tau or the multiplier parameters,
/// P_delta (when the filter has states), gamma_sq (optional).
sdp::SdpProblem assemble_filtered_lmi(const dae::LinearDae& sys,
                                      const dae::QuadraticSupplyRate& s,
                                      const dae::UncertaintySpec& u,
                                      const AssemblyOptions& opts = {});

/// Pointwise quadratic-constraint LMI, block order (x, v, ξ, w).
sdp::SdpProblem assemble_pointwise_lmi(const dae::LinearDae& sys,
                                       const dae::QuadraticSupplyRate& s,
                                       const dae::UncertaintySpec& u,
                                       const AssemblyOptions& opts = {});

/// Lossless S-procedure LMI, block order (x, v, w).  Requires ℓ = 0.
sdp::SdpProblem assemble_lossless_lmi(const dae::LinearDae& sys,
                                      const dae::QuadraticSupplyRate& s,
                                      const AssemblyOptions& opts = {});

/// Plant ẋ = A x + B_u u + B_w w, y = C x.
struct Plant {
  Matrix a, b_u, b_w, c;
};

/// Controller with an implicit layer
///   ẋ_k = A_k x_k + B_ξ ξ + B_y y,
///   u   = C_u x_k + D_uξ ξ + D_uy y,
///   v   = C_v x_k + D_vξ ξ + D_vy y,   ξ = φ(v) with φ in sector [0, 1].
struct ImplicitController {
  Matrix a_k, b_xi, b_y;
  Matrix c_u, d_uxi, d_uy;
  Matrix c_v, d_vxi, d_vy;
};

/// kBoundOnOutput: CᵀC on the state block, −γ²I on w (the orientation used
/// by the gain problems elsewhere).  kAsPrinted: γ²CᵀC and −I.
enum class GainConvention { kBoundOnOutput, kAsPrinted };

/// Closed loop as a linear DAE: x = [x_p; x_k], algebraic v with G_v = −I,
/// ξ channel with G_ξ = D_vξ, output y = C_p x_p.  Throws InputError on
/// mismatched blocks.  D_vξ is never inverted.
dae::LinearDae closed_loop(const Plant& plant, const ImplicitController& k);

/// Implicit-network gain LMI over (x, w, v, ξ) with P ⪰ εI, diagonal
/// Λ ⪰ εI and λ ≥ 0.
sdp::SdpProblem assemble_implicit_nn_lmi(
    const Plant& plant, const ImplicitController& k, double gamma,
    GainConvention convention = GainConvention::kBoundOnOutput,
    double margin = 1e-6);

}  // namespace daecert::certify
