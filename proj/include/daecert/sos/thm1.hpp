#pragma once

#include <optional>
#include <string>
#include <vector>

#include "daecert/dae/polynomial_dae.hpp"
#include "daecert/dae/supply_rate.hpp"
#include "daecert/dae/uncertainty.hpp"
#include "daecert/sos/sos_program.hpp"

namespace daecert::sos {

/// s(w, h(x, v)) for the named supply kinds: stability 0, passivity wᵀh
/// (p = q), l2gain γ²wᵀw − hᵀh.
Polynomial supply_polynomial(dae::SupplyKind kind, const dae::PolynomialDae& sys, double gamma = 0.0);

/// [x; v; w]ᵀ X [x; v; w] for a quadratic supply expanded over (x, v, w).
Polynomial supply_polynomial(const dae::QuadraticSupplyRate& s, const dae::PolynomialDae& sys);

struct Thm1Options {
  int deg_v = 4;
  double epsilon = 1e-3;
};

struct Thm1Program {
  SosProgram program;
  /// Index of the storage unknown in program.polynomials().
  std::size_t storage = 0;
  sdp::ScalarId lambda;
  std::optional<sdp::ScalarId> tau;
  std::optional<sdp::MatrixId> p_delta;
  /// Filter state names, in order.
  std::vector<std::string> psi;
};

/// Storage V over x-monomials of degree 2..deg_v with
///   V − ε xᵀx ∈ Σ[x],
///   s + λ gᵀg + τ zᵀMz − ∇Vᵀf − ψᵀP_Δ r − rᵀP_Δψ ∈ Σ[(x, v, w, ξ, ψ)],
/// r = A_ψψ + B_ψ[x; v; ξ], z = C_ψψ + D_ψ[x; v; ξ].  The uncertainty must
/// carry a fixed multiplier (no free parameters); with kind none the τ and
/// filter terms are dropped.
Thm1Program build_thm1_sos_program(const dae::PolynomialDae& sys, const Polynomial& supply,
                                   const dae::UncertaintySpec& u, const Thm1Options& opts = {});

}  // namespace daecert::sos
