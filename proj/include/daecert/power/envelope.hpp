#pragma once

#include <map>
#include <vector>

#include "daecert/core/matrix.hpp"

namespace daecert::power {

/// Low-rank factor pair for one non-base contingency:
/// H Jᵀ ≈ ΔG_line − ΔG_base, with Jᵀu = 0 and JᵀJ = I.
struct EnvelopeTerm {
  int line_id = 0;
  Matrix h, j;
  /// Every singular value of the difference, non-increasing.
  Vector singular_values;
  /// σ_{rank+1}/σ₁ (0 when the difference has rank ≤ rank).
  double decay = 0.0;
  /// ‖H Jᵀ − (ΔG_line − ΔG_base)‖_F.
  double truncation_residual = 0.0;
};

/// Family of constraint matrices
///   G_v(θ) = G + ΔG_base + Σᵢ (1 − θᵢ)/2 · Hᵢ Jᵢᵀ,  θ ∈ [−1, 1]^r,
/// written as G_v v + G_ξ ξ with ξᵢ = −(θᵢ/2) Jᵢᵀ v.
struct UncertaintyEnvelope {
  int base_line = 0;
  int rank = 0;
  /// Nominal G + ΔG_base.
  Matrix g_base;
  /// g_base + ½ Σ Hᵢ Jᵢᵀ.
  Matrix g_v;
  /// [H₁ … H_r].
  Matrix g_xi;
  std::vector<EnvelopeTerm> terms;

  /// Constraint matrix at a point of the parameter box.
  Matrix constraint_at(const Vector& theta) const;
  /// θ of a listed contingency: all ones for the base, −1 in its own slot
  /// otherwise.
  Vector vertex(int line_id) const;
  /// Stacked [J₁ … J_r] (one block column per term).
  Matrix j_stack() const;
};

/// Builds the envelope from per-line perturbations.  `order` lists the
/// non-base lines in term order; `shift` is the uniform-angle direction u.
/// Throws InputError when rank exceeds the matrix size or a line is
/// missing.
UncertaintyEnvelope build_uncertainty_envelope(const Matrix& g,
                                               const std::map<int, Matrix>& delta_g,
                                               int base_line, const std::vector<int>& order,
                                               int rank, const Vector& shift);

/// Points t·𝟙 of the box where the constraint matrix is singular.  With
/// δ = −t/2 on every term, G_v(t·𝟙) = G_v(I − δ G_v⁻¹G_ξJᵀ), so each real
/// eigenvalue μ of −JᵀG_v⁻¹G_ξ with |μ| ≥ 2 gives t = −2/μ.  Sorted
/// ascending; empty when the diagonal is well posed.
std::vector<double> singular_diagonal_points(const UncertaintyEnvelope& env);

}  // namespace daecert::power
