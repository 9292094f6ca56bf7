#pragma once

#include "daecert/core/matrix.hpp"
#include "daecert/dae/linear_dae.hpp"

namespace daecert::dae {

enum class SupplyKind { kStability, kPassivity, kL2Gain, kCustom };

/// s(w, y) = [y; w]ᵀ X̃ [y; w], stored with its expansion over (x, v, w)
/// obtained from y = C x + D_v v.
struct QuadraticSupplyRate {
  SupplyKind kind = SupplyKind::kStability;
  double gamma = 0.0;
  /// (q + p) × (q + p).
  Matrix over_yw;
  Matrix xx, xv, xw, vv, vw, ww;

  /// Symmetric (n + m + p) form over [x; v; w].
  Matrix over_xvw() const;
  double evaluate(const Vector& x, const Vector& v, const Vector& w) const;
  double evaluate_yw(const Vector& y, const Vector& w) const;
};

/// passivity: s = wᵀy (requires p = q); l2gain: s = γ²wᵀw − yᵀy (γ > 0);
/// stability: s ≡ 0; custom: `over_yw` given.
QuadraticSupplyRate make_supply_rate(SupplyKind kind, const LinearDae& sys,
                                     double gamma = 0.0,
                                     const Matrix& over_yw = Matrix());

/// Expands an arbitrary (y, w) form through y = C x + D_v v.
QuadraticSupplyRate expand_supply(const Matrix& over_yw, const LinearDae& sys);

}  // namespace daecert::dae
