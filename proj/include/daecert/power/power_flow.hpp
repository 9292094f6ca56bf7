#pragma once

#include "daecert/power/network_case.hpp"

namespace daecert::power {

struct PowerFlowOptions {
  double tol = 1e-8;
  int max_iters = 30;
};

/// Solved network plus generator internal quantities.  Bus vectors are in
/// file order; the split vectors follow NetworkCase::model_order().
struct OperatingPoint {
  Vector vm, va;
  /// Internal EMF magnitude and rotor angle per generator.
  Vector e, delta;
  Vector p_m;
  Vector v_g, theta_g, v_l, theta_l;
  /// ∞-norm of the P/Q mismatch over the solved equations [pu].
  double mismatch = 0.0;
  int iterations = 0;

  ComplexVector voltage() const;
};

/// Full complex injection mismatch S(V) − S_spec in file bus order, with
/// generator P at PV/slack buses and loads everywhere.
ComplexVector injection_mismatch(const NetworkCase& c, const ComplexMatrix& y,
                                 const ComplexVector& v);

/// Newton-Raphson in polar coordinates.  Generator reactive limits are not
/// enforced.  Throws PowerError when the mismatch does not reach tol.
OperatingPoint solve_power_flow(const NetworkCase& c, const PowerFlowOptions& opts = {});

}  // namespace daecert::power
