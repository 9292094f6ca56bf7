#pragma once

#include "daecert/dae/linear_dae.hpp"
#include "daecert/sdp/solver.hpp"

namespace daecert::power {

struct ControllerDesign {
  /// u = K x, entering like the disturbance (through B_w).
  Matrix k;
  /// Spectral abscissa of the eliminated closed loop A_e + B_w K.
  double abscissa = 0.0;
  /// The open loop already met the region, so K = 0 was kept.
  bool open_loop_sufficient = false;
};

/// State feedback placing the spectrum of the eliminated ODE
/// A_e = A − B_v G_v⁻¹ F in {Re z < −alpha}.  Solves
///   min ‖Y‖²  s.t.  A_e X + X A_eᵀ + B Y + Yᵀ Bᵀ + 2αX ≺ 0,  X ⪰ I,
/// and returns K = Y X⁻¹.  Throws PowerError when the LMI is infeasible or
/// the returned K misses the region.
ControllerDesign design_controller(const dae::LinearDae& sys, double alpha,
                                   const sdp::SolverOptions& solver = {});

}  // namespace daecert::power
