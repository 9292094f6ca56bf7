#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "daecert/core/matrix.hpp"

namespace daecert::dae {

/// Raised when a system expected to be stable shows growth.
class UnstableSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Semi-explicit linear DAE
///   ẋ = A x + B_v v + B_w w + B_ξ ξ
///   0 = F x + G_v v + G_w w + G_ξ ξ
///   y = C x + D_v v
/// with n states, m algebraic variables, p inputs, ℓ uncertainty outputs,
/// k constraint rows and q outputs.  Absent blocks are stored with the
/// matching zero dimension.
struct LinearDae {
  Matrix a, b_v, b_w, b_xi;
  Matrix f, g_v, g_w, g_xi;
  Matrix c, d_v;

  /// All-zero system with the given dimensions.
  static LinearDae zeros(int n, int m, int p, int l, int k, int q);

  int n() const { return static_cast<int>(a.rows()); }
  int m() const { return static_cast<int>(b_v.cols()); }
  int p() const { return static_cast<int>(b_w.cols()); }
  int l() const { return static_cast<int>(b_xi.cols()); }
  int k() const { return static_cast<int>(f.rows()); }
  int q() const { return static_cast<int>(c.rows()); }

  /// Throws InputError on inconsistent block sizes or non-finite entries.
  void check() const;
};

struct ValidationReport {
  bool dims_ok = false;
  /// G_v square and nonsingular.
  bool index_one = false;
  /// Polynomial systems only: f and g vanish at the declared equilibrium.
  bool equilibrium_ok = true;
  double equilibrium_residual = 0.0;
  std::vector<std::string> findings;
};

ValidationReport validate(const LinearDae& sys);

/// ẋ = A x + B w, y = C x + D w.
struct LinearOde {
  Matrix a, b, c, d;
};

/// Substitutes v = −G_v⁻¹(F x + G_w w).  Requires ℓ = 0 and G_v invertible.
LinearOde eliminate_algebraic(const LinearDae& sys);

/// Transfer matrix w → y at s = iω from the descriptor equations (ξ = 0).
ComplexMatrix frequency_response(const LinearDae& sys, double omega);
ComplexMatrix frequency_response(const LinearOde& sys, double omega);

/// Finite generalized eigenvalues of the pencil (blkdiag(I, 0), [[A, B_v],
/// [F, G_v]]).  Throws InputError when the pencil is singular.
ComplexVector finite_poles(const LinearDae& sys);

struct HinfOptions {
  double omega_min = 1e-4;
  double omega_max = 1e4;
  int grid_points = 400;
  /// Relative bracket width at which golden-section refinement stops.
  double refine_tol = 1e-10;
};

struct HinfResult {
  double gamma = 0.0;
  double omega = 0.0;
};

/// Peak singular value of the w → y response over a logarithmic grid with
/// local refinement.  Throws UnstableSystemError for poles with Re ≥ 0.
HinfResult hinf_oracle(const LinearDae& sys, const HinfOptions& opts = {});

struct Trajectory {
  Vector t;
  Matrix x;  // n × samples
  Matrix v;  // m × samples
  Matrix y;  // q × samples
  Vector energy_y;  // running ∫‖y‖²
  Vector energy_w;  // running ∫‖w‖²
  double max_algebraic_residual = 0.0;
};

using Signal = std::function<Vector(double)>;

/// Trapezoidal integration on [0, T] with the algebraic equation solved
/// exactly at every sample.  ξ is taken as zero.
Trajectory simulate(const LinearDae& sys, const Signal& w, const Vector& x0,
                    double dt, double horizon);

}  // namespace daecert::dae
