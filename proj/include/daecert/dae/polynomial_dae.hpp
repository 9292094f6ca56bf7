#pragma once

#include <string>
#include <vector>

#include "daecert/dae/linear_dae.hpp"
#include "daecert/sos/polynomial.hpp"

namespace daecert::dae {

/// ẋ = f(x, v, w, ξ), 0 = g(x, v, w, ξ), y = h(x, v) with polynomial data
/// over named variables.  The equilibrium is at x = 0, w = 0, ξ = 0 and
/// v = v0.
struct PolynomialDae {
  std::vector<std::string> x, v, w, xi;
  std::vector<sos::Polynomial> f, g, h;
  Vector v0;

  int n() const { return static_cast<int>(x.size()); }
  int m() const { return static_cast<int>(v.size()); }
  int p() const { return static_cast<int>(w.size()); }
  int l() const { return static_cast<int>(xi.size()); }
  int k() const { return static_cast<int>(g.size()); }
  int q() const { return static_cast<int>(h.size()); }

  /// Every variable name in (x, v, w, ξ) order.
  std::vector<std::string> all_vars() const;

  /// Throws InputError on duplicate names, wrong counts, or polynomials
  /// referring to undeclared variables (h may use x and v only).
  void check() const;
};

ValidationReport validate(const PolynomialDae& sys);

/// Same system written with polynomial data; ℓ must be 0.  Variables are
/// named x1.., v1.., w1...
PolynomialDae from_linear(const LinearDae& sys);

struct PolyTrajectory {
  Vector t;
  Matrix x;  // n × samples
  Matrix v;  // m × samples
  double max_algebraic_residual = 0.0;
};

/// Classical RK4 on the state with v solved by Newton at every stage
/// (ξ = 0).  Requires k = m.  Throws std::runtime_error when Newton fails.
PolyTrajectory simulate(const PolynomialDae& sys, const Signal& w, const Vector& x0, double dt,
                        double horizon);

}  // namespace daecert::dae
