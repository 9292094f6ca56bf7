#pragma once

#include <random>

#include "daecert/dae/linear_dae.hpp"

namespace daecert::fixtures {

inline Matrix gaussian(std::mt19937& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix x(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) x(i, j) = g(rng);
  return x;
}

// ẋ = −a x + w, y = x.
inline dae::LinearDae scalar_lowpass(double a = 1.0) {
  auto s = dae::LinearDae::zeros(1, 0, 1, 0, 0, 1);
  s.a(0, 0) = -a;
  s.b_w(0, 0) = 1.0;
  s.c(0, 0) = 1.0;
  return s;
}

// Random DAE with invertible G_v whose eliminated ODE has spectral
// abscissa −margin.  The ξ channel (l columns) enters with weight xi_scale.
inline dae::LinearDae random_dae(std::mt19937& rng, int n, int m, int p, int q, int l = 0,
                                 double margin = 0.5, double xi_scale = 0.3) {
  auto s = dae::LinearDae::zeros(n, m, p, l, m, q);
  s.b_v = gaussian(rng, n, m);
  s.b_w = gaussian(rng, n, p);
  s.b_xi = gaussian(rng, n, l, xi_scale);
  s.f = gaussian(rng, m, n);
  s.g_v = gaussian(rng, m, m) + 3.0 * Matrix::Identity(m, m);
  s.g_w = gaussian(rng, m, p);
  s.g_xi = gaussian(rng, m, l, xi_scale);
  s.c = gaussian(rng, q, n);
  s.d_v = gaussian(rng, q, m);
  const Matrix a = gaussian(rng, n, n);
  const Matrix eff = a - s.b_v * s.g_v.inverse() * s.f;
  s.a = a - (spectral_abscissa(eff) + margin) * Matrix::Identity(n, n);
  return s;
}

// ξ = θ v substituted into a system with m = ℓ.
inline dae::LinearDae substitute_gain(const dae::LinearDae& s, double theta) {
  auto out = dae::LinearDae::zeros(s.n(), s.m(), s.p(), 0, s.k(), s.q());
  out.a = s.a;
  out.b_v = s.b_v + theta * s.b_xi;
  out.b_w = s.b_w;
  out.f = s.f;
  out.g_v = s.g_v + theta * s.g_xi;
  out.g_w = s.g_w;
  out.c = s.c;
  out.d_v = s.d_v;
  return out;
}

}  // namespace daecert::fixtures
