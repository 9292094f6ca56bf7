#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

#include "daecert/dae/linear_dae.hpp"

namespace daecert::dae {

namespace {

double peak_gain(const LinearDae& sys, double omega) {
  const ComplexMatrix h = frequency_response(sys, omega);
  if (h.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  return svd.singularValues()(0);
}

// Golden-section maximization of the gain on [lo, hi].
std::pair<double, double> refine(const LinearDae& sys, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = peak_gain(sys, c), fd = peak_gain(sys, d);
  while (b - a > tol * std::max(1.0, b)) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = peak_gain(sys, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = peak_gain(sys, d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

}  // namespace

HinfResult hinf_oracle(const LinearDae& sys, const HinfOptions& opts) {
  sys.check();
  if (sys.l() > 0) throw InputError("hinf_oracle requires a system without ξ");
  const ComplexVector poles = finite_poles(sys);
  for (Eigen::Index i = 0; i < poles.size(); ++i) {
    if (poles(i).real() >= -1e-9 * (1.0 + std::abs(poles(i)))) {
      throw UnstableSystemError("system has a pole with nonnegative real part: " +
                                std::to_string(poles(i).real()));
    }
  }

  std::vector<double> grid{0.0};
  const double l0 = std::log10(opts.omega_min), l1 = std::log10(opts.omega_max);
  for (int i = 0; i < opts.grid_points; ++i) {
    grid.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (opts.grid_points - 1)));
  }
  for (Eigen::Index i = 0; i < poles.size(); ++i) {
    const double w = std::fabs(poles(i).imag());
    if (w > 0) grid.push_back(w);
  }
  grid.push_back(1e3 * opts.omega_max);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = peak_gain(sys, grid[i]);

  HinfResult best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (vals[i] > best.gamma) best = {vals[i], grid[i]};
  }
  // Refine around every local maximum within 50% of the best sample.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool left = i == 0 || vals[i] >= vals[i - 1];
    const bool right = i + 1 == grid.size() || vals[i] >= vals[i + 1];
    if (!left || !right || vals[i] < 0.5 * best.gamma) continue;
    const double lo = i == 0 ? grid[0] : grid[i - 1];
    const double hi = i + 1 == grid.size() ? grid[i] : grid[i + 1];
    if (hi <= lo) continue;
    const auto [w, g] = refine(sys, lo, hi, opts.refine_tol);
    if (g > best.gamma) best = {g, w};
  }
  return best;
}

}  // namespace daecert::dae
