#include <cmath>

#include "daecert/kernels/kernels.hpp"

namespace daecert::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

std::size_t argmax_abs(const double* x, std::size_t n) {
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

void segment_hadamard_sum(const double* a, const double* b, std::size_t k,
                          const std::size_t* seg, std::size_t nseg,
                          double* out) {
  for (std::size_t t = 0; t < nseg; ++t) {
    for (std::size_t s = 0; s < nseg; ++s) {
      double acc = 0.0;
      for (std::size_t j = seg[t]; j < seg[t + 1]; ++j) {
        const double* ac = a + k * j;
        const double* bc = b + k * j;
        for (std::size_t i = seg[s]; i < seg[s + 1]; ++i) acc += ac[i] * bc[i];
      }
      out[s + nseg * t] = acc;
    }
  }
}

}  // namespace daecert::kernels::scalar
