// Compiled with -mavx2 -mfma; only reached when the CPU reports both.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "daecert/kernels/kernels.hpp"

namespace daecert::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

bool supported() {
#if defined(__GNUC__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

std::size_t argmax_abs(const double* x, std::size_t n) {
  if (n < 8) return scalar::argmax_abs(x, n);
  // Lane-wise running maxima with their indices; ties resolved to the
  // smallest index to match the scalar reference.
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_set1_pd(-1.0);
  __m256d best_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d idx = best_idx;
  const __m256d four = _mm256_set1_pd(4.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i));
    const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double bv[4];
  alignas(32) double bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_pd(bi, best_idx);
  double best_val = -1.0;
  std::size_t best_pos = 0;
  for (int l = 0; l < 4; ++l) {
    const auto pos = static_cast<std::size_t>(bi[l]);
    if (bv[l] > best_val || (bv[l] == best_val && pos < best_pos)) {
      best_val = bv[l];
      best_pos = pos;
    }
  }
  for (; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > best_val) {
      best_val = v;
      best_pos = i;
    }
  }
  return best_pos;
}

void segment_hadamard_sum(const double* a, const double* b, std::size_t k,
                          const std::size_t* seg, std::size_t nseg,
                          double* out) {
  std::vector<double> col(k);
  for (std::size_t t = 0; t < nseg; ++t) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t j = seg[t]; j < seg[t + 1]; ++j) {
      const double* ac = a + k * j;
      const double* bc = b + k * j;
      double* c = col.data();
      std::size_t i = 0;
      for (; i + 4 <= k; i += 4) {
        _mm256_storeu_pd(c + i, _mm256_fmadd_pd(_mm256_loadu_pd(ac + i),
                                                _mm256_loadu_pd(bc + i),
                                                _mm256_loadu_pd(c + i)));
      }
      for (; i < k; ++i) c[i] += ac[i] * bc[i];
    }
    for (std::size_t s = 0; s < nseg; ++s) {
      double acc = 0.0;
      for (std::size_t i = seg[s]; i < seg[s + 1]; ++i) acc += col[i];
      out[s + nseg * t] = acc;
    }
  }
}

}  // namespace daecert::kernels::avx2
