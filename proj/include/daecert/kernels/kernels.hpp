#pragma once

// Data-parallel inner loops of the SDP solver.  Every routine has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant.  The variant
// is chosen once at startup from the CPU feature flags; tests run both paths
// and compare.

#include <cstddef>
#include <span>
#include <string_view>

namespace daecert::kernels {

enum class Isa { kScalar, kAvx2 };

/// Sum of a[i] * b[i].
double dot(std::span<const double> a, std::span<const double> b);

/// y[i] += alpha * x[i].
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Index of the entry with largest magnitude (first one on ties).  Returns
/// 0 for an empty span.
std::size_t argmax_abs(std::span<const double> x);

/// Segment sums of a Hadamard product of two column-major K×K matrices.
///
/// `seg` holds S+1 offsets partitioning [0, K).  For every segment pair
/// (s, t) the routine computes
///     out[s + S*t] = sum_{i in seg s} sum_{j in seg t} a[i + K*j] * b[i + K*j]
/// and writes it to the column-major S×S matrix `out`.
void segment_hadamard_sum(std::span<const double> a, std::span<const double> b,
                          std::size_t k, std::span<const std::size_t> seg,
                          std::span<double> out);

/// The instruction set used by the dispatched entry points above.
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Forces a particular variant.  Requesting kAvx2 on a CPU without AVX2
/// leaves the scalar path active and returns false.
bool force_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
std::size_t argmax_abs(const double* x, std::size_t n);
void segment_hadamard_sum(const double* a, const double* b, std::size_t k,
                          const std::size_t* seg, std::size_t nseg,
                          double* out);
}  // namespace scalar

namespace avx2 {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
std::size_t argmax_abs(const double* x, std::size_t n);
void segment_hadamard_sum(const double* a, const double* b, std::size_t k,
                          const std::size_t* seg, std::size_t nseg,
                          double* out);
}  // namespace avx2

}  // namespace daecert::kernels
