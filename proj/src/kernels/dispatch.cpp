#include <atomic>
#include <cassert>

#include "daecert/kernels/kernels.hpp"

namespace daecert::kernels {

namespace {

bool avx2_available() {
#if defined(DAECERT_HAVE_AVX2)
  static const bool ok = avx2::supported();
  return ok;
#else
  return false;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{avx2_available() ? Isa::kAvx2 : Isa::kScalar};
  return isa;
}

bool use_avx2() {
#if defined(DAECERT_HAVE_AVX2)
  return current().load(std::memory_order_relaxed) == Isa::kAvx2;
#else
  return false;
#endif
}

}  // namespace

#if !defined(DAECERT_HAVE_AVX2)
namespace avx2 {
bool supported() { return false; }
double dot(const double* a, const double* b, std::size_t n) {
  return scalar::dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  scalar::axpy(alpha, x, y, n);
}
std::size_t argmax_abs(const double* x, std::size_t n) {
  return scalar::argmax_abs(x, n);
}
void segment_hadamard_sum(const double* a, const double* b, std::size_t k,
                          const std::size_t* seg, std::size_t nseg,
                          double* out) {
  scalar::segment_hadamard_sum(a, b, k, seg, nseg, out);
}
}  // namespace avx2
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return use_avx2() ? avx2::dot(a.data(), b.data(), a.size())
                    : scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  if (use_avx2()) {
    avx2::axpy(alpha, x.data(), y.data(), x.size());
  } else {
    scalar::axpy(alpha, x.data(), y.data(), x.size());
  }
}

std::size_t argmax_abs(std::span<const double> x) {
  return use_avx2() ? avx2::argmax_abs(x.data(), x.size())
                    : scalar::argmax_abs(x.data(), x.size());
}

void segment_hadamard_sum(std::span<const double> a, std::span<const double> b,
                          std::size_t k, std::span<const std::size_t> seg,
                          std::span<double> out) {
  assert(a.size() == k * k && b.size() == k * k);
  assert(!seg.empty() && seg.back() == k);
  const std::size_t nseg = seg.size() - 1;
  assert(out.size() == nseg * nseg);
  if (use_avx2()) {
    avx2::segment_hadamard_sum(a.data(), b.data(), k, seg.data(), nseg,
                               out.data());
  } else {
    scalar::segment_hadamard_sum(a.data(), b.data(), k, seg.data(), nseg,
                                 out.data());
  }
}

Isa active_isa() { return current().load(); }

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool force_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !avx2_available()) {
    current().store(Isa::kScalar);
    return false;
  }
  current().store(isa);
  return true;
}

}  // namespace daecert::kernels
