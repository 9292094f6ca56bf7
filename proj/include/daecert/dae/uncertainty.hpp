#pragma once

#include <functional>
#include <string>
#include <vector>

#include "daecert/core/matrix.hpp"

namespace daecert::dae {

enum class UncertaintyKind { kNone, kHardIqc, kPointwise };

/// ψ̇ = A ψ + B [x; v; ξ],  z = C ψ + D [x; v; ξ].
/// A static filter has zero states: A is 0×0, C is r×0.
struct Filter {
  Matrix a, b, c, d;
  int states() const { return static_cast<int>(a.rows()); }
  int inputs() const { return static_cast<int>(d.cols()); }
  int outputs() const { return static_cast<int>(d.rows()); }
};

/// Structure of a free multiplier parameter.
enum class ParamKind {
  kSymmetric,     // free symmetric matrix
  kPsd,           // symmetric, ⪰ margin·I
  kDiagonalPsd,   // diagonal, entries ≥ margin
  kSkew,          // skew-symmetric, free
  kNonnegative,   // scalar ≥ 0 (dim 1)
};

/// One parameter of a multiplier family M(θ) = M₀ + Σ params.  The family
/// is linear by construction: `coeffs[k]` is the contribution of the k-th
/// basis element of the parameter (see `param_basis`).
struct MultiplierParam {
  std::string name;
  ParamKind kind = ParamKind::kPsd;
  int dim = 1;
  double margin = 0.0;
  std::vector<Matrix> coeffs;
};

/// Number of basis elements of a parameter of the given structure.
int param_basis_size(ParamKind kind, int dim);
/// k-th basis element: eᵢeⱼᵀ + eⱼeᵢᵀ (symmetric, upper triangle row-major),
/// eᵢeᵢᵀ (diagonal), eᵢeⱼᵀ − eⱼeᵢᵀ for i < j (skew), [1] (scalar).
Matrix param_basis(ParamKind kind, int dim, int k);

/// Builds a parameter from a map on its values.  The map is sampled on
/// the basis; throws InputError when it is not linear or not symmetric.
MultiplierParam make_param(std::string name, ParamKind kind, int dim,
                           double margin,
                           const std::function<Matrix(const Matrix&)>& map);

struct UncertaintySpec {
  UncertaintyKind kind = UncertaintyKind::kNone;
  Filter filter;
  /// Fixed multiplier; scaled by a free τ ≥ 0 when `params` is empty.
  Matrix m;
  /// Free family parameters; when present τ is fixed to 1.
  std::vector<MultiplierParam> params;

  static UncertaintySpec none();
  /// z = D [x; v; ξ] with a fixed M (D defaults to the identity).
  static UncertaintySpec pointwise(const Matrix& m, const Matrix& d);
  static UncertaintySpec hard_iqc(const Filter& filter, const Matrix& m);
  /// Sector-[0, 1] constraint on the (v, ξ) channels with a diagonal
  /// multiplier Λ ≻ 0: M = [[0, −Λ/2], [−Λ/2, Λ]].
  static UncertaintySpec sector(int n, int m, int l, double margin = 1e-6);

  bool tau_fixed() const { return !params.empty(); }
  int z_dim() const { return filter.outputs(); }

  /// M at the given parameter values (one matrix per parameter).
  Matrix multiplier(const std::vector<Matrix>& values) const;

  /// Throws InputError on inconsistent sizes, asymmetric M, or a
  /// non-Hurwitz dynamic filter.
  void check(int nx, int nv, int nl) const;
};

}  // namespace daecert::dae
