#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "daecert/sdp/check.hpp"
#include "daecert/sdp/problem.hpp"
#include "daecert/sdp/solver.hpp"
#include "daecert/sos/polynomial.hpp"

namespace daecert::sos {

/// Polynomial whose coefficients are affine in SDP decision slots:
/// p = constant + Σ_s y_s · linear[s].
struct AffinePolynomial {
  Polynomial constant;
  std::map<int, Polynomial> linear;

  /// Union of the variables of all parts.
  std::vector<std::string> vars() const;
  /// Every exponent that may carry a nonzero coefficient.
  std::vector<Exponent> support(const std::vector<std::string>& vars) const;
  Polynomial evaluate(const Vector& slots) const;

  AffinePolynomial& operator+=(const AffinePolynomial& o);
  AffinePolynomial& add(const Polynomial& p);
  AffinePolynomial& add(int slot, const Polynomial& p);
};

/// Unknown polynomial Σ c_k · m_k with one free scalar per monomial.
struct PolynomialUnknown {
  std::string name;
  std::vector<std::string> vars;
  std::vector<Exponent> monomials;
  std::vector<sdp::ScalarId> coeffs;

  AffinePolynomial as_affine(const sdp::SdpProblem& p) const;
  Polynomial value(const sdp::SdpProblem& p, const Vector& slots) const;
};

struct SosConstraint {
  std::string name;
  AffinePolynomial poly;
};

/// Gram basis reduction.  kNone keeps every monomial of total degree
/// between half the lowest and half the highest degree of the support.
/// kSupport also applies per-variable degree bounds and drops monomials
/// whose square cannot be matched.  kFacial additionally drops monomials
/// whose Gram diagonal the coefficient equalities pin to zero.  The
/// reductions are exact; near-boundary programs can still differ in the
/// status reported within tolerance.
enum class BasisPruning { kNone, kSupport, kFacial };

/// Decision variables live in `decisions`; SOS constraints are added on
/// top and turned into Gram blocks by `compile_sos`.
class SosProgram {
 public:
  sdp::SdpProblem& decisions() { return decisions_; }
  const sdp::SdpProblem& decisions() const { return decisions_; }

  const PolynomialUnknown& add_polynomial(std::string name, std::vector<std::string> vars,
                                          std::vector<Exponent> monomials);
  void add_sos(std::string name, AffinePolynomial poly);

  const std::vector<PolynomialUnknown>& polynomials() const { return polys_; }
  const std::vector<SosConstraint>& constraints() const { return sos_; }

  /// Largest Gram basis allowed per constraint.
  int max_gram_size = 400;
  BasisPruning pruning = BasisPruning::kNone;

 private:
  sdp::SdpProblem decisions_;
  std::vector<PolynomialUnknown> polys_;
  std::vector<SosConstraint> sos_;
};

struct GramBlock {
  std::string name;
  std::vector<std::string> vars;
  std::vector<Exponent> basis;
  sdp::MatrixId gram;
  /// Coefficient-matching equality per exponent, in support order.
  std::vector<Exponent> matched;
  std::vector<int> match_constraints;
};

struct CompiledSos {
  sdp::SdpProblem problem;
  std::vector<GramBlock> blocks;
  /// Set when a constraint cannot be SOS for any decision values.
  std::optional<std::string> infeasible_reason;
};

/// Gram-matrix compilation: each constraint p becomes Q ⪰ 0 with
/// zᵀQz = p coefficient-wise over a pruned half-degree basis z.
CompiledSos compile_sos(const SosProgram& program);

/// Basis used for one constraint (exposed for inspection and tests).
std::vector<Exponent> gram_basis(const AffinePolynomial& p, const std::vector<std::string>& vars,
                                 BasisPruning pruning = BasisPruning::kSupport);

struct GramReport {
  std::string name;
  std::vector<Exponent> basis;
  Matrix gram;
  double min_eigenvalue = 0.0;
  /// max |p_α − (zᵀQz)_α| over all exponents.
  double residual = 0.0;
};

struct SosCertificate {
  std::map<std::string, Polynomial> polynomials;
  std::map<std::string, double> scalars;
  std::map<std::string, Matrix> matrices;
  std::vector<GramReport> grams;
  double max_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
};

/// Reconstructs every constraint from its Gram matrix.  Throws
/// std::runtime_error when a residual exceeds `tol`.
SosCertificate extract_certificate(const SosProgram& program, const CompiledSos& compiled,
                                   const sdp::SdpSolution& solution, double tol = 1e-6);

/// Separating functional ℓ on monomials for an infeasible single-block
/// program: ℓ(z zᵀ) ⪰ 0 and ℓ(p) < 0.  Built from the solver's
/// infeasibility certificate.
struct SeparatingFunctional {
  std::map<Exponent, double, GradedLex> moments;
  Matrix moment_matrix;
  double min_eigenvalue = 0.0;
  double value_on_p = 0.0;
};
SeparatingFunctional separating_functional(const CompiledSos& compiled, std::size_t block,
                                           const sdp::InfeasibilityCertificate& cert,
                                           const Polynomial& p);

}  // namespace daecert::sos
