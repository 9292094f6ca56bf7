#pragma once

#include <map>
#include <string>
#include <vector>

#include "daecert/core/matrix.hpp"

namespace daecert::sos {

using Exponent = std::vector<int>;

/// Graded-lex order: total degree first, then the exponent of the first
/// variable (larger first), then the second, and so on.
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

/// Sparse multivariate polynomial with real coefficients over an ordered
/// list of named variables.  Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<Exponent, double, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars);

  static Polynomial constant(double c, std::vector<std::string> vars = {});
  static Polynomial variable(const std::string& name);
  static Polynomial monomial(std::vector<std::string> vars, Exponent e, double c = 1.0);

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  int var_index(const std::string& name) const;  // −1 when absent

  /// Adds c·x^e (e sized to vars()).
  void add_term(const Exponent& e, double c);
  double coefficient(const Exponent& e) const;

  bool is_zero() const { return terms_.empty(); }
  /// Total degree; −1 for the zero polynomial.
  int degree() const;
  int degree_in(int var) const;
  /// Smallest total degree among the terms; −1 for zero.
  int min_degree() const;

  /// Same polynomial over `vars`, which must include every variable that
  /// occurs with a nonzero exponent.
  Polynomial with_vars(const std::vector<std::string>& vars) const;

  double evaluate(const Vector& point) const;  // point in vars() order
  double evaluate(const std::map<std::string, double>& point) const;

  Polynomial derivative(const std::string& var) const;
  /// Replaces variables by polynomials; unmapped variables stay.
  Polynomial substitute(const std::map<std::string, Polynomial>& subs) const;

  /// Drops terms with |c| ≤ tol.
  Polynomial pruned(double tol) const;
  double max_abs_coefficient() const;

  std::string to_string() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);
  Polynomial& operator+=(const Polynomial& o);

 private:
  std::vector<std::string> vars_;
  Terms terms_;
};

/// Ordered union (first-seen order).
std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

/// Gradient with respect to `wrt` (one partial per name).
std::vector<Polynomial> grad(const Polynomial& p, const std::vector<std::string>& wrt);

/// Σ aᵢ bᵢ.
Polynomial dot(const std::vector<Polynomial>& a, const std::vector<Polynomial>& b);

/// Parses "0.5*x1^2*v - 3 + (x2 + 1)^2".  Throws InputError with the
/// offending position.
Polynomial parse_polynomial(const std::string& text);

/// All monomials in `vars` variables of total degree ≤ max_deg, graded-lex
/// ascending (constant first).
std::vector<Exponent> monomial_basis(int vars, int max_deg);
/// Same, restricted to degrees in [min_deg, max_deg].
std::vector<Exponent> monomial_basis(int vars, int min_deg, int max_deg);

}  // namespace daecert::sos
