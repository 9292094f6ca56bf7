#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "daecert/core/matrix.hpp"

namespace daecert::sdp {

enum class Sign { kFree, kNonnegative };

/// Cone attached to a symmetric matrix variable.  kPsd carries a margin:
/// the constraint is P ⪰ margin·I, which is how strict inequalities are
/// modelled.  kDiagonalPsd variables have only diagonal entries, each
/// ≥ margin.
enum class Cone { kSymmetric, kPsd, kDiagonalPsd };

/// An affine LMI is either required PSD or required to vanish.
enum class Relation { kPsd, kZero };

struct ScalarId {
  int index = -1;
  friend bool operator==(ScalarId, ScalarId) = default;
};
struct MatrixId {
  int index = -1;
  friend bool operator==(MatrixId, MatrixId) = default;
};

struct ScalarVariable {
  std::string name;
  Sign sign = Sign::kFree;
  int slot = 0;
};

struct MatrixVariable {
  std::string name;
  int dim = 0;
  Cone cone = Cone::kSymmetric;
  double margin = 0.0;
  int first_slot = 0;
  int num_slots() const {
    return cone == Cone::kDiagonalPsd ? dim : dim * (dim + 1) / 2;
  }
};

/// Upper-triangular coefficient list of a symmetric matrix.
struct SparseSym {
  struct Entry {
    int i = 0;
    int j = 0;  // i <= j
    double v = 0.0;
  };
  int dim = 0;
  std::vector<Entry> entries;

  static SparseSym from_dense(const Matrix& m, double drop_tol = 0.0);
  Matrix to_dense() const;
  bool empty() const { return entries.empty(); }
};

struct LmiConstraint {
  std::string name;
  int dim = 0;
  Relation relation = Relation::kPsd;
  SparseSym constant;
  /// Coefficient of every decision slot that appears in this constraint,
  /// keyed by slot index.
  std::map<int, SparseSym> terms;
};

/// Decision values in variable form.
struct Values {
  std::vector<double> scalars;
  std::vector<Matrix> matrices;
};

/// A semidefinite program over named scalar and symmetric-matrix variables
/// with affine matrix constraints and a linear objective (minimized).  With
/// no objective the problem is a feasibility problem.
///
/// Decision "slots" are the scalar unknowns: one per scalar variable and one
/// per upper-triangular entry (row-major) of each matrix variable, or one
/// per diagonal entry for kDiagonalPsd.  The basis element of slot (i, j) is
/// eᵢeⱼᵀ + eⱼeᵢᵀ for i ≠ j and eᵢeᵢᵀ on the diagonal.
class SdpProblem {
 public:
  ScalarId add_scalar(std::string name, Sign sign = Sign::kFree);
  MatrixId add_matrix(std::string name, int dim, Cone cone,
                      double margin = 0.0);

  int add_constraint(std::string name, int dim,
                     Relation relation = Relation::kPsd);

  /// constraint += m  (m symmetric, dim×dim).
  void add_constant(int constraint, const Matrix& m);
  /// constraint += s · m.
  void add_term(int constraint, ScalarId s, const Matrix& m);
  /// constraint += L(P) for a linear map L given by its action on basis
  /// elements.  `map` receives a dim(P)×dim(P) basis matrix and returns the
  /// constraint-sized contribution.
  void add_linear_map(int constraint, MatrixId p,
                      const std::function<Matrix(const Matrix&)>& map);
  /// constraint += Σ coeff · slot (raw slot access, used by compilers).
  void add_slot_term(int constraint, int slot, const SparseSym& coeff);

  void set_objective(std::vector<std::pair<ScalarId, double>> terms);
  void set_objective_slots(std::vector<std::pair<int, double>> terms);
  bool has_objective() const { return !objective_.empty(); }

  int num_slots() const { return num_slots_; }
  int slot(ScalarId s) const;
  int slot(MatrixId m, int i, int j) const;
  /// Basis matrix associated with a slot of matrix variable `m`.
  Matrix basis(MatrixId m, int local_slot) const;

  const std::vector<ScalarVariable>& scalars() const { return scalars_; }
  const std::vector<MatrixVariable>& matrices() const { return matrices_; }
  const std::vector<LmiConstraint>& constraints() const { return constraints_; }
  const std::vector<std::pair<int, double>>& objective() const {
    return objective_;
  }

  std::optional<ScalarId> find_scalar(const std::string& name) const;
  std::optional<MatrixId> find_matrix(const std::string& name) const;
  std::optional<int> find_constraint(const std::string& name) const;

  /// Slot vector ↔ variable values.
  Vector to_slots(const Values& v) const;
  Values from_slots(const Vector& y) const;

  /// Evaluates constraint c at the slot vector y.
  Matrix evaluate(int constraint, const Vector& y) const;
  double objective_value(const Vector& y) const;

  /// Dense coefficient of a slot in a constraint (zero if absent).
  Matrix coefficient(int constraint, int slot) const;

  /// Copy of the problem where the affine map of `constraint` is scaled by c.
  SdpProblem scaled(int constraint, double c) const;

  /// Structural validation: declared variables only, symmetric blocks.
  void validate() const;

 private:
  void check_constraint(int c, const Matrix& m) const;
  void accumulate(LmiConstraint& lmi, int slot, const Matrix& m);

  std::vector<ScalarVariable> scalars_;
  std::vector<MatrixVariable> matrices_;
  std::vector<LmiConstraint> constraints_;
  std::vector<std::pair<int, double>> objective_;
  int num_slots_ = 0;
  std::map<std::string, int> names_;
};

}  // namespace daecert::sdp
