#include "daecert/sdp/problem.hpp"

#include <cmath>

namespace daecert::sdp {

SparseSym SparseSym::from_dense(const Matrix& m, double drop_tol) {
  SparseSym s;
  s.dim = static_cast<int>(m.rows());
  for (int i = 0; i < s.dim; ++i) {
    for (int j = i; j < s.dim; ++j) {
      const double v = m(i, j);
      if (std::fabs(v) > drop_tol) s.entries.push_back({i, j, v});
    }
  }
  return s;
}

Matrix SparseSym::to_dense() const {
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& e : entries) {
    m(e.i, e.j) += e.v;
    if (e.i != e.j) m(e.j, e.i) += e.v;
  }
  return m;
}

ScalarId SdpProblem::add_scalar(std::string name, Sign sign) {
  if (!names_.emplace(name, 0).second) {
    throw InputError("duplicate variable name '" + name + "'");
  }
  scalars_.push_back({std::move(name), sign, num_slots_});
  ++num_slots_;
  return ScalarId{static_cast<int>(scalars_.size()) - 1};
}

MatrixId SdpProblem::add_matrix(std::string name, int dim, Cone cone,
                                double margin) {
  if (dim < 0) throw InputError("matrix variable with negative dimension");
  if (!names_.emplace(name, 1).second) {
    throw InputError("duplicate variable name '" + name + "'");
  }
  MatrixVariable v{std::move(name), dim, cone, margin, num_slots_};
  num_slots_ += v.num_slots();
  matrices_.push_back(std::move(v));
  return MatrixId{static_cast<int>(matrices_.size()) - 1};
}

int SdpProblem::add_constraint(std::string name, int dim, Relation relation) {
  if (dim < 0) throw InputError("constraint with negative dimension");
  LmiConstraint c;
  c.name = std::move(name);
  c.dim = dim;
  c.relation = relation;
  c.constant.dim = dim;
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

void SdpProblem::check_constraint(int c, const Matrix& m) const {
  if (c < 0 || c >= static_cast<int>(constraints_.size())) {
    throw InputError("unknown constraint index");
  }
  const int d = constraints_[c].dim;
  if (m.rows() != d || m.cols() != d) {
    throw InputError("constraint '" + constraints_[c].name +
                     "': coefficient has wrong size");
  }
  if (!m.allFinite()) {
    throw InputError("constraint '" + constraints_[c].name +
                     "': non-finite coefficient");
  }
  if (max_abs(m - m.transpose()) >
      1e-12 * (1.0 + max_abs(m))) {
    throw InputError("constraint '" + constraints_[c].name +
                     "': coefficient is not symmetric");
  }
}

void SdpProblem::accumulate(LmiConstraint& lmi, int slot, const Matrix& m) {
  auto it = lmi.terms.find(slot);
  if (it == lmi.terms.end()) {
    SparseSym s = SparseSym::from_dense(m);
    if (!s.empty()) lmi.terms.emplace(slot, std::move(s));
    return;
  }
  Matrix merged = it->second.to_dense() + m;
  it->second = SparseSym::from_dense(merged);
  if (it->second.empty()) lmi.terms.erase(it);
}

void SdpProblem::add_constant(int c, const Matrix& m) {
  check_constraint(c, m);
  auto& lmi = constraints_[c];
  lmi.constant = SparseSym::from_dense(lmi.constant.to_dense() + m);
}

void SdpProblem::add_term(int c, ScalarId s, const Matrix& m) {
  check_constraint(c, m);
  accumulate(constraints_[c], slot(s), m);
}

void SdpProblem::add_linear_map(int c, MatrixId p,
                                const std::function<Matrix(const Matrix&)>& map) {
  const MatrixVariable& var = matrices_.at(p.index);
  for (int k = 0; k < var.num_slots(); ++k) {
    Matrix contrib = map(basis(p, k));
    check_constraint(c, contrib);
    accumulate(constraints_[c], var.first_slot + k, contrib);
  }
}

void SdpProblem::add_slot_term(int c, int slot_index, const SparseSym& coeff) {
  if (slot_index < 0 || slot_index >= num_slots_) {
    throw InputError("slot index out of range");
  }
  Matrix m = coeff.to_dense();
  check_constraint(c, m);
  accumulate(constraints_[c], slot_index, m);
}

void SdpProblem::set_objective(std::vector<std::pair<ScalarId, double>> terms) {
  objective_.clear();
  for (const auto& [id, coeff] : terms) objective_.emplace_back(slot(id), coeff);
}

void SdpProblem::set_objective_slots(std::vector<std::pair<int, double>> terms) {
  for (const auto& t : terms) {
    if (t.first < 0 || t.first >= num_slots_) {
      throw InputError("objective references an undeclared slot");
    }
  }
  objective_ = std::move(terms);
}

int SdpProblem::slot(ScalarId s) const {
  if (s.index < 0 || s.index >= static_cast<int>(scalars_.size())) {
    throw InputError("unknown scalar variable");
  }
  return scalars_[s.index].slot;
}

int SdpProblem::slot(MatrixId m, int i, int j) const {
  const MatrixVariable& v = matrices_.at(m.index);
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= v.dim) throw InputError("matrix slot out of range");
  if (v.cone == Cone::kDiagonalPsd) {
    if (i != j) throw InputError("off-diagonal slot of a diagonal variable");
    return v.first_slot + i;
  }
  // Row-major upper triangle: rows before i contribute dim + (dim-1) + …
  const int before = i * v.dim - i * (i - 1) / 2;
  return v.first_slot + before + (j - i);
}

Matrix SdpProblem::basis(MatrixId m, int local) const {
  const MatrixVariable& v = matrices_.at(m.index);
  Matrix e = Matrix::Zero(v.dim, v.dim);
  if (v.cone == Cone::kDiagonalPsd) {
    e(local, local) = 1.0;
    return e;
  }
  int k = 0;
  for (int i = 0; i < v.dim; ++i) {
    for (int j = i; j < v.dim; ++j, ++k) {
      if (k == local) {
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        return e;
      }
    }
  }
  throw InputError("basis index out of range");
}

std::optional<ScalarId> SdpProblem::find_scalar(const std::string& name) const {
  for (std::size_t i = 0; i < scalars_.size(); ++i) {
    if (scalars_[i].name == name) return ScalarId{static_cast<int>(i)};
  }
  return std::nullopt;
}

std::optional<MatrixId> SdpProblem::find_matrix(const std::string& name) const {
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    if (matrices_[i].name == name) return MatrixId{static_cast<int>(i)};
  }
  return std::nullopt;
}

std::optional<int> SdpProblem::find_constraint(const std::string& name) const {
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (constraints_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

Vector SdpProblem::to_slots(const Values& v) const {
  if (v.scalars.size() != scalars_.size() ||
      v.matrices.size() != matrices_.size()) {
    throw InputError("missing variable value");
  }
  Vector y = Vector::Zero(num_slots_);
  for (std::size_t i = 0; i < scalars_.size(); ++i) {
    y(scalars_[i].slot) = v.scalars[i];
  }
  for (std::size_t k = 0; k < matrices_.size(); ++k) {
    const MatrixVariable& var = matrices_[k];
    const Matrix& m = v.matrices[k];
    if (var.cone == Cone::kDiagonalPsd) {
      const bool square = m.rows() == var.dim && m.cols() == var.dim;
      if (!square && m.size() != var.dim) throw InputError("missing variable value");
      for (int i = 0; i < var.dim; ++i) {
        y(var.first_slot + i) = square ? m(i, i) : m(i);
      }
      continue;
    }
    if (m.rows() != var.dim || m.cols() != var.dim) {
      throw InputError("missing variable value");
    }
    int s = var.first_slot;
    for (int i = 0; i < var.dim; ++i) {
      for (int j = i; j < var.dim; ++j) y(s++) = m(i, j);
    }
  }
  return y;
}

Values SdpProblem::from_slots(const Vector& y) const {
  Values v;
  for (const auto& s : scalars_) v.scalars.push_back(y(s.slot));
  for (const auto& var : matrices_) {
    Matrix m = Matrix::Zero(var.dim, var.dim);
    int s = var.first_slot;
    if (var.cone == Cone::kDiagonalPsd) {
      for (int i = 0; i < var.dim; ++i) m(i, i) = y(s++);
    } else {
      for (int i = 0; i < var.dim; ++i) {
        for (int j = i; j < var.dim; ++j) {
          m(i, j) = y(s);
          m(j, i) = y(s);
          ++s;
        }
      }
    }
    v.matrices.push_back(std::move(m));
  }
  return v;
}

Matrix SdpProblem::evaluate(int c, const Vector& y) const {
  const LmiConstraint& lmi = constraints_.at(c);
  Matrix m = lmi.constant.to_dense();
  for (const auto& [slot_index, coeff] : lmi.terms) {
    const double v = y(slot_index);
    if (v == 0.0) continue;
    for (const auto& e : coeff.entries) {
      m(e.i, e.j) += v * e.v;
      if (e.i != e.j) m(e.j, e.i) += v * e.v;
    }
  }
  return m;
}

double SdpProblem::objective_value(const Vector& y) const {
  double f = 0.0;
  for (const auto& [s, c] : objective_) f += c * y(s);
  return f;
}

Matrix SdpProblem::coefficient(int c, int slot_index) const {
  const LmiConstraint& lmi = constraints_.at(c);
  auto it = lmi.terms.find(slot_index);
  if (it == lmi.terms.end()) return Matrix::Zero(lmi.dim, lmi.dim);
  return it->second.to_dense();
}

SdpProblem SdpProblem::scaled(int c, double factor) const {
  SdpProblem out = *this;
  LmiConstraint& lmi = out.constraints_.at(c);
  for (auto& e : lmi.constant.entries) e.v *= factor;
  for (auto& [s, coeff] : lmi.terms) {
    for (auto& e : coeff.entries) e.v *= factor;
  }
  return out;
}

void SdpProblem::validate() const {
  if (num_slots_ == 0) throw InputError("SDP has no decision variables");
  for (const auto& lmi : constraints_) {
    for (const auto& [s, coeff] : lmi.terms) {
      if (s < 0 || s >= num_slots_) {
        throw InputError("constraint '" + lmi.name +
                         "' references an undeclared slot");
      }
      if (coeff.dim != lmi.dim) {
        throw InputError("constraint '" + lmi.name + "' has a mis-sized term");
      }
      for (const auto& e : coeff.entries) {
        if (e.i > e.j || e.j >= lmi.dim || !std::isfinite(e.v)) {
          throw InputError("constraint '" + lmi.name +
                           "' has a malformed coefficient entry");
        }
      }
    }
  }
}

}  // namespace daecert::sdp
