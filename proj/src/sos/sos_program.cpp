#include "daecert/sos/sos_program.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace daecert::sos {

namespace {

int total(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

Exponent sum(const Exponent& a, const Exponent& b) {
  Exponent e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] + b[i];
  return e;
}

}  // namespace

std::vector<std::string> AffinePolynomial::vars() const {
  std::vector<std::string> v = constant.vars();
  for (const auto& [s, p] : linear) v = merge_vars(v, p.vars());
  return v;
}

std::vector<Exponent> AffinePolynomial::support(const std::vector<std::string>& vars) const {
  std::set<Exponent, GradedLex> s;
  const Polynomial k = constant.with_vars(vars);
  for (const auto& [e, c] : k.terms()) s.insert(e);
  for (const auto& [slot, p] : linear) {
    const Polynomial q = p.with_vars(vars);
    for (const auto& [e, c] : q.terms()) s.insert(e);
  }
  return {s.begin(), s.end()};
}

Polynomial AffinePolynomial::evaluate(const Vector& slots) const {
  Polynomial out = constant;
  for (const auto& [s, p] : linear) out += slots(s) * p;
  return out;
}

AffinePolynomial& AffinePolynomial::operator+=(const AffinePolynomial& o) {
  constant += o.constant;
  for (const auto& [s, p] : o.linear) add(s, p);
  return *this;
}

AffinePolynomial& AffinePolynomial::add(const Polynomial& p) {
  constant += p;
  return *this;
}

AffinePolynomial& AffinePolynomial::add(int slot, const Polynomial& p) {
  auto it = linear.find(slot);
  if (it == linear.end()) {
    if (!p.is_zero()) linear.emplace(slot, p);
  } else {
    it->second += p;
    if (it->second.is_zero()) linear.erase(it);
  }
  return *this;
}

AffinePolynomial PolynomialUnknown::as_affine(const sdp::SdpProblem& p) const {
  AffinePolynomial a;
  a.constant = Polynomial(vars);
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    a.add(p.slot(coeffs[k]), Polynomial::monomial(vars, monomials[k]));
  }
  return a;
}

Polynomial PolynomialUnknown::value(const sdp::SdpProblem& p, const Vector& slots) const {
  Polynomial out(vars);
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    out.add_term(monomials[k], slots(p.slot(coeffs[k])));
  }
  return out;
}

const PolynomialUnknown& SosProgram::add_polynomial(std::string name, std::vector<std::string> vars,
                                                    std::vector<Exponent> monomials) {
  PolynomialUnknown u{std::move(name), std::move(vars), std::move(monomials), {}};
  for (const auto& m : u.monomials) {
    if (m.size() != u.vars.size()) throw InputError("monomial length mismatch in '" + u.name + "'");
    std::string label = u.name + "[";
    for (std::size_t i = 0; i < m.size(); ++i) label += (i ? "," : "") + std::to_string(m[i]);
    label += "]";
    u.coeffs.push_back(decisions_.add_scalar(label));
  }
  polys_.push_back(std::move(u));
  return polys_.back();
}

void SosProgram::add_sos(std::string name, AffinePolynomial poly) {
  sos_.push_back({std::move(name), std::move(poly)});
}

std::vector<Exponent> gram_basis(const AffinePolynomial& p, const std::vector<std::string>& vars,
                                 BasisPruning pruning) {
  const auto supp = p.support(vars);
  if (supp.empty()) return {};
  const int nv = static_cast<int>(vars.size());
  std::vector<int> half(nv, 0);
  int dmax = 0, dmin = std::numeric_limits<int>::max();
  for (const auto& e : supp) {
    for (int i = 0; i < nv; ++i) half[i] = std::max(half[i], e[i]);
    dmax = std::max(dmax, total(e));
    dmin = std::min(dmin, total(e));
  }
  for (auto& h : half) h /= 2;
  if (pruning == BasisPruning::kNone) return monomial_basis(nv, (dmin + 1) / 2, dmax / 2);
  std::vector<Exponent> basis;
  for (const auto& e : monomial_basis(nv, (dmin + 1) / 2, dmax / 2)) {
    bool ok = true;
    for (int i = 0; i < nv && ok; ++i) ok = e[i] <= half[i];
    if (ok) basis.push_back(e);
  }
  // Drop z when 2z is absent from the support and no other product hits it:
  // the diagonal entry is then forced to zero and so is its row.
  const std::set<Exponent, GradedLex> support_set(supp.begin(), supp.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Exponent sq = sum(basis[i], basis[i]);
      if (support_set.count(sq)) continue;
      bool hit = false;
      for (std::size_t j = 0; j < basis.size() && !hit; ++j) {
        for (std::size_t k = j + 1; k < basis.size() && !hit; ++k) {
          if (j == i || k == i) continue;
          hit = sum(basis[j], basis[k]) == sq;
        }
      }
      if (!hit) {
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return basis;
}

namespace {

// A constraint cannot be SOS when its leading part in total degree or in
// one variable has odd degree and carries no decision coefficient.
std::optional<std::string> degree_obstruction(const std::string& name, const AffinePolynomial& p,
                                              const std::vector<std::string>& vars) {
  const Polynomial& k = p.constant;
  int dl = -1;
  for (const auto& [s, q] : p.linear) dl = std::max(dl, q.degree());
  const int dk = k.degree();
  if (dk > dl && dk % 2 == 1) {
    return "constraint '" + name + "' has odd total degree " + std::to_string(dk) +
           " with fixed leading terms";
  }
  for (int i = 0; i < static_cast<int>(vars.size()); ++i) {
    int li = -1;
    for (const auto& [s, q] : p.linear) li = std::max(li, q.is_zero() ? -1 : q.degree_in(i));
    const int ki = k.is_zero() ? -1 : k.degree_in(i);
    if (ki > li && ki % 2 == 1) {
      return "constraint '" + name + "' has odd degree " + std::to_string(ki) + " in " + vars[i] +
             " with fixed leading terms";
    }
  }
  return std::nullopt;
}

sdp::SparseSym one_by_one(double v) {
  sdp::SparseSym s;
  s.dim = 1;
  s.entries.push_back({0, 0, v});
  return s;
}

}  // namespace

namespace {

struct Normalized {
  std::string name;
  std::vector<std::string> vars;
  AffinePolynomial poly;
  std::vector<Exponent> basis;
};

CompiledSos build(const SosProgram& program, const std::vector<Normalized>& items) {
  CompiledSos out;
  out.problem = program.decisions();
  sdp::SdpProblem& prob = out.problem;
  for (const auto& it : items) {
    const AffinePolynomial& p = it.poly;
    GramBlock block;
    block.name = it.name;
    block.vars = it.vars;
    block.basis = it.basis;
    const int nb = static_cast<int>(block.basis.size());
    block.gram = prob.add_matrix(it.name + ".gram", nb, sdp::Cone::kPsd, 0.0);

    // exponent → (slot, coefficient) contributions of zᵀQz.
    std::map<Exponent, std::vector<std::pair<int, double>>, GradedLex> products;
    for (int i = 0; i < nb; ++i) {
      for (int j = i; j < nb; ++j) {
        products[sum(block.basis[i], block.basis[j])].emplace_back(prob.slot(block.gram, i, j),
                                                                   i == j ? 1.0 : 2.0);
      }
    }
    std::set<Exponent, GradedLex> exps;
    for (const auto& e : p.support(it.vars)) exps.insert(e);
    for (const auto& [e, l] : products) exps.insert(e);

    for (const auto& e : exps) {
      std::string label = it.name + ".match[";
      for (std::size_t i = 0; i < e.size(); ++i) label += (i ? "," : "") + std::to_string(e[i]);
      label += "]";
      const int row = prob.add_constraint(label, 1, sdp::Relation::kZero);
      const double k = p.constant.coefficient(e);
      if (k != 0.0) prob.add_constant(row, Matrix::Constant(1, 1, -k));
      std::map<int, double> coef;
      if (auto pit = products.find(e); pit != products.end()) {
        for (const auto& [slot, v] : pit->second) coef[slot] += v;
      }
      for (const auto& [slot, q] : p.linear) {
        const double v = q.coefficient(e);
        if (v != 0.0) coef[slot] -= v;
      }
      for (const auto& [slot, v] : coef) {
        if (v != 0.0) prob.add_slot_term(row, slot, one_by_one(v));
      }
      block.matched.push_back(e);
      block.match_constraints.push_back(row);
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

// Gram diagonal slots that the equalities alone pin to zero.  A zero
// diagonal forces its row to zero in any PSD solution, so the monomial can
// leave the basis; without this the problem has no strictly feasible point.
std::vector<std::vector<bool>> pinned_to_zero(const CompiledSos& c) {
  const sdp::SdpProblem& prob = c.problem;
  std::vector<std::pair<std::map<int, double>, double>> rows;
  for (const auto& lmi : prob.constraints()) {
    if (lmi.relation != sdp::Relation::kZero) continue;
    const Matrix k = lmi.constant.to_dense();
    for (int a = 0; a < lmi.dim; ++a) {
      for (int b = a; b < lmi.dim; ++b) {
        std::map<int, double> r;
        for (const auto& [slot, coeff] : lmi.terms) {
          for (const auto& e : coeff.entries) {
            if (e.i == a && e.j == b) r[slot] += e.v;
          }
        }
        rows.emplace_back(std::move(r), -k(a, b));
      }
    }
  }
  std::vector<std::vector<bool>> out;
  for (const auto& b : c.blocks) out.emplace_back(b.basis.size(), false);
  if (rows.empty()) return out;
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), prob.num_slots());
  Vector rhs(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [slot, v] : rows[r].first) a(r, slot) = v;
    rhs(r) = rows[r].second;
  }
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  const Vector y0 = cod.solve(rhs);
  if ((a * y0 - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) return out;  // inconsistent: solver reports it
  const Matrix null = null_space_orthonormal(a, 1e-10);
  const double scale = 1.0 + max_abs(y0);
  for (std::size_t bi = 0; bi < c.blocks.size(); ++bi) {
    const auto& b = c.blocks[bi];
    for (std::size_t i = 0; i < b.basis.size(); ++i) {
      const int s = prob.slot(b.gram, static_cast<int>(i), static_cast<int>(i));
      const bool fixed = null.cols() == 0 || null.row(s).norm() <= 1e-9;
      out[bi][i] = fixed && std::fabs(y0(s)) <= 1e-9 * scale;
    }
  }
  return out;
}

}  // namespace

CompiledSos compile_sos(const SosProgram& program) {
  std::vector<Normalized> items;
  std::optional<std::string> reason;
  for (const auto& c : program.constraints()) {
    Normalized it;
    it.name = c.name;
    it.vars = c.poly.vars();
    it.poly.constant = c.poly.constant.with_vars(it.vars);
    for (const auto& [s, q] : c.poly.linear) it.poly.add(s, q.with_vars(it.vars));
    if (it.poly.constant.is_zero() && it.poly.linear.empty()) continue;
    if (!reason) reason = degree_obstruction(c.name, it.poly, it.vars);
    it.basis = gram_basis(it.poly, it.vars, program.pruning);
    const int nb = static_cast<int>(it.basis.size());
    if (nb > program.max_gram_size) {
      throw InputError("constraint '" + c.name + "' needs a Gram basis of " + std::to_string(nb) +
                       " monomials (limit " + std::to_string(program.max_gram_size) + ")");
    }
    items.push_back(std::move(it));
  }
  CompiledSos out = build(program, items);
  while (program.pruning == BasisPruning::kFacial) {
    const auto pinned = pinned_to_zero(out);
    bool changed = false;
    for (std::size_t bi = 0; bi < items.size(); ++bi) {
      std::vector<Exponent> kept;
      for (std::size_t i = 0; i < items[bi].basis.size(); ++i) {
        if (!pinned[bi][i]) kept.push_back(items[bi].basis[i]);
      }
      changed = changed || kept.size() != items[bi].basis.size();
      items[bi].basis = std::move(kept);
    }
    if (!changed) break;
    out = build(program, items);
  }
  out.infeasible_reason = reason;
  return out;
}

SosCertificate extract_certificate(const SosProgram& program, const CompiledSos& compiled,
                                   const sdp::SdpSolution& solution, double tol) {
  const sdp::SdpProblem& prob = compiled.problem;
  if (solution.slots.size() != prob.num_slots()) {
    throw InputError("solution does not match the compiled program");
  }
  const Vector& y = solution.slots;
  SosCertificate cert;
  for (const auto& u : program.polynomials()) cert.polynomials[u.name] = u.value(prob, y);
  const auto& decl = program.decisions();
  for (const auto& s : decl.scalars()) cert.scalars[s.name] = y(s.slot);
  const sdp::Values values = prob.from_slots(y);
  for (std::size_t k = 0; k < decl.matrices().size(); ++k) {
    cert.matrices[decl.matrices()[k].name] = values.matrices[k];
  }
  cert.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  std::size_t b = 0;
  for (const auto& c : program.constraints()) {
    if (b >= compiled.blocks.size() || compiled.blocks[b].name != c.name) continue;
    const GramBlock& block = compiled.blocks[b++];
    GramReport r;
    r.name = block.name;
    r.basis = block.basis;
    r.gram = values.matrices[block.gram.index];
    r.min_eigenvalue = min_eigenvalue_sym(r.gram);
    Polynomial target = c.poly.evaluate(y).with_vars(block.vars);
    Polynomial recon(block.vars);
    for (std::size_t i = 0; i < block.basis.size(); ++i) {
      for (std::size_t j = 0; j < block.basis.size(); ++j) {
        recon.add_term(sum(block.basis[i], block.basis[j]), r.gram(i, j));
      }
    }
    const Polynomial diff = target - recon;
    r.residual = diff.max_abs_coefficient();
    cert.max_residual = std::max(cert.max_residual, r.residual);
    cert.min_gram_eigenvalue = std::min(cert.min_gram_eigenvalue, r.min_eigenvalue);
    cert.grams.push_back(std::move(r));
  }
  if (cert.max_residual > tol) {
    throw std::runtime_error("SOS reconstruction residual " + std::to_string(cert.max_residual) +
                             " exceeds tolerance");
  }
  return cert;
}

SeparatingFunctional separating_functional(const CompiledSos& compiled, std::size_t block,
                                           const sdp::InfeasibilityCertificate& cert,
                                           const Polynomial& p) {
  const GramBlock& g = compiled.blocks.at(block);
  SeparatingFunctional out;
  for (std::size_t k = 0; k < g.matched.size(); ++k) {
    const Matrix& z = cert.constraint_duals.at(g.match_constraints[k]);
    out.moments[g.matched[k]] = -z(0, 0);
  }
  const int nb = static_cast<int>(g.basis.size());
  out.moment_matrix = Matrix::Zero(nb, nb);
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j) out.moment_matrix(i, j) = out.moments.at(sum(g.basis[i], g.basis[j]));
  }
  out.min_eigenvalue = min_eigenvalue_sym(out.moment_matrix);
  const Polynomial q = p.with_vars(g.vars);
  for (const auto& [e, c] : q.terms()) {
    auto it = out.moments.find(e);
    if (it != out.moments.end()) out.value_on_p += c * it->second;
  }
  return out;
}

}  // namespace daecert::sos
