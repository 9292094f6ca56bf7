#include "daecert/sos/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace daecert::sos {

namespace {

int total(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

}  // namespace

bool GradedLex::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total(a), db = total(b);
  if (da != db) return da < db;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int x = i < a.size() ? a[i] : 0;
    const int y = i < b.size() ? b[i] : 0;
    if (x != y) return x > y;
  }
  return false;
}

Polynomial::Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    for (std::size_t j = i + 1; j < vars_.size(); ++j) {
      if (vars_[i] == vars_[j]) throw InputError("duplicate polynomial variable '" + vars_[i] + "'");
    }
  }
}

Polynomial Polynomial::constant(double c, std::vector<std::string> vars) {
  Polynomial p(std::move(vars));
  p.add_term(Exponent(p.vars_.size(), 0), c);
  return p;
}

Polynomial Polynomial::variable(const std::string& name) {
  Polynomial p({name});
  p.add_term({1}, 1.0);
  return p;
}

Polynomial Polynomial::monomial(std::vector<std::string> vars, Exponent e, double c) {
  Polynomial p(std::move(vars));
  p.add_term(e, c);
  return p;
}

int Polynomial::var_index(const std::string& name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

void Polynomial::add_term(const Exponent& e, double c) {
  if (e.size() != vars_.size()) throw InputError("exponent length does not match variable count");
  for (int k : e) {
    if (k < 0) throw InputError("negative exponent");
  }
  if (!std::isfinite(c)) throw InputError("non-finite polynomial coefficient");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, total(e));
  return d;
}

int Polynomial::degree_in(int var) const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

int Polynomial::min_degree() const {
  if (terms_.empty()) return -1;
  int d = std::numeric_limits<int>::max();
  for (const auto& [e, c] : terms_) d = std::min(d, total(e));
  return d;
}

Polynomial Polynomial::with_vars(const std::vector<std::string>& vars) const {
  Polynomial out(vars);
  std::vector<int> map(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) map[i] = out.var_index(vars_[i]);
  for (const auto& [e, c] : terms_) {
    Exponent ne(vars.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (map[i] < 0) throw InputError("variable '" + vars_[i] + "' missing from target list");
      ne[map[i]] = e[i];
    }
    out.add_term(ne, c);
  }
  return out;
}

double Polynomial::evaluate(const Vector& point) const {
  if (point.size() != static_cast<Eigen::Index>(vars_.size())) {
    throw InputError("evaluation point has wrong size");
  }
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) t *= std::pow(point(static_cast<Eigen::Index>(i)), e[i]);
    }
    s += t;
  }
  return s;
}

double Polynomial::evaluate(const std::map<std::string, double>& point) const {
  Vector v(static_cast<Eigen::Index>(vars_.size()));
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = point.find(vars_[i]);
    if (it == point.end()) throw InputError("no value for variable '" + vars_[i] + "'");
    v(static_cast<Eigen::Index>(i)) = it->second;
  }
  return evaluate(v);
}

Polynomial Polynomial::derivative(const std::string& var) const {
  Polynomial out(vars_);
  const int k = var_index(var);
  if (k < 0) return out;
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponent ne = e;
    ne[k] -= 1;
    out.add_term(ne, c * e[k]);
  }
  return out;
}

Polynomial Polynomial::substitute(const std::map<std::string, Polynomial>& subs) const {
  std::vector<std::string> vars;
  for (const auto& v : vars_) {
    if (!subs.count(v)) vars = merge_vars(vars, {v});
  }
  for (const auto& v : vars_) {
    auto it = subs.find(v);
    if (it != subs.end()) vars = merge_vars(vars, it->second.vars());
  }
  Polynomial out(vars);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(c, vars);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      auto it = subs.find(vars_[i]);
      const Polynomial base = it != subs.end() ? it->second : Polynomial::variable(vars_[i]);
      for (int k = 0; k < e[i]; ++k) term = term * base;
    }
    out += term;
  }
  return out.with_vars(vars);
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial out(vars_);
  for (const auto& [e, c] : terms_) {
    if (std::fabs(c) > tol) out.add_term(e, c);
  }
  return out;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::fabs(c));
  return m;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  // Highest degree first for readability.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    double mag = c;
    if (first) {
      if (c < 0) {
        os << "-";
        mag = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      mag = std::fabs(c);
    }
    first = false;
    const bool is_const = total(e) == 0;
    if (is_const || mag != 1.0) {
      os << mag;
      if (!is_const) os << "*";
    }
    bool first_factor = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!first_factor) os << "*";
      os << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
      first_factor = false;
    }
  }
  return os.str();
}

std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& v : b) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  *this = *this + o;
  return *this;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const auto vars = merge_vars(a.vars(), b.vars());
  Polynomial out = a.with_vars(vars);
  const Polynomial bb = b.with_vars(vars);
  for (const auto& [e, c] : bb.terms()) out.add_term(e, c);
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  const auto vars = merge_vars(a.vars(), b.vars());
  const Polynomial aa = a.with_vars(vars), bb = b.with_vars(vars);
  Polynomial out(vars);
  Exponent e(vars.size());
  for (const auto& [ea, ca] : aa.terms()) {
    for (const auto& [eb, cb] : bb.terms()) {
      for (std::size_t i = 0; i < vars.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial operator*(double s, const Polynomial& a) {
  Polynomial out(a.vars());
  for (const auto& [e, c] : a.terms()) out.add_term(e, s * c);
  return out;
}

std::vector<Polynomial> grad(const Polynomial& p, const std::vector<std::string>& wrt) {
  std::vector<Polynomial> g;
  g.reserve(wrt.size());
  for (const auto& v : wrt) g.push_back(p.derivative(v));
  return g;
}

Polynomial dot(const std::vector<Polynomial>& a, const std::vector<Polynomial>& b) {
  if (a.size() != b.size()) throw InputError("dot: length mismatch");
  Polynomial s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace daecert::sos
