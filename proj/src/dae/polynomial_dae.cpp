#include "daecert/dae/polynomial_dae.hpp"

#include <Eigen/LU>
#include <cmath>
#include <set>
#include <stdexcept>

namespace daecert::dae {

using sos::Polynomial;

std::vector<std::string> PolynomialDae::all_vars() const {
  std::vector<std::string> out = x;
  out.insert(out.end(), v.begin(), v.end());
  out.insert(out.end(), w.begin(), w.end());
  out.insert(out.end(), xi.begin(), xi.end());
  return out;
}

namespace {

void require_vars(const Polynomial& p, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& name : p.vars()) {
    const int i = p.var_index(name);
    bool used = false;
    for (const auto& [e, c] : p.terms()) used = used || e[i] > 0;
    if (used && !allowed.count(name)) {
      throw InputError(what + " uses undeclared variable '" + name + "'");
    }
  }
}

}  // namespace

void PolynomialDae::check() const {
  std::set<std::string> names;
  for (const auto& s : all_vars()) {
    if (s.empty()) throw InputError("empty variable name");
    if (!names.insert(s).second) throw InputError("duplicate variable name '" + s + "'");
  }
  if (static_cast<int>(f.size()) != n()) throw InputError("f must have one entry per state");
  if (v0.size() != m()) throw InputError("v0 must have one entry per algebraic variable");
  for (std::size_t i = 0; i < f.size(); ++i) require_vars(f[i], names, "f[" + std::to_string(i) + "]");
  for (std::size_t i = 0; i < g.size(); ++i) require_vars(g[i], names, "g[" + std::to_string(i) + "]");
  std::set<std::string> xv(x.begin(), x.end());
  xv.insert(v.begin(), v.end());
  for (std::size_t i = 0; i < h.size(); ++i) require_vars(h[i], xv, "h[" + std::to_string(i) + "]");
}

namespace {

std::map<std::string, double> point(const PolynomialDae& s, const Vector& x, const Vector& v,
                                    const Vector& w) {
  std::map<std::string, double> pt;
  for (int i = 0; i < s.n(); ++i) pt[s.x[i]] = x(i);
  for (int i = 0; i < s.m(); ++i) pt[s.v[i]] = v(i);
  for (int i = 0; i < s.p(); ++i) pt[s.w[i]] = w(i);
  for (const auto& name : s.xi) pt[name] = 0.0;
  return pt;
}

Vector eval(const std::vector<Polynomial>& ps, const std::map<std::string, double>& pt) {
  Vector out(static_cast<Eigen::Index>(ps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) out(i) = ps[i].evaluate(pt);
  return out;
}

}  // namespace

ValidationReport validate(const PolynomialDae& sys) {
  ValidationReport r;
  try {
    sys.check();
    r.dims_ok = true;
  } catch (const InputError& e) {
    r.findings.emplace_back(e.what());
    r.equilibrium_ok = false;
    return r;
  }
  const auto pt = point(sys, Vector::Zero(sys.n()), sys.v0, Vector::Zero(sys.p()));
  const double fr = sys.n() ? max_abs(eval(sys.f, pt)) : 0.0;
  const double gr = sys.k() ? max_abs(eval(sys.g, pt)) : 0.0;
  r.equilibrium_residual = std::max(fr, gr);
  r.equilibrium_ok = r.equilibrium_residual <= 1e-10;
  if (!r.equilibrium_ok) r.findings.emplace_back("f or g does not vanish at the declared equilibrium");
  if (sys.k() == sys.m() && sys.m() > 0) {
    Matrix jac(sys.k(), sys.m());
    for (int j = 0; j < sys.m(); ++j) {
      for (int i = 0; i < sys.k(); ++i) jac(i, j) = sys.g[i].derivative(sys.v[j]).evaluate(pt);
    }
    r.index_one = Eigen::FullPivLU<Matrix>(jac).isInvertible();
  } else {
    r.index_one = sys.m() == 0 && sys.k() == 0;
  }
  if (!r.index_one) r.findings.emplace_back("∂g/∂v is not invertible at the equilibrium");
  return r;
}

PolynomialDae from_linear(const LinearDae& sys) {
  sys.check();
  if (sys.l() != 0) throw InputError("from_linear: uncertainty channels are not supported");
  PolynomialDae out;
  auto names = [](const char* prefix, int count) {
    std::vector<std::string> v;
    for (int i = 0; i < count; ++i) v.push_back(prefix + std::to_string(i + 1));
    return v;
  };
  out.x = names("x", sys.n());
  out.v = names("v", sys.m());
  out.w = names("w", sys.p());
  out.v0 = Vector::Zero(sys.m());
  auto row = [&](const std::vector<std::pair<const Matrix*, const std::vector<std::string>*>>& blocks,
                 int i) {
    Polynomial p(out.all_vars());
    for (const auto& [mat, vars] : blocks) {
      for (int j = 0; j < mat->cols(); ++j) {
        if ((*mat)(i, j) != 0.0) p += (*mat)(i, j) * Polynomial::variable((*vars)[j]);
      }
    }
    return p.with_vars(out.all_vars());
  };
  for (int i = 0; i < sys.n(); ++i) out.f.push_back(row({{&sys.a, &out.x}, {&sys.b_v, &out.v}, {&sys.b_w, &out.w}}, i));
  for (int i = 0; i < sys.k(); ++i) out.g.push_back(row({{&sys.f, &out.x}, {&sys.g_v, &out.v}, {&sys.g_w, &out.w}}, i));
  for (int i = 0; i < sys.q(); ++i) out.h.push_back(row({{&sys.c, &out.x}, {&sys.d_v, &out.v}}, i));
  return out;
}

namespace {

Vector solve_algebraic(const PolynomialDae& s, const std::vector<std::vector<Polynomial>>& jac,
                       const Vector& x, const Vector& w, Vector v) {
  for (int it = 0; it < 50; ++it) {
    const auto pt = point(s, x, v, w);
    const Vector r = eval(s.g, pt);
    if (max_abs(r) <= 1e-13 * (1.0 + max_abs(v))) return v;
    Matrix j(s.k(), s.m());
    for (int a = 0; a < s.k(); ++a) {
      for (int b = 0; b < s.m(); ++b) j(a, b) = jac[a][b].evaluate(pt);
    }
    Eigen::FullPivLU<Matrix> lu(j);
    if (!lu.isInvertible()) throw std::runtime_error("simulate: algebraic Jacobian is singular");
    v -= lu.solve(r);
  }
  const Vector r = eval(s.g, point(s, x, v, w));
  if (max_abs(r) > 1e-10) throw std::runtime_error("simulate: Newton did not converge");
  return v;
}

}  // namespace

PolyTrajectory simulate(const PolynomialDae& sys, const Signal& w, const Vector& x0, double dt,
                        double horizon) {
  sys.check();
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw InputError("simulate: dt must be positive");
  if (sys.k() != sys.m()) throw InputError("simulate: need as many constraints as algebraic variables");
  if (x0.size() != sys.n()) throw InputError("simulate: x0 has the wrong size");
  std::vector<std::vector<Polynomial>> jac(sys.k());
  for (int a = 0; a < sys.k(); ++a) {
    for (int b = 0; b < sys.m(); ++b) jac[a].push_back(sys.g[a].derivative(sys.v[b]));
  }
  auto input = [&](double t) {
    Vector u = w ? w(t) : Vector::Zero(sys.p());
    if (u.size() != sys.p()) throw InputError("simulate: input signal has the wrong size");
    return u;
  };
  Vector v_guess = sys.v0;
  auto rhs = [&](double t, const Vector& x, Vector& v_out) {
    const Vector u = input(t);
    v_out = solve_algebraic(sys, jac, x, u, v_guess);
    return Vector(eval(sys.f, point(sys, x, v_out, u)));
  };

  const auto steps = static_cast<Eigen::Index>(std::ceil(horizon / dt - 1e-9));
  PolyTrajectory tr;
  tr.t.resize(steps + 1);
  tr.x.resize(sys.n(), steps + 1);
  tr.v.resize(sys.m(), steps + 1);
  Vector x = x0, v;
  rhs(0.0, x, v);
  for (Eigen::Index s = 0;; ++s) {
    const double t = static_cast<double>(s) * dt;
    tr.t(s) = t;
    tr.x.col(s) = x;
    tr.v.col(s) = v;
    if (sys.k() > 0) {
      tr.max_algebraic_residual = std::max(
          tr.max_algebraic_residual, eval(sys.g, point(sys, x, v, input(t))).cwiseAbs().maxCoeff());
    }
    if (s == steps) break;
    v_guess = v;
    Vector tmp;
    const Vector k1 = rhs(t, x, tmp);
    const Vector k2 = rhs(t + dt / 2, x + dt / 2 * k1, tmp);
    const Vector k3 = rhs(t + dt / 2, x + dt / 2 * k2, tmp);
    const Vector k4 = rhs(t + dt, x + dt * k3, tmp);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    rhs(t + dt, x, v);
  }
  return tr;
}

}  // namespace daecert::dae
