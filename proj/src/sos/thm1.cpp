#include "daecert/sos/thm1.hpp"

#include <set>

namespace daecert::sos {

using dae::PolynomialDae;

Polynomial supply_polynomial(dae::SupplyKind kind, const PolynomialDae& sys, double gamma) {
  const auto vars = sys.all_vars();
  Polynomial s(vars);
  switch (kind) {
    case dae::SupplyKind::kStability:
      break;
    case dae::SupplyKind::kPassivity:
      if (sys.p() != sys.q()) throw InputError("passivity needs as many inputs as outputs");
      for (int i = 0; i < sys.p(); ++i) s += Polynomial::variable(sys.w[i]) * sys.h[i];
      break;
    case dae::SupplyKind::kL2Gain:
      if (!(gamma > 0.0)) throw InputError("l2gain needs gamma > 0");
      for (int i = 0; i < sys.p(); ++i) {
        const auto wi = Polynomial::variable(sys.w[i]);
        s += gamma * gamma * (wi * wi);
      }
      for (const auto& h : sys.h) s += -1.0 * (h * h);
      break;
    case dae::SupplyKind::kCustom:
      throw InputError("custom supply needs an explicit quadratic form");
  }
  return s.with_vars(vars);
}

Polynomial supply_polynomial(const dae::QuadraticSupplyRate& s, const PolynomialDae& sys) {
  const auto vars = sys.all_vars();
  std::vector<std::string> order = sys.x;
  order.insert(order.end(), sys.v.begin(), sys.v.end());
  order.insert(order.end(), sys.w.begin(), sys.w.end());
  const Matrix x = s.over_xvw();
  if (x.rows() != static_cast<Eigen::Index>(order.size())) {
    throw InputError("supply rate does not match the system dimensions");
  }
  Polynomial out(vars);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (x(i, j) != 0.0) out += x(i, j) * (Polynomial::variable(order[i]) * Polynomial::variable(order[j]));
    }
  }
  return out.with_vars(vars);
}

namespace {

// M·[polynomial vector].
std::vector<Polynomial> apply(const Matrix& m, const std::vector<Polynomial>& v,
                              const std::vector<std::string>& vars) {
  std::vector<Polynomial> out(m.rows(), Polynomial(vars));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out[i] += m(i, j) * v[j];
    }
  }
  return out;
}

}  // namespace

Thm1Program build_thm1_sos_program(const PolynomialDae& sys, const Polynomial& supply,
                                   const dae::UncertaintySpec& u, const Thm1Options& opts) {
  sys.check();
  if (opts.deg_v < 2 || opts.deg_v % 2 != 0) throw InputError("storage degree must be even and ≥ 2");
  if (!(opts.epsilon > 0.0)) throw InputError("epsilon must be positive");
  const bool uncertain = u.kind != dae::UncertaintyKind::kNone;
  if (uncertain) {
    u.check(sys.n(), sys.m(), sys.l());
    if (!u.params.empty()) throw InputError("SOS path needs a fixed multiplier M");
  } else if (sys.l() != 0) {
    throw InputError("uncertainty channels declared but no uncertainty given");
  }

  Thm1Program out;
  const int npsi = uncertain ? u.filter.states() : 0;
  for (int i = 0; i < npsi; ++i) out.psi.push_back("psi" + std::to_string(i + 1));
  std::vector<std::string> vars = sys.all_vars();
  vars.insert(vars.end(), out.psi.begin(), out.psi.end());
  {
    std::set<std::string> seen(vars.begin(), vars.end());
    if (seen.size() != vars.size()) throw InputError("filter state names clash with system variables");
  }

  SosProgram& prog = out.program;
  auto& dec = prog.decisions();
  const auto& storage = prog.add_polynomial("V", sys.x, monomial_basis(sys.n(), 2, opts.deg_v));
  out.storage = 0;
  out.lambda = dec.add_scalar("lambda", sdp::Sign::kNonnegative);

  AffinePolynomial positive = storage.as_affine(dec);
  for (const auto& name : sys.x) {
    const auto xi = Polynomial::variable(name);
    positive.add(-opts.epsilon * (xi * xi));
  }
  prog.add_sos("storage", positive);

  AffinePolynomial main;
  main.constant = supply.with_vars(vars);
  Polynomial gg(vars);
  for (const auto& g : sys.g) gg += g * g;
  if (!gg.is_zero()) main.add(dec.slot(out.lambda), gg);

  std::vector<Polynomial> f;
  for (const auto& fi : sys.f) f.push_back(fi.with_vars(vars));
  for (std::size_t k = 0; k < storage.monomials.size(); ++k) {
    const auto m = Polynomial::monomial(sys.x, storage.monomials[k]);
    main.add(dec.slot(storage.coeffs[k]), -1.0 * dot(grad(m, sys.x), f));
  }

  if (uncertain) {
    std::vector<Polynomial> input;  // [x; v; ξ]
    for (const auto* group : {&sys.x, &sys.v, &sys.xi}) {
      for (const auto& name : *group) input.push_back(Polynomial::variable(name).with_vars(vars));
    }
    std::vector<Polynomial> psi;
    for (const auto& name : out.psi) psi.push_back(Polynomial::variable(name).with_vars(vars));
    const dae::Filter& flt = u.filter;
    std::vector<Polynomial> z = apply(flt.d, input, vars);
    if (npsi > 0) {
      const auto cz = apply(flt.c, psi, vars);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += cz[i];
    }
    const auto mz = apply(u.m, z, vars);
    out.tau = dec.add_scalar("tau", sdp::Sign::kNonnegative);
    main.add(dec.slot(*out.tau), dot(z, mz));

    if (npsi > 0) {
      auto r = apply(flt.a, psi, vars);
      const auto br = apply(flt.b, input, vars);
      for (int i = 0; i < npsi; ++i) r[i] += br[i];
      out.p_delta = dec.add_matrix("P_delta", npsi, sdp::Cone::kPsd, 0.0);
      const auto& var = dec.matrices()[out.p_delta->index];
      for (int k = 0; k < var.num_slots(); ++k) {
        const Matrix e = dec.basis(*out.p_delta, k);
        // −ψᵀE r − rᵀE ψ = −2 ψᵀE r.
        main.add(var.first_slot + k, -2.0 * dot(psi, apply(e, r, vars)));
      }
    }
  }
  prog.add_sos("dissipation", main);
  return out;
}

}  // namespace daecert::sos
