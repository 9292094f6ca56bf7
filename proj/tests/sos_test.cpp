#include <gtest/gtest.h>

#include <random>

#include "daecert/sdp/solver.hpp"
#include "daecert/sos/polynomial.hpp"
#include "daecert/sos/sos_program.hpp"

using namespace daecert;
using namespace daecert::sos;

namespace {

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Solved {
  CompiledSos compiled;
  sdp::SdpSolution solution;
};

Solved solve_program(const SosProgram& prog) {
  Solved s{compile_sos(prog), {}};
  s.solution = sdp::solve(s.compiled.problem);
  return s;
}

SosProgram single(const Polynomial& p) {
  SosProgram prog;
  AffinePolynomial a;
  a.constant = p;
  prog.add_sos("p", a);
  return prog;
}

}  // namespace

TEST(Polynomial, ProductOfBinomials) {
  auto x = Polynomial::variable("x");
  auto one = Polynomial::constant(1.0);
  auto p = (x + one) * (x - one);
  EXPECT_EQ(p.to_string(), parse_polynomial("x^2 - 1").to_string());
  EXPECT_EQ(p.terms().size(), 2u);
}

TEST(Polynomial, Gradient) {
  auto p = parse_polynomial("x1^2*x2");
  auto g = grad(p, {"x1", "x2"});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].to_string(), parse_polynomial("2*x1*x2").to_string());
  EXPECT_EQ(g[1].to_string(), parse_polynomial("x1^2").to_string());
}

TEST(Polynomial, ConstraintSquareExpansion) {
  auto g = parse_polynomial("x1^2 + (x2^2 + 5)*v");
  auto gg = g * g;
  EXPECT_EQ(gg.degree(), 6);
  const auto vars = gg.vars();
  Exponent v2(vars.size(), 0);
  v2[gg.var_index("v")] = 2;
  EXPECT_DOUBLE_EQ(gg.coefficient(v2), 25.0);
  EXPECT_DOUBLE_EQ(gg.coefficient(Exponent(vars.size(), 0)), 0.0);
  // Oracle: evaluate the factored form at random points.
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 20; ++t) {
    std::map<std::string, double> pt{{"x1", u(rng)}, {"x2", u(rng)}, {"v", u(rng)}};
    const double gv = pt["x1"] * pt["x1"] + (pt["x2"] * pt["x2"] + 5) * pt["v"];
    EXPECT_NEAR(gg.evaluate(pt), gv * gv, 1e-10 * (1 + gv * gv));
  }
}

TEST(Polynomial, NoZeroTermsStored) {
  auto x = Polynomial::variable("x");
  auto p = x - x;
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), -1);
}

TEST(Polynomial, ParseErrorsCarryPosition) {
  try {
    parse_polynomial("x + * 2");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_polynomial("x^-1"), InputError);
  EXPECT_THROW(parse_polynomial("(x + 1"), InputError);
}

TEST(Polynomial, ParseRoundTrip) {
  auto p = parse_polynomial("0.5*x1^2*v - 3 + (x2 + 1)^2");
  EXPECT_EQ(parse_polynomial(p.to_string()).to_string(), p.to_string());
  EXPECT_DOUBLE_EQ(p.evaluate(std::map<std::string, double>{{"x1", 2}, {"v", 1}, {"x2", 1}}), 3.0);
}

TEST(MonomialBasis, SmallCases) {
  auto b = monomial_basis(1, 2);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], Exponent{0});
  EXPECT_EQ(b[1], Exponent{1});
  EXPECT_EQ(b[2], Exponent{2});
  EXPECT_EQ(monomial_basis(2, 2).size(), 6u);
  EXPECT_EQ(monomial_basis(3, 4).size(), 35u);
}

TEST(MonomialBasis, CountLaw) {
  for (int n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 6; ++d) {
      EXPECT_EQ(static_cast<long>(monomial_basis(n, d).size()), binom(n + d, d)) << n << "," << d;
    }
  }
}

TEST(MonomialBasis, GradedLexOrder) {
  auto b = monomial_basis(2, 2);
  GradedLex less;
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_TRUE(less(b[i - 1], b[i]));
  EXPECT_EQ(b[3], (Exponent{2, 0}));
}

TEST(Sos, PerfectSquareFeasible) {
  auto prog = single(parse_polynomial("x^2 + 2*x + 1"));
  auto s = solve_program(prog);
  ASSERT_TRUE(s.solution.ok()) << s.solution.message;
  auto cert = extract_certificate(prog, s.compiled, s.solution);
  EXPECT_LE(cert.max_residual, 1e-6);
  EXPECT_GE(cert.min_gram_eigenvalue, -1e-8);
  ASSERT_EQ(cert.grams.size(), 1u);
  EXPECT_EQ(cert.grams[0].basis.size(), 2u);
  // The Gram matrix is unique here: [[1,1],[1,1]].
  EXPECT_NEAR(cert.grams[0].gram(0, 1), 1.0, 1e-6);
}

TEST(Sos, NegativeSquareInfeasible) {
  auto prog = single(parse_polynomial("-x^2"));
  auto s = solve_program(prog);
  EXPECT_EQ(s.solution.status, sdp::Status::kInfeasible);
}

TEST(Sos, OddLeadingDegreeImmediatelyInfeasible) {
  auto c = compile_sos(single(parse_polynomial("x^3 + 1")));
  ASSERT_TRUE(c.infeasible_reason.has_value());
  EXPECT_NE(c.infeasible_reason->find("odd"), std::string::npos);
  auto d = compile_sos(single(parse_polynomial("x^2*y + y^2 + 1")));
  ASSERT_TRUE(d.infeasible_reason.has_value());
  EXPECT_FALSE(compile_sos(single(parse_polynomial("x^4 + x^3 + 1"))).infeasible_reason);
}

TEST(Sos, MotzkinRejectedWithSeparatingFunctional) {
  const auto p = parse_polynomial("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1");
  auto prog = single(p);
  auto s = solve_program(prog);
  ASSERT_EQ(s.solution.status, sdp::Status::kInfeasible) << s.solution.message;
  ASSERT_TRUE(s.solution.certificate.has_value());
  auto ell = separating_functional(s.compiled, 0, *s.solution.certificate, p);
  const double scale = ell.moment_matrix.cwiseAbs().maxCoeff();
  EXPECT_GE(ell.min_eigenvalue, -1e-8 * scale);
  EXPECT_LT(ell.value_on_p, 0.0);
  // Motzkin is still nonnegative.
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    EXPECT_GE(p.evaluate(std::map<std::string, double>{{"x", u(rng)}, {"y", u(rng)}}), -1e-12);
  }
}

TEST(Sos, PrunedBasisForMotzkin) {
  AffinePolynomial a;
  a.constant = parse_polynomial("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1");
  auto b = gram_basis(a, a.vars());
  // Only 1, xy, x²y, xy² survive the diagonal pruning.
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(b[0], (Exponent{0, 0}));
  EXPECT_EQ(b[1], (Exponent{1, 1}));
}

TEST(Sos, UnknownCoefficientsSolvedFor) {
  // Find c with x⁴ − 2x² + c SOS; minimal c is 1.
  SosProgram prog;
  auto& dec = prog.decisions();
  auto c = dec.add_scalar("c");
  AffinePolynomial a;
  a.constant = parse_polynomial("x^4 - 2*x^2");
  a.add(dec.slot(c), Polynomial::constant(1.0, {"x"}));
  prog.add_sos("p", a);
  auto compiled = compile_sos(prog);
  compiled.problem.set_objective({{c, 1.0}});
  auto sol = sdp::solve(compiled.problem);
  ASSERT_EQ(sol.status, sdp::Status::kOptimal) << sol.message;
  EXPECT_NEAR(sol.objective, 1.0, 1e-5);
  auto cert = extract_certificate(prog, compiled, sol);
  EXPECT_NEAR(cert.scalars.at("c"), 1.0, 1e-5);
}

TEST(Sos, FeasibleConstraintsNonnegativeAtSamples) {
  const auto p = parse_polynomial("x^4 + y^4 - x*y + 1 + x^2*y^2");
  auto prog = single(p);
  auto s = solve_program(prog);
  ASSERT_TRUE(s.solution.ok());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 200; ++t) {
    const double x = u(rng), y = u(rng);
    const double r2 = std::pow(x * x + y * y, 2);
    EXPECT_GE(p.evaluate(std::map<std::string, double>{{"x", x}, {"y", y}}), -1e-6 * (1 + r2));
  }
}

TEST(Sos, GramSizeCapEnforced) {
  auto prog = single(parse_polynomial("(x + y + z + w)^12 + 1"));
  prog.max_gram_size = 20;
  EXPECT_THROW(compile_sos(prog), InputError);
}
