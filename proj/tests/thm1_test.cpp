#include <gtest/gtest.h>

#include <random>

#include "daecert/dae/polynomial_dae.hpp"
#include "daecert/sdp/solver.hpp"
#include "daecert/sos/thm1.hpp"

using namespace daecert;
using namespace daecert::sos;

namespace {

dae::PolynomialDae example_one() {
  dae::PolynomialDae s;
  s.x = {"x1", "x2"};
  s.v = {"v"};
  s.f = {parse_polynomial("-x1 + v"), parse_polynomial("-x1 - x2")};
  s.g = {parse_polynomial("x1^2 + (x2^2 + 5)*v")};
  s.v0 = Vector::Zero(1);
  return s;
}

struct Run {
  Thm1Program th;
  CompiledSos compiled;
  sdp::SdpSolution sol;
};

Run run(const dae::PolynomialDae& sys, const Polynomial& supply, const dae::UncertaintySpec& u,
        Thm1Options opts, BasisPruning pruning = BasisPruning::kNone) {
  Run r{build_thm1_sos_program(sys, supply, u, opts), {}, {}};
  r.th.program.pruning = pruning;
  r.compiled = compile_sos(r.th.program);
  r.sol = sdp::solve(r.compiled.problem);
  return r;
}

}  // namespace

TEST(PolynomialDae, ExampleOneEquilibrium) {
  auto r = dae::validate(example_one());
  EXPECT_TRUE(r.dims_ok);
  EXPECT_TRUE(r.equilibrium_ok);
  EXPECT_TRUE(r.index_one);
  auto bad = example_one();
  bad.v0 = Vector::Ones(1);
  EXPECT_FALSE(dae::validate(bad).equilibrium_ok);
}

TEST(PolynomialDae, UndeclaredVariableRejected) {
  auto s = example_one();
  s.f[0] = parse_polynomial("-x1 + z");
  EXPECT_THROW(s.check(), InputError);
  EXPECT_FALSE(dae::validate(s).dims_ok);
}

TEST(PolynomialDae, SimulationKeepsConstraint) {
  auto s = example_one();
  Vector x0(2);
  x0 << 1.0, -0.5;
  auto tr = dae::simulate(s, nullptr, x0, 1e-2, 5.0);
  EXPECT_LE(tr.max_algebraic_residual, 1e-10);
  EXPECT_LT(tr.x.col(tr.x.cols() - 1).norm(), 0.1);
}

TEST(PolynomialDae, LinearConversionMatchesLinearSimulation) {
  auto lin = dae::LinearDae::zeros(2, 1, 0, 0, 1, 1);
  lin.a << -1, 0.5, -0.3, -2;
  lin.b_v << 1, 0;
  lin.f << 0.2, 1;
  lin.g_v << 2;
  lin.c << 1, 0;
  auto poly = dae::from_linear(lin);
  Vector x0(2);
  x0 << 1, 1;
  auto a = dae::simulate(poly, nullptr, x0, 1e-3, 1.0);
  auto b = dae::simulate(lin, [](double) { return Vector::Zero(0); }, x0, 1e-3, 1.0);
  EXPECT_LE((a.x.col(a.x.cols() - 1) - b.x.col(b.x.cols() - 1)).norm(), 1e-6);
}

TEST(Thm1, ScalarDecayGivesSquareStorage) {
  dae::PolynomialDae s;
  s.x = {"x"};
  s.f = {parse_polynomial("-x")};
  s.v0 = Vector::Zero(0);
  auto r = run(s, supply_polynomial(dae::SupplyKind::kStability, s), dae::UncertaintySpec::none(), {2, 1e-3});
  ASSERT_TRUE(r.sol.ok()) << r.sol.message;
  auto cert = extract_certificate(r.th.program, r.compiled, r.sol);
  const auto& storage = cert.grams[0];
  ASSERT_EQ(storage.basis.size(), 1u);
  EXPECT_EQ(storage.basis[0], Exponent{1});
  EXPECT_GT(cert.polynomials.at("V").coefficient({2}), 1e-3);
}

TEST(Thm1, UnstableScalarRejected) {
  dae::PolynomialDae s;
  s.x = {"x"};
  s.f = {parse_polynomial("x")};
  s.v0 = Vector::Zero(0);
  auto r = run(s, supply_polynomial(dae::SupplyKind::kStability, s), dae::UncertaintySpec::none(), {2, 1e-3});
  EXPECT_EQ(r.sol.status, sdp::Status::kInfeasible);
}

TEST(Thm1, ExampleOneFeasibleAndAudited) {
  auto sys = example_one();
  auto r = run(sys, supply_polynomial(dae::SupplyKind::kStability, sys), dae::UncertaintySpec::none(),
               {4, 1e-3});
  ASSERT_FALSE(r.compiled.infeasible_reason);
  ASSERT_TRUE(r.sol.ok()) << r.sol.message;
  auto cert = extract_certificate(r.th.program, r.compiled, r.sol);
  EXPECT_LE(cert.max_residual, 1e-6);
  EXPECT_GE(cert.min_gram_eigenvalue, -1e-8);
  EXPECT_GE(cert.scalars.at("lambda"), 0.0);

  // V must not increase along simulated trajectories.
  const Polynomial& v = cert.polynomials.at("V");
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    Vector x0(2);
    x0 << u(rng), u(rng);
    auto tr = dae::simulate(sys, nullptr, x0, 1e-3, 5.0);
    double prev = v.evaluate(Vector(tr.x.col(0)));
    for (Eigen::Index i = 1; i < tr.x.cols(); ++i) {
      const double cur = v.evaluate(Vector(tr.x.col(i)));
      ASSERT_LE(cur, prev + 1e-9 * (1 + std::fabs(prev))) << "trajectory " << k << " step " << i;
      prev = cur;
    }
  }
}

TEST(Thm1, ExampleOneExactPruningIsInfeasible) {
  // The exact basis reductions expose that the program has no feasible
  // point; only the unreduced basis admits a tolerance-level solution.
  auto sys = example_one();
  auto r = run(sys, supply_polynomial(dae::SupplyKind::kStability, sys), dae::UncertaintySpec::none(),
               {4, 1e-3}, BasisPruning::kFacial);
  EXPECT_EQ(r.sol.status, sdp::Status::kInfeasible);
}

TEST(Thm1, PointwiseSectorUncertainty) {
  // ẋ = −x + ξ, ξ = φ(x) in sector [0, 0.5]: z = [x; ξ], ξ(ξ − 0.5x) ≤ 0.
  dae::PolynomialDae s;
  s.x = {"x"};
  s.xi = {"xi"};
  s.f = {parse_polynomial("-x + xi")};
  s.v0 = Vector::Zero(0);
  Matrix m(2, 2);
  m << 0, -0.25, -0.25, 1;
  auto u = dae::UncertaintySpec::pointwise(m, Matrix::Identity(2, 2));
  auto r = run(s, supply_polynomial(dae::SupplyKind::kStability, s), u, {2, 1e-3});
  ASSERT_TRUE(r.sol.ok()) << r.sol.message;
  auto cert = extract_certificate(r.th.program, r.compiled, r.sol);
  EXPECT_GE(cert.scalars.at("tau"), 0.0);
}

TEST(Thm1, DynamicFilterAddsStorageBlock) {
  dae::PolynomialDae s;
  s.x = {"x"};
  s.xi = {"xi"};
  s.f = {parse_polynomial("-x + xi")};
  s.v0 = Vector::Zero(0);
  dae::Filter f;
  f.a = Matrix::Constant(1, 1, -1.0);
  f.b = Matrix::Zero(1, 2);
  f.b(0, 0) = 1.0;
  f.c = Matrix::Zero(3, 1);
  f.c(2, 0) = 1.0;
  f.d = Matrix::Zero(3, 2);
  f.d(0, 0) = 1.0;
  f.d(1, 1) = 1.0;
  Matrix m = Matrix::Zero(3, 3);
  m(1, 1) = 1.0;
  m(0, 0) = -0.25;
  auto u = dae::UncertaintySpec::hard_iqc(f, m);
  auto th = build_thm1_sos_program(s, supply_polynomial(dae::SupplyKind::kStability, s), u, {2, 1e-3});
  ASSERT_TRUE(th.p_delta.has_value());
  ASSERT_EQ(th.psi.size(), 1u);
  EXPECT_NE(std::find(th.program.constraints()[1].poly.vars().begin(),
                      th.program.constraints()[1].poly.vars().end(), "psi1"),
            th.program.constraints()[1].poly.vars().end());
}

TEST(Thm1, RejectsOddStorageDegree) {
  auto sys = example_one();
  EXPECT_THROW(build_thm1_sos_program(sys, Polynomial(), dae::UncertaintySpec::none(), {3, 1e-3}), InputError);
  EXPECT_THROW(build_thm1_sos_program(sys, Polynomial(), dae::UncertaintySpec::none(), {4, 0.0}), InputError);
}
