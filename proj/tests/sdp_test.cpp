#include <gtest/gtest.h>

#include <random>

#include "daecert/sdp/check.hpp"
#include "daecert/sdp/json.hpp"
#include "daecert/sdp/solver.hpp"

using namespace daecert;
using namespace daecert::sdp;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// min t s.t. [[t,1],[1,t]] ⪰ 0.
SdpProblem min_t_problem() {
  SdpProblem p;
  auto t = p.add_scalar("t");
  int c = p.add_constraint("block", 2);
  p.add_constant(c, mat2(0, 1, 1, 0));
  p.add_term(c, t, Matrix::Identity(2, 2));
  p.set_objective({{t, 1.0}});
  return p;
}

// P ⪰ margin·I, AᵀP + PA ⪯ −I.
SdpProblem lyapunov_problem(const Matrix& a) {
  SdpProblem p;
  const int n = static_cast<int>(a.rows());
  auto pv = p.add_matrix("P", n, Cone::kPsd, 1e-6);
  int c = p.add_constraint("decrease", n);
  p.add_constant(c, -Matrix::Identity(n, n));
  p.add_linear_map(c, pv, [&](const Matrix& e) -> Matrix {
    return -(a.transpose() * e + e * a);
  });
  return p;
}

}  // namespace

TEST(SdpSolve, MinTExample) {
  auto p = min_t_problem();
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal) << s.message;
  EXPECT_NEAR(s.values.scalars[0], 1.0, 1e-7);
  EXPECT_NEAR(s.objective, 1.0, 1e-7);
}

TEST(SdpSolve, CheckSolutionPassesAndPerturbedFails) {
  auto p = min_t_problem();
  auto s = solve(p);
  auto rep = check_solution(p, s, 1e-6);
  EXPECT_TRUE(rep.pass);
  ASSERT_TRUE(rep.gap_checked);
  EXPECT_LE(std::fabs(rep.duality_gap), 1e-6);

  auto bad = s;
  bad.values.scalars[0] = 0.9;
  bad.status = Status::kFeasible;
  auto rep2 = check_solution(p, bad, 1e-6);
  EXPECT_FALSE(rep2.pass);
  EXPECT_LT(rep2.checks[0].min_eigenvalue, 0.0);
  EXPECT_NEAR(rep2.checks[0].min_eigenvalue, -0.1, 1e-12);
}

TEST(SdpSolve, ScalarLyapunovFeasible) {
  // p > 0, −2p ≤ −1.
  SdpProblem p;
  auto pv = p.add_scalar("p", Sign::kNonnegative);
  int c = p.add_constraint("decrease", 1);
  Matrix m(1, 1);
  m << -1;
  p.add_constant(c, m);
  m << 2;
  p.add_term(c, pv, m);
  auto s = solve(p);
  ASSERT_TRUE(s.ok()) << s.message;
  EXPECT_GE(s.values.scalars[0], 0.5 - 1e-9);
  EXPECT_TRUE(check_solution(p, s, 1e-7).pass);
}

TEST(SdpSolve, LyapunovStableFeasible) {
  auto p = lyapunov_problem(mat2(0, 1, -1, -1));
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kFeasible) << s.message;
  EXPECT_TRUE(check_solution(p, s, 1e-7).pass);
}

TEST(SdpSolve, LyapunovSaddleInfeasibleWithCertificate) {
  auto p = lyapunov_problem(mat2(0, 1, 1, 0));
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kInfeasible) << s.message;
  ASSERT_TRUE(s.certificate.has_value());
  EXPECT_GE(s.certificate->violation, 1e-8);
  auto audit = audit_certificate(p, *s.certificate, 1e-7);
  EXPECT_TRUE(audit.pass) << "stationarity " << audit.stationarity << " min eig "
                          << audit.min_eigenvalue << " violation " << audit.violation;
}

TEST(SdpSolve, EqualityConstraintsHonoured) {
  // min x + y s.t. x − y = 1 (as 1×1 equality), [[x, 1],[1, y+3]] ⪰ 0.
  SdpProblem p;
  auto x = p.add_scalar("x");
  auto y = p.add_scalar("y");
  int e = p.add_constraint("link", 1, Relation::kZero);
  Matrix one = Matrix::Ones(1, 1);
  p.add_constant(e, -one);
  p.add_term(e, x, one);
  p.add_term(e, y, -one);
  int c = p.add_constraint("block", 2);
  p.add_constant(c, mat2(0, 1, 1, 3));
  p.add_term(c, x, mat2(1, 0, 0, 0));
  p.add_term(c, y, mat2(0, 0, 0, 1));
  p.set_objective({{x, 1.0}, {y, 1.0}});
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal) << s.message;
  const double xv = s.values.scalars[0], yv = s.values.scalars[1];
  EXPECT_NEAR(xv - yv, 1.0, 1e-8);
  // x(x+2) = 1 at the optimum → x = √2 − 1.
  EXPECT_NEAR(xv, std::sqrt(2.0) - 1.0, 1e-6);
  auto rep = check_solution(p, s, 1e-6);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(std::fabs(rep.duality_gap), 1e-6);
}

TEST(SdpSolve, InconsistentEqualitiesInfeasible) {
  SdpProblem p;
  auto x = p.add_scalar("x");
  Matrix one = Matrix::Ones(1, 1);
  int a = p.add_constraint("a", 1, Relation::kZero);
  p.add_term(a, x, one);
  p.add_constant(a, -one);
  int b = p.add_constraint("b", 1, Relation::kZero);
  p.add_term(b, x, one);
  p.add_constant(b, one);
  auto s = solve(p);
  EXPECT_EQ(s.status, Status::kInfeasible);
}

TEST(SdpSolve, ScalingInvarianceOfStatus) {
  for (double scale : {1e-3, 1.0, 1e3}) {
    auto feas = lyapunov_problem(mat2(0, 1, -2, -0.5)).scaled(0, scale);
    EXPECT_TRUE(solve(feas).ok()) << scale;
    auto infeas = lyapunov_problem(mat2(0.1, 1, -1, 0.2)).scaled(0, scale);
    EXPECT_EQ(solve(infeas).status, Status::kInfeasible) << scale;
  }
}

TEST(SdpSolve, AddingConstraintNeverDecreasesMinimum) {
  auto p = min_t_problem();
  const double base = solve(p).objective;
  auto q = p;
  int c = q.add_constraint("floor", 1);
  Matrix m(1, 1);
  m << -2;
  q.add_constant(c, m);
  m << 1;
  q.add_term(c, ScalarId{0}, m);
  const auto s = solve(q);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_GE(s.objective, base - 1e-8);
  EXPECT_NEAR(s.objective, 2.0, 1e-6);
}

TEST(SdpSolve, RoundTripAuditOnRandomLyapunovProblems) {
  std::mt19937 rng(21);
  std::normal_distribution<double> d;
  int feasible = 0;
  for (int t = 0; t < 10; ++t) {
    Matrix a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = d(rng);
    a -= (spectral_abscissa(a) + 0.5) * Matrix::Identity(4, 4);
    auto p = lyapunov_problem(a);
    SolverOptions opts;
    auto s = solve(p, opts);
    ASSERT_TRUE(s.ok()) << s.message;
    EXPECT_TRUE(check_solution(p, s, 10 * opts.tol).pass);
    ++feasible;
  }
  EXPECT_EQ(feasible, 10);
}

TEST(SdpSolve, OptimizationMatchesAnalyticLyapunovTrace) {
  // min tr P s.t. AᵀP + PA ⪯ −I, scalar a = −2 → p = 1/4.
  SdpProblem p;
  auto x = p.add_scalar("p");
  int c = p.add_constraint("decrease", 1);
  Matrix m(1, 1);
  m << -1;
  p.add_constant(c, m);
  m << 4;
  p.add_term(c, x, m);
  p.set_objective({{x, 1.0}});
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.values.scalars[0], 0.25, 1e-7);
}

TEST(SdpSolve, UnboundedBelowIsNotReportedOptimal) {
  SdpProblem p;
  auto x = p.add_scalar("x");
  int c = p.add_constraint("c", 2);
  p.add_constant(c, Matrix::Identity(2, 2));
  p.add_term(c, x, Matrix::Zero(2, 2) + mat2(0, 0, 0, 0));
  p.set_objective({{x, 1.0}});
  EXPECT_NE(solve(p).status, Status::kOptimal);
}

TEST(SdpJson, RoundTripPreservesProblem) {
  auto p = lyapunov_problem(mat2(0, 1, -1, -1));
  auto j = to_json(p);
  auto q = problem_from_json(j);
  EXPECT_EQ(to_json(q), j);
  auto s1 = solve(p), s2 = solve(q);
  EXPECT_EQ(s1.status, s2.status);
}

TEST(SdpJson, MalformedInputRejected) {
  nlohmann::json j = {{"scalars", 3}};
  EXPECT_THROW(problem_from_json(j), InputError);
}

TEST(SdpProblemModel, DuplicateNamesAndBadCoefficientsRejected) {
  SdpProblem p;
  p.add_scalar("a");
  EXPECT_THROW(p.add_scalar("a"), InputError);
  int c = p.add_constraint("c", 2);
  EXPECT_THROW(p.add_constant(c, mat2(0, 1, 2, 0)), InputError);
  EXPECT_THROW(p.add_constant(c, Matrix::Zero(3, 3)), InputError);
  SdpProblem empty;
  EXPECT_THROW(solve(empty), InputError);
}
