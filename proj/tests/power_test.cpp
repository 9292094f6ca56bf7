#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "daecert/power/analysis.hpp"
#include "daecert/power/controller.hpp"
#include "daecert/power/envelope.hpp"
#include "daecert/power/linearize.hpp"
#include "daecert/power/pipeline.hpp"
#include "fixtures.hpp"

using namespace daecert;
using namespace daecert::power;
namespace fs = std::filesystem;

namespace {

const std::string kCaseDir = std::string(DAECERT_DATA_DIR) + "/ieee39";

struct Bundled {
  NetworkCase net;
  OperatingPoint op;
  LinearizedPowerDae lin;
  ReducedPowerDae red;
  std::map<int, OutagePerturbation> outages;
};

const Bundled& bundled() {
  static const Bundled b = [] {
    Bundled x;
    x.net = load_case(kCaseDir);
    x.op = solve_power_flow(x.net);
    x.lin = assemble_linearization(x.net, x.op);
    x.red = reduce(x.lin);
    for (int line : {30, 41, 42, 43}) x.outages[line] = line_outage_perturbation(x.net, x.op, line);
    return x;
  }();
  return b;
}

std::map<int, Matrix> bundled_delta_g() {
  std::map<int, Matrix> out;
  for (const auto& [line, p] : bundled().outages) out[line] = p.delta_g;
  return out;
}

UncertaintyEnvelope bundled_envelope() {
  const auto& b = bundled();
  return build_uncertainty_envelope(b.lin.g, bundled_delta_g(), 43, {30, 41, 42, 43}, 3,
                                    b.lin.angle_shift());
}

// Two-bus case: slack at bus 1, PQ load at bus 2, one series branch.
NetworkCase two_bus(double p_load, double q_load, double r, double x) {
  NetworkCase c;
  c.name = "two-bus";
  c.omega = 2.0 * M_PI * 60.0;
  c.buses = {{1, BusType::kSlack, 1.0, 0.0, 0.0, 0.0, 0.0},
             {2, BusType::kPQ, 1.0, p_load, q_load, 0.0, 0.0}};
  c.branches = {{0, 1, 2, r, x, 0.0, 1.0}};
  c.generators = {{1, 0.0, 5.0, 2.0, 0.2}};
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

fs::path copy_case(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("daecert_case_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* f : {"case.json", "buses.csv", "branches.csv", "gens.csv"}) {
    fs::copy_file(fs::path(kCaseDir) / f, dir / f);
  }
  return dir;
}

int branch_between(const NetworkCase& c, int a, int b) {
  for (const auto& br : c.branches) {
    if ((br.from == a && br.to == b) || (br.from == b && br.to == a)) return br.id;
  }
  return -1;
}

// Descriptor response w → y of the unreduced model, solved as one linear
// system in (x, v).
ComplexMatrix descriptor_response(const LinearizedPowerDae& lin, double omega) {
  const Eigen::Index n = lin.a_bar.rows(), m = lin.g.rows();
  ComplexMatrix lhs = ComplexMatrix::Zero(n + m, n + m);
  lhs.topLeftCorner(n, n) = std::complex<double>(0.0, omega) * ComplexMatrix::Identity(n, n) -
                            lin.a_bar.cast<std::complex<double>>();
  lhs.topRightCorner(n, m) = -lin.b_v_bar.cast<std::complex<double>>();
  lhs.bottomLeftCorner(m, n) = lin.f_bar.cast<std::complex<double>>();
  lhs.bottomRightCorner(m, m) = lin.g.cast<std::complex<double>>();
  ComplexMatrix rhs = ComplexMatrix::Zero(n + m, lin.b_w_bar.cols());
  rhs.topRows(n) = lin.b_w_bar.cast<std::complex<double>>();
  const ComplexMatrix sol = lhs.partialPivLu().solve(rhs);
  return lin.c_bar.cast<std::complex<double>>() * sol.topRows(n);
}

double eliminated_abscissa(const dae::LinearDae& s) {
  const Matrix ae = s.a - s.b_v * s.g_v.partialPivLu().solve(s.f);
  return Eigen::EigenSolver<Matrix>(ae, false).eigenvalues().real().maxCoeff();
}

// Small stand-in for the reduced power model: 2 states, 3 algebraic
// variables, one input and output.
struct Toy {
  ReducedPowerDae red;
  Matrix g;
  std::map<int, Matrix> delta_g;
  Vector shift;
};

Toy toy(double size) {
  std::mt19937 rng(5);
  Toy t;
  t.red.q = Matrix::Identity(2, 2);
  t.red.a = (Matrix(2, 2) << -1.0, 0.5, 0.0, -2.0).finished();
  t.red.b_v = fixtures::gaussian(rng, 2, 3, 0.3);
  t.red.b_w = (Matrix(2, 1) << 1.0, 0.5).finished();
  t.red.f = fixtures::gaussian(rng, 3, 2, 0.5);
  t.red.c = (Matrix(1, 2) << 1.0, 0.0).finished();
  t.g = 3.0 * Matrix::Identity(3, 3) + fixtures::gaussian(rng, 3, 3, 0.2);
  t.shift = Vector::Ones(3);
  t.delta_g[1] = Matrix::Zero(3, 3);
  t.delta_g[2] = size * fixtures::gaussian(rng, 3, 1) * fixtures::gaussian(rng, 1, 3);
  t.delta_g[3] = size * fixtures::gaussian(rng, 3, 1) * fixtures::gaussian(rng, 1, 3);
  return t;
}

}  // namespace

// ---------------------------------------------------------------- case data

TEST(NetworkCase, BundledCaseShape) {
  const auto& b = bundled();
  EXPECT_EQ(b.net.buses.size(), 39u);
  EXPECT_EQ(b.net.n_gen(), 10);
  for (int id : {30, 41, 42, 43}) EXPECT_GE(b.net.branch_index(id), 0) << id;
  EXPECT_EQ(2 * (b.net.n_gen() + b.net.n_load()), 78);
}

TEST(NetworkCase, DuplicateBusIdIsParseError) {
  const fs::path dir = copy_case("dup");
  std::ifstream in(dir / "buses.csv");
  std::stringstream all;
  all << in.rdbuf();
  in.close();
  write_file(dir / "buses.csv", all.str() + "5,PQ,1,0,0,0,0\n");
  try {
    load_case(dir.string());
    FAIL() << "duplicate id accepted";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("5"), std::string::npos) << e.what();
  }
}

TEST(NetworkCase, MalformedFieldReportsLine) {
  const fs::path dir = copy_case("bad");
  write_file(dir / "gens.csv", "bus,p_gen_mw,h,d,x_d\n30,250,forty,2,0.031\n");
  try {
    load_case(dir.string());
    FAIL() << "malformed field accepted";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("gens.csv"), std::string::npos) << msg;
    EXPECT_NE(msg.find(":2"), std::string::npos) << msg;
  }
}

TEST(NetworkCase, DisconnectedGraphRejected) {
  NetworkCase c = two_bus(0.5, 0.1, 0.01, 0.1);
  c.buses.push_back({3, BusType::kPQ, 1.0, 0.1, 0.0, 0.0, 0.0});
  EXPECT_THROW(c.check(), InputError);
}

TEST(NetworkCase, RemoveThenRestoreBranchIsIdentity) {
  const auto& net = bundled().net;
  const ComplexMatrix full = admittance(net);
  for (int id : {30, 41, 42, 43}) {
    ComplexMatrix y = admittance(net, id);
    EXPECT_GT((y - full).cwiseAbs().maxCoeff(), 1.0);
    stamp_branch(net, net.branches[net.branch_index(id)], y);
    EXPECT_LE((y - full).cwiseAbs().maxCoeff(), 1e-12) << id;
  }
}

// -------------------------------------------------------------- power flow

TEST(PowerFlow, FlatProfileWithoutLoad) {
  const OperatingPoint op = solve_power_flow(two_bus(0.0, 0.0, 0.01, 0.1));
  for (Eigen::Index i = 0; i < op.vm.size(); ++i) {
    EXPECT_NEAR(op.vm(i), 1.0, 1e-12);
    EXPECT_NEAR(op.va(i), 0.0, 1e-12);
  }
}

TEST(PowerFlow, TwoBusMatchesClosedForm) {
  const double p = 0.8, q = 0.3, r = 0.02, x = 0.12;
  const OperatingPoint op = solve_power_flow(two_bus(p, q, r, x));
  // |V2|⁴ + (2(rP + xQ) − 1)|V2|² + |z|²|S|² = 0, high-voltage root.
  const double b = 2.0 * (r * p + x * q) - 1.0;
  const double cc = (r * r + x * x) * (p * p + q * q);
  const double v2 = std::sqrt((-b + std::sqrt(b * b - 4.0 * cc)) / 2.0);
  // V₁ conj(V₂) = |V₂|² + z conj(S) with V₁ = 1.
  const std::complex<double> z(r, x), s(p, q);
  const double angle = -std::arg(v2 * v2 + z * std::conj(s));
  EXPECT_NEAR(op.vm(1), v2, 1e-9);
  EXPECT_NEAR(op.va(1), angle, 1e-9);
  EXPECT_LE(op.mismatch, 1e-8);
}

TEST(PowerFlow, BundledCaseConverges) {
  const auto& b = bundled();
  EXPECT_LE(b.op.mismatch, 1e-8);
  // Independent recomputation of the injection mismatch.
  const ComplexVector mis = injection_mismatch(b.net, admittance(b.net), b.op.voltage());
  for (std::size_t i = 0; i < b.net.buses.size(); ++i) {
    if (b.net.buses[i].type == BusType::kPQ) EXPECT_LE(std::abs(mis(i)), 1e-8) << i;
    if (b.net.buses[i].type == BusType::kPV) EXPECT_LE(std::fabs(mis(i).real()), 1e-8) << i;
  }
}

TEST(PowerFlow, DivergenceIsReported) {
  EXPECT_THROW(solve_power_flow(two_bus(50.0, 20.0, 0.02, 0.12)), PowerError);
}

// ------------------------------------------------------------ linearization

TEST(Linearization, Dimensions) {
  const auto& lin = bundled().lin;
  EXPECT_EQ(lin.a_bar.rows(), 20);
  EXPECT_EQ(lin.a_bar.cols(), 20);
  EXPECT_EQ(lin.f_bar.rows(), 78);
  EXPECT_EQ(lin.f_bar.cols(), 20);
  EXPECT_EQ(lin.g.rows(), 78);
  EXPECT_EQ(lin.g.cols(), 78);
}

TEST(Linearization, ZeroModeHoldsNominalAndPerturbed) {
  const auto& b = bundled();
  EXPECT_LE(zero_mode_residuals(b.lin).max(), 1e-8);
  // Direct evaluation of the shift identities.
  const Vector xs = b.lin.state_shift(), vs = b.lin.angle_shift();
  const double scale = std::max(b.lin.f_bar.cwiseAbs().maxCoeff(), b.lin.g.cwiseAbs().maxCoeff());
  EXPECT_LE((b.lin.f_bar * xs + b.lin.g * vs).cwiseAbs().maxCoeff() / scale, 1e-8);
  EXPECT_LE((b.lin.c_bar * xs).cwiseAbs().maxCoeff(), 1e-12);
  for (const auto& [line, p] : b.outages) {
    const Matrix g = b.lin.g + p.delta_g;
    EXPECT_LE(zero_mode_residuals(b.lin, &g).max(), 1e-8) << line;
    EXPECT_LE((p.delta_g * vs).cwiseAbs().maxCoeff(), 1e-10) << line;
  }
}

TEST(Linearization, ConstraintMatrixMatchesFiniteDifferences) {
  const auto& b = bundled();
  const ComplexMatrix y = augmented_admittance(b.net, b.op);
  const Vector v0 = algebraic_point(b.op);
  EXPECT_LE(network_equations(b.net, b.op, y, b.op.delta, v0).cwiseAbs().maxCoeff(), 1e-8);
  const double h = 1e-6;
  Matrix fd(v0.size(), v0.size());
  for (Eigen::Index k = 0; k < v0.size(); ++k) {
    Vector vp = v0, vm = v0;
    vp(k) += h;
    vm(k) -= h;
    fd.col(k) = (network_equations(b.net, b.op, y, b.op.delta, vp) -
                 network_equations(b.net, b.op, y, b.op.delta, vm)) / (2.0 * h);
  }
  EXPECT_LE((fd - b.lin.g).norm() / b.lin.g.norm(), 1e-5);
  const JacobianAudit audit = audit_jacobians(b.net, b.op, b.lin);
  EXPECT_LE(audit.g_rel, 1e-5);
  EXPECT_LE(audit.f_rel, 1e-5);
}

// ---------------------------------------------------------------- reduction

TEST(Reduction, BasisIsOrthonormal) {
  const auto& red = bundled().red;
  EXPECT_EQ(red.q.rows(), 20);
  EXPECT_EQ(red.q.cols(), 19);
  EXPECT_LE((red.q.transpose() * red.q - Matrix::Identity(19, 19)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((red.q.transpose() * bundled().lin.state_shift()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Reduction, PreservesFrequencyResponse) {
  const auto& b = bundled();
  const dae::LinearDae reduced = b.red.system(b.lin.g);
  std::vector<double> omegas{0.5, 2.0, 10.0};
  for (int i = 0; i < 10; ++i) omegas.push_back(std::pow(10.0, -1.0 + 3.0 * i / 9.0));
  for (double w : omegas) {
    const ComplexMatrix hr = dae::frequency_response(reduced, w);
    const ComplexMatrix hf = descriptor_response(b.lin, w);
    EXPECT_LE((hr - hf).norm() / std::max(1.0, hf.norm()), 1e-8) << "omega " << w;
  }
}

// --------------------------------------------------------------- controller

TEST(Controller, PlacesBundledSpectrumInRegion) {
  const auto& b = bundled();
  const dae::LinearDae sys = b.red.system(b.lin.g);
  const ControllerDesign d = design_controller(sys, 0.5);
  EXPECT_FALSE(d.open_loop_sufficient);
  EXPECT_LT(eliminated_abscissa(b.red.system(b.lin.g, d.k)), -0.5);
  EXPECT_NEAR(d.abscissa, eliminated_abscissa(b.red.system(b.lin.g, d.k)), 1e-9);
}

TEST(Controller, StableOpenLoopKeepsZeroGain) {
  std::mt19937 rng(3);
  const dae::LinearDae sys = fixtures::random_dae(rng, 3, 2, 1, 1, 0, 0.4);
  const ControllerDesign d = design_controller(sys, 0.0);
  EXPECT_TRUE(d.open_loop_sufficient);
  EXPECT_EQ(d.k.norm(), 0.0);
  EXPECT_LT(d.abscissa, 0.0);
}

TEST(Controller, UnstabilizablePairIsInfeasible) {
  auto sys = dae::LinearDae::zeros(2, 1, 1, 0, 1, 1);
  sys.a = (Matrix(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();
  sys.b_w = (Matrix(2, 1) << 0.0, 1.0).finished();
  sys.g_v(0, 0) = 1.0;
  sys.c(0, 0) = 1.0;
  EXPECT_THROW(design_controller(sys, 0.5), PowerError);
}

// ------------------------------------------------------------------ outages

TEST(Outage, PerturbationRemovesExactlyTheLine) {
  const auto& b = bundled();
  for (const auto& [line, p] : b.outages) {
    const Matrix raw =
        constraint_jacobian(augmented_admittance(b.net, b.op, line), b.op) - b.lin.g;
    const Vector u = b.lin.angle_shift();
    const Matrix proj = raw - raw * u * u.transpose() / u.squaredNorm();
    EXPECT_LE((p.delta_g - proj).cwiseAbs().maxCoeff(), 1e-10) << line;
    EXPECT_NEAR(p.raw_shift_residual, (raw * u).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Outage, DuplicateBranchRemovalRestoresNominal) {
  const auto& b = bundled();
  NetworkCase c = b.net;
  Branch extra = c.branches[c.branch_index(30)];
  extra.id = 1000;
  c.branches.push_back(extra);
  const Matrix g_with = constraint_jacobian(augmented_admittance(c, b.op), b.op);
  const Matrix g_without = constraint_jacobian(augmented_admittance(c, b.op, 1000), b.op);
  EXPECT_GT((g_with - b.lin.g).cwiseAbs().maxCoeff(), 1.0);
  EXPECT_LE((g_without - b.lin.g).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Outage, GeneratorBridgeIsConnectivityError) {
  const auto& b = bundled();
  const int id = branch_between(b.net, 2, 30);
  ASSERT_GE(id, 0);
  EXPECT_FALSE(is_connected(b.net, id));
  EXPECT_THROW(line_outage_perturbation(b.net, b.op, id), ConnectivityError);
}

// ----------------------------------------------------------------- envelope

TEST(Envelope, BaseVertexIsExact) {
  const auto& b = bundled();
  const UncertaintyEnvelope env = bundled_envelope();
  const Matrix at_base = env.constraint_at(Vector::Ones(3));
  EXPECT_EQ((at_base - (b.lin.g + b.outages.at(43).delta_g)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(env.vertex(43), Vector::Ones(3));
}

TEST(Envelope, VertexResidualIsTheSvdTail) {
  const auto& b = bundled();
  const UncertaintyEnvelope env = bundled_envelope();
  for (std::size_t i = 0; i < env.terms.size(); ++i) {
    const int line = env.terms[i].line_id;
    const Matrix exact = b.lin.g + b.outages.at(line).delta_g;
    const double residual = (env.constraint_at(env.vertex(line)) - exact).norm();
    const Matrix diff = b.outages.at(line).delta_g - b.outages.at(43).delta_g;
    const Vector sv = Eigen::JacobiSVD<Matrix>(diff).singularValues();
    const double tail = sv.tail(sv.size() - 3).norm();
    EXPECT_NEAR(residual, tail, 1e-8 * sv(0)) << line;
    EXPECT_NEAR(env.terms[i].truncation_residual, tail, 1e-8 * sv(0)) << line;
    EXPECT_NEAR(env.terms[i].decay, sv(3) / sv(0), 1e-10) << line;
  }
}

TEST(Envelope, FactorsPreserveShiftStructure) {
  const auto& b = bundled();
  const UncertaintyEnvelope env = bundled_envelope();
  ASSERT_EQ(env.terms.size(), 3u);
  const Vector u = b.lin.angle_shift();
  for (const auto& t : env.terms) {
    EXPECT_EQ(t.h.rows(), 78);
    EXPECT_EQ(t.h.cols(), 3);
    EXPECT_EQ(t.j.rows(), 78);
    EXPECT_EQ(t.j.cols(), 3);
    EXPECT_LE((t.j.transpose() * u).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((t.j.transpose() * t.j - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  }
  // Every θ keeps the shift direction in the kernel.
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> th(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const Vector theta = Vector::NullaryExpr(3, [&](Eigen::Index) { return th(rng); });
    const Matrix g = env.constraint_at(theta);
    EXPECT_LE(zero_mode_residuals(b.lin, &g).max(), 1e-8);
  }
}

TEST(Envelope, AffineFormMatchesParameterization) {
  const UncertaintyEnvelope env = bundled_envelope();
  const Vector theta = (Vector(3) << 0.3, -0.7, 0.1).finished();
  Matrix affine = env.g_v;
  for (int i = 0; i < 3; ++i) {
    affine += -0.5 * theta(i) * env.g_xi.middleCols(3 * i, 3) * env.terms[i].j.transpose();
  }
  EXPECT_LE((affine - env.constraint_at(theta)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Envelope, RankAboveSizeIsRejected) {
  const auto& b = bundled();
  EXPECT_THROW(build_uncertainty_envelope(b.lin.g, bundled_delta_g(), 43, {30, 41, 42, 43}, 79,
                                          b.lin.angle_shift()),
               InputError);
  EXPECT_THROW(build_uncertainty_envelope(b.lin.g, bundled_delta_g(), 43, {30, 44}, 3,
                                          b.lin.angle_shift()),
               InputError);
}

TEST(Envelope, SingularDiagonalPointsAreSingular) {
  const UncertaintyEnvelope env = bundled_envelope();
  const std::vector<double> pts = singular_diagonal_points(env);
  for (double t : pts) {
    ASSERT_GE(t, -1.0);
    ASSERT_LE(t, 1.0);
    const Vector sv = Eigen::JacobiSVD<Matrix>(env.constraint_at(Vector::Constant(3, t)))
                          .singularValues();
    EXPECT_LE(sv(sv.size() - 1) / sv(0), 1e-9) << t;
  }
  const Toy tt = toy(0.1);
  const auto small = build_uncertainty_envelope(tt.g, tt.delta_g, 1, {1, 2, 3}, 1, tt.shift);
  EXPECT_TRUE(singular_diagonal_points(small).empty());
}

// -------------------------------------------------------------- robust gain

TEST(RobustGain, CoversGridAndVertices) {
  const Toy t = toy(0.4);
  const UncertaintyEnvelope env = build_uncertainty_envelope(t.g, t.delta_g, 1, {1, 2, 3}, 1, t.shift);
  ASSERT_TRUE(singular_diagonal_points(env).empty());
  const RobustGain rg = certify_robust_gain(env, t.red, Matrix());
  ASSERT_TRUE(rg.certified) << rg.message;
  EXPECT_TRUE(rg.verification.pass);
  for (const Matrix& x : rg.xs) EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(x).eigenvalues().minCoeff(), -1e-7);
  for (const Matrix& y : rg.ys) EXPECT_LE((y + y.transpose()).cwiseAbs().maxCoeff(), 0.0);

  const SweepReport sw = sweep_theta(env, t.red, Matrix(), 0.5);
  EXPECT_EQ(sw.failures, 0);
  for (const auto& pt : sw.points) {
    const double oracle = dae::hinf_oracle(t.red.system(env.constraint_at(pt.theta))).gamma;
    EXPECT_LE(oracle, rg.gamma * (1 + 1e-6));
    EXPECT_NEAR(pt.gain.gamma, oracle, 5e-3 * oracle);
  }
  EXPECT_LE(sw.max_gamma, rg.gamma * (1 + 1e-6));
}

TEST(RobustGain, ZeroEnvelopeMatchesLosslessGain) {
  Toy t = toy(0.0);
  const UncertaintyEnvelope env = build_uncertainty_envelope(t.g, t.delta_g, 1, {1, 2, 3}, 1, t.shift);
  const RobustGain rg = certify_robust_gain(env, t.red, Matrix());
  ASSERT_TRUE(rg.certified) << rg.message;
  const double oracle = dae::hinf_oracle(t.red.system(t.g)).gamma;
  EXPECT_NEAR(rg.gamma, oracle, 5e-3 * oracle);
}

TEST(RobustGain, AssemblyLayout) {
  const Toy t = toy(0.4);
  const UncertaintyEnvelope env = build_uncertainty_envelope(t.g, t.delta_g, 1, {1, 2, 3}, 2, t.shift);
  const sdp::SdpProblem prob = assemble_robust_gain(env, t.red, Matrix());
  ASSERT_TRUE(prob.find_matrix("P"));
  ASSERT_TRUE(prob.find_matrix("X1"));
  ASSERT_TRUE(prob.find_matrix("X2"));
  EXPECT_TRUE(prob.find_scalar("Y1[0,1]"));
  EXPECT_TRUE(prob.find_scalar("Y2[0,1]"));
  EXPECT_TRUE(prob.find_scalar("lambda"));
  EXPECT_TRUE(prob.find_scalar("gamma_sq"));
}

// ----------------------------------------------------------- gains, sweeps

TEST(Gains, PerLineMatchesOracleAndBaseVertex) {
  const auto& b = bundled();
  const ControllerDesign d = design_controller(b.red.system(b.lin.g), 0.5);
  const LineGain lg = per_line_hinf(b.lin, b.red, b.outages.at(43).delta_g, d.k, 43);
  ASSERT_TRUE(lg.lmi.ok) << lg.lmi.status;
  EXPECT_LE(lg.rel_error, 5e-3);
  const UncertaintyEnvelope env = bundled_envelope();
  const GainValue at_vertex = lossless_gain(b.red, env.constraint_at(env.vertex(43)), d.k);
  ASSERT_TRUE(at_vertex.ok);
  EXPECT_EQ(at_vertex.gamma, lg.lmi.gamma);
}

TEST(Sweep, AxisIncludesEndpointsAndCenter) {
  const auto axis = sweep_axis(0.1);
  ASSERT_EQ(axis.size(), 21u);
  EXPECT_EQ(axis.front(), -1.0);
  EXPECT_EQ(axis.back(), 1.0);
  EXPECT_EQ(axis[10], 0.0);
  EXPECT_EQ(sweep_axis(2.0), (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(sweep_axis(0.75).back(), 1.0);
  EXPECT_THROW(sweep_axis(0.0), InputError);
  EXPECT_THROW(sweep_axis(2.5), InputError);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const Toy t = toy(0.4);
  const UncertaintyEnvelope env = build_uncertainty_envelope(t.g, t.delta_g, 1, {1, 2, 3}, 1, t.shift);
  const SweepReport one = sweep_theta(env, t.red, Matrix(), 1.0, 1);
  const SweepReport many = sweep_theta(env, t.red, Matrix(), 1.0, 4);
  ASSERT_EQ(one.points.size(), 9u);
  ASSERT_EQ(many.points.size(), one.points.size());
  for (std::size_t i = 0; i < one.points.size(); ++i) {
    EXPECT_EQ(one.points[i].theta, many.points[i].theta);
    EXPECT_EQ(one.points[i].gain.gamma, many.points[i].gain.gamma);
  }
  EXPECT_EQ(one.max_gamma, many.max_gamma);
  EXPECT_EQ(sweep_csv(one), sweep_csv(many));
  // Last component varies fastest.
  EXPECT_EQ(one.points[1].theta, (Vector(2) << -1.0, 0.0).finished());
}

// ----------------------------------------------------------------- pipeline

TEST(Pipeline, StageNamesRoundTrip) {
  for (Stage s : {Stage::kLoadflow, Stage::kLinearize, Stage::kReduce, Stage::kDesignK,
                  Stage::kOutages, Stage::kEnvelope, Stage::kCertify, Stage::kSweep}) {
    EXPECT_EQ(stage_from_string(to_string(s)), s);
  }
  EXPECT_THROW(stage_from_string("solve"), InputError);
}

TEST(Pipeline, StopsAfterDesign) {
  PipelineOptions opts;
  opts.case_path = kCaseDir;
  opts.stop = Stage::kDesignK;
  const PipelineResult res = run_pipeline(opts);
  ASSERT_FALSE(res.failed) << res.failure;
  const auto& st = res.report.at("stages");
  EXPECT_TRUE(st.contains("reduce"));
  EXPECT_FALSE(st.contains("outages"));
  EXPECT_LE(st.at("linearize").at("zero_mode").at("constraint").get<double>(), 1e-8);
  EXPECT_LT(st.at("design-k").at("abscissa").get<double>(), -0.5);
  EXPECT_EQ(res.report.at("status"), "ok");
}

TEST(Pipeline, MissingCaseFailsFirstStage) {
  PipelineOptions opts;
  opts.case_path = "/nonexistent/case";
  const PipelineResult res = run_pipeline(opts);
  ASSERT_TRUE(res.failed);
  EXPECT_EQ(*res.failed, Stage::kLoadflow);
  EXPECT_EQ(res.report.at("failed_stage"), "loadflow");
}

TEST(Pipeline, BaseMustBeListed) {
  PipelineOptions opts;
  opts.case_path = kCaseDir;
  opts.base = 44;
  EXPECT_THROW(run_pipeline(opts), InputError);
}
