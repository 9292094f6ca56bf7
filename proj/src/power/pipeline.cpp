#include "daecert/power/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "daecert/core/json.hpp"
#include "daecert/power/controller.hpp"
#include "daecert/power/envelope.hpp"
#include "daecert/power/linearize.hpp"
#include "daecert/sdp/json.hpp"

namespace daecert::power {

namespace {

using nlohmann::json;

constexpr double kMismatchTol = 1e-8;
constexpr double kZeroModeTol = 1e-8;
constexpr double kJacobianTol = 1e-5;
constexpr double kResponseTol = 1e-8;
constexpr double kOracleTol = 5e-3;

const std::vector<std::pair<Stage, std::string>>& stage_names() {
  static const std::vector<std::pair<Stage, std::string>> names{
      {Stage::kLoadflow, "loadflow"}, {Stage::kLinearize, "linearize"},
      {Stage::kReduce, "reduce"},     {Stage::kDesignK, "design-k"},
      {Stage::kOutages, "outages"},   {Stage::kEnvelope, "envelope"},
      {Stage::kCertify, "certify"},   {Stage::kSweep, "sweep"}};
  return names;
}

json gain_json(const GainValue& g) {
  json j{{"ok", g.ok}, {"status", g.status}};
  j["gamma"] = g.ok ? json(g.gamma) : json(nullptr);
  return j;
}

json matrix_summary(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"sum", m.sum()}, {"frobenius", m.norm()}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Largest relative difference of the w → y responses over `omegas`.
double response_gap(const dae::LinearDae& reduced, const dae::LinearDae& full,
                    const std::vector<double>& omegas) {
  double worst = 0.0;
  for (double w : omegas) {
    const ComplexMatrix hr = dae::frequency_response(reduced, w);
    const ComplexMatrix hf = dae::frequency_response(full, w);
    worst = std::max(worst, (hr - hf).norm() / std::max(1.0, hf.norm()));
  }
  return worst;
}

struct Failure {
  Stage stage;
  std::string message;
};

}  // namespace

std::string to_string(Stage s) {
  for (const auto& [st, name] : stage_names()) {
    if (st == s) return name;
  }
  return "unknown";
}

Stage stage_from_string(const std::string& name) {
  for (const auto& [st, n] : stage_names()) {
    if (n == name) return st;
  }
  std::string all;
  for (const auto& [st, n] : stage_names()) all += (all.empty() ? "" : ", ") + n;
  throw InputError("unknown stage '" + name + "' (expected one of " + all + ")");
}

PipelineResult run_pipeline(const PipelineOptions& opts) {
  if (std::find(opts.lines.begin(), opts.lines.end(), opts.base) == opts.lines.end()) {
    throw InputError("base line " + std::to_string(opts.base) + " is not in the line set");
  }
  std::vector<int> sorted = opts.lines;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("line set contains duplicates");
  }
  sweep_axis(opts.step);

  PipelineResult out;
  json& rep = out.report;
  rep["schema"] = 1;
  rep["command"] = "power39";
  rep["config"] = {{"case", opts.case_path}, {"lines", opts.lines},     {"base", opts.base},
                   {"rank", opts.rank},      {"alpha", opts.alpha},     {"step", opts.step},
                   {"stop", to_string(opts.stop)}, {"solver_tol", opts.certify.solver.tol}};
  json& stages = rep["stages"];
  stages = json::object();

  std::optional<Failure> failure;
  auto record_failure = [&](Stage s, const std::string& msg) {
    if (!failure) failure = Failure{s, msg};
  };
  auto wants = [&](Stage s) { return static_cast<int>(s) <= static_cast<int>(opts.stop); };

  NetworkCase net;
  OperatingPoint op;
  LinearizedPowerDae lin;
  ReducedPowerDae red;
  ControllerDesign design;
  std::map<int, OutagePerturbation> outages;
  std::vector<LineGain> line_gains;
  UncertaintyEnvelope env;
  std::optional<double> max_line, max_vertex, gamma_rob, sweep_max;

  // Stages up to the envelope feed every later stage, so their failures stop
  // the run.
  auto run = [&](Stage s, auto&& body) -> bool {
    if (failure || !wants(s)) return false;
    json section;
    try {
      body(section);
    } catch (const std::exception& e) {
      section["error"] = e.what();
      record_failure(s, e.what());
    }
    stages[to_string(s)] = section;
    return !failure;
  };

  run(Stage::kLoadflow, [&](json& sec) {
    net = load_case(opts.case_path);
    op = solve_power_flow(net, opts.power_flow);
    sec["case"] = {{"name", net.name},
                   {"buses", net.buses.size()},
                   {"branches", net.branches.size()},
                   {"generators", net.n_gen()}};
    sec["iterations"] = op.iterations;
    sec["mismatch"] = op.mismatch;
    json buses = json::array();
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
      buses.push_back({{"id", net.buses[i].id}, {"vm", op.vm(i)}, {"va", op.va(i)}});
    }
    sec["buses"] = buses;
    json gens = json::array();
    for (int i = 0; i < net.n_gen(); ++i) {
      gens.push_back({{"bus", net.generators[i].bus},
                      {"e", op.e(i)},
                      {"delta", op.delta(i)},
                      {"p_m", op.p_m(i)}});
    }
    sec["generators"] = gens;
    const bool ok = op.mismatch <= kMismatchTol;
    sec["checks"] = {{"mismatch_le_1e-8", ok}};
    if (!ok) record_failure(Stage::kLoadflow, "power-flow mismatch above 1e-8");
  });

  run(Stage::kLinearize, [&](json& sec) {
    lin = assemble_linearization(net, op);
    const ZeroModeResiduals z = zero_mode_residuals(lin);
    const JacobianAudit fd = audit_jacobians(net, op, lin);
    sec["dimensions"] = {{"n_gen", lin.n_gen},
                         {"n_load", lin.n_load},
                         {"states", lin.a_bar.rows()},
                         {"algebraic", lin.g.rows()}};
    sec["matrices"] = {{"A_bar", matrix_summary(lin.a_bar)},
                       {"B_v_bar", matrix_summary(lin.b_v_bar)},
                       {"F_bar", matrix_summary(lin.f_bar)},
                       {"G", matrix_summary(lin.g)},
                       {"C_bar", matrix_summary(lin.c_bar)}};
    sec["zero_mode"] = {{"dynamics", z.dynamics}, {"constraint", z.constraint}, {"output", z.output}};
    sec["jacobian_audit"] = {{"g_rel", fd.g_rel}, {"f_rel", fd.f_rel}};
    const bool zero_ok = z.max() <= kZeroModeTol;
    const bool fd_ok = fd.g_rel <= kJacobianTol && fd.f_rel <= kJacobianTol;
    sec["checks"] = {{"zero_mode_le_1e-8", zero_ok}, {"jacobian_le_1e-5", fd_ok}};
    if (!zero_ok) record_failure(Stage::kLinearize, "zero-mode residual above 1e-8");
    if (!fd_ok) record_failure(Stage::kLinearize, "G differs from finite differences");
  });

  run(Stage::kReduce, [&](json& sec) {
    red = reduce(lin);
    const double orth = (red.q.transpose() * red.q -
                         Matrix::Identity(red.q.cols(), red.q.cols())).cwiseAbs().maxCoeff();
    std::vector<double> omegas{0.5, 2.0, 10.0};
    for (int i = 0; i < 10; ++i) omegas.push_back(std::pow(10.0, -1.0 + 3.0 * i / 9.0));
    const double gap = response_gap(red.system(lin.g), unreduced_system(lin, lin.g), omegas);
    const double unobservable = (lin.c_bar * lin.state_shift()).cwiseAbs().maxCoeff();
    sec["states"] = red.a.rows();
    sec["q_orthonormality"] = orth;
    sec["response_gap"] = gap;
    sec["frequencies"] = omegas;
    sec["shift_output"] = unobservable;
    sec["open_loop_abscissa"] = spectral_abscissa(dae::eliminate_algebraic(red.system(lin.g)).a);
    const bool ok = orth <= 1e-10 && gap <= kResponseTol && unobservable <= kZeroModeTol;
    sec["checks"] = {{"q_orthonormal", orth <= 1e-10},
                     {"response_le_1e-8", gap <= kResponseTol},
                     {"shift_unobservable", unobservable <= kZeroModeTol}};
    if (!ok) record_failure(Stage::kReduce, "reduction changed the input-output behavior");
  });

  run(Stage::kDesignK, [&](json& sec) {
    design = design_controller(red.system(lin.g), opts.alpha, opts.certify.solver);
    sec["alpha"] = opts.alpha;
    sec["abscissa"] = design.abscissa;
    sec["open_loop_sufficient"] = design.open_loop_sufficient;
    sec["k_norm"] = design.k.norm();
    sec["k"] = matrix_to_json(design.k);
    sec["checks"] = {{"abscissa_below_minus_alpha", design.abscissa < -opts.alpha}};
  });

  run(Stage::kOutages, [&](json& sec) {
    json lines = json::array();
    bool ok = true;
    for (int line : opts.lines) {
      const OutagePerturbation p = line_outage_perturbation(net, op, line);
      const Matrix g_line = lin.g + p.delta_g;
      const double zm = zero_mode_residuals(lin, &g_line).max();
      const LineGain lg = per_line_hinf(lin, red, p.delta_g, design.k, line, opts.certify);
      const bool line_ok = zm <= kZeroModeTol && lg.lmi.ok && lg.rel_error <= kOracleTol;
      ok = ok && line_ok;
      lines.push_back({{"line", line},
                       {"raw_shift_residual", p.raw_shift_residual},
                       {"projection_change", p.projection_change},
                       {"zero_mode", zm},
                       {"lmi", gain_json(lg.lmi)},
                       {"oracle", lg.oracle},
                       {"oracle_omega", lg.oracle_omega},
                       {"rel_error", lg.lmi.ok ? json(lg.rel_error) : json(nullptr)},
                       {"checks", {{"zero_mode_le_1e-8", zm <= kZeroModeTol},
                                   {"lmi_matches_oracle", lg.lmi.ok && lg.rel_error <= kOracleTol}}}});
      if (lg.lmi.ok) max_line = std::max(max_line.value_or(0.0), lg.lmi.gamma);
      outages[line] = p;
      line_gains.push_back(lg);
    }
    sec["lines"] = lines;
    sec["max_gamma"] = optional_number(max_line);
    if (!ok) record_failure(Stage::kOutages, "per-line gain or zero-mode check failed");
  });

  run(Stage::kEnvelope, [&](json& sec) {
    std::map<int, Matrix> delta_g;
    for (const auto& [line, p] : outages) delta_g[line] = p.delta_g;
    env = build_uncertainty_envelope(lin.g, delta_g, opts.base, opts.lines, opts.rank,
                                     lin.angle_shift());
    json terms = json::array();
    double shift_leak = 0.0;
    for (const auto& t : env.terms) {
      const double leak = (t.j.transpose() * lin.angle_shift()).cwiseAbs().maxCoeff();
      shift_leak = std::max(shift_leak, leak);
      terms.push_back({{"line", t.line_id},
                       {"singular_values", vector_to_json(t.singular_values.head(
                                               std::min<Eigen::Index>(8, t.singular_values.size())))},
                       {"decay", t.decay},
                       {"truncation_residual", t.truncation_residual},
                       {"j_shift", leak}});
    }
    sec["terms"] = terms;
    const double base_gap =
        (env.constraint_at(env.vertex(opts.base)) - (lin.g + outages.at(opts.base).delta_g))
            .cwiseAbs()
            .maxCoeff();
    sec["base_vertex_gap"] = base_gap;

    json vertices = json::array();
    for (int line : opts.lines) {
      const Vector theta = env.vertex(line);
      const Matrix g_v = env.constraint_at(theta);
      const GainValue gv = lossless_gain(red, g_v, design.k, opts.certify);
      const dae::HinfResult h = dae::hinf_oracle(red.system(g_v, design.k));
      vertices.push_back({{"line", line}, {"theta", vector_to_json(theta)},
                          {"lmi", gain_json(gv)}, {"oracle", h.gamma}});
      if (gv.ok) max_vertex = std::max(max_vertex.value_or(0.0), gv.gamma);
    }
    sec["vertices"] = vertices;
    sec["max_vertex_gamma"] = optional_number(max_vertex);
    const std::vector<double> singular = singular_diagonal_points(env);
    sec["singular_diagonal_points"] = singular;
    sec["checks"] = {{"base_vertex_exact", base_gap == 0.0},
                     {"j_orthogonal_to_shift", shift_leak <= 1e-10},
                     {"diagonal_well_posed", singular.empty()}};
    if (base_gap != 0.0 || shift_leak > 1e-10) {
      record_failure(Stage::kEnvelope, "envelope structure check failed");
    }
  });

  // The robust-gain outcome does not feed the sweep; record it and go on.
  std::optional<Failure> certify_failure;
  if (!failure && wants(Stage::kCertify)) {
    json sec;
    try {
      const std::vector<double> singular = singular_diagonal_points(env);
      if (!singular.empty()) {
        std::ostringstream msg;
        msg << "infeasible: the constraint matrix is singular at theta = " << std::setprecision(6)
            << singular.front() << "*(1,...,1) inside the parameter box, so no finite gain bound "
            << "exists for any controller";
        sec["outcome"] = "infeasible";
        sec["message"] = msg.str();
        sec["solved"] = false;
      } else {
        const RobustGain rg = certify_robust_gain(env, red, design.k, opts.robust);
        sec["solved"] = true;
        sec["outcome"] = rg.certified ? "certified" : "failed";
        sec["message"] = rg.message;
        sec["solver"] = sdp::to_json(rg.solution);
        sec["audit"] = sdp::to_json(rg.verification);
        if (rg.certified) {
          gamma_rob = rg.gamma;
          sec["gamma_rob"] = rg.gamma;
          sec["lambda"] = rg.lambda;
          json qc = json::array();
          for (std::size_t i = 0; i < rg.xs.size(); ++i) {
            qc.push_back({{"X", matrix_to_json(rg.xs[i])}, {"Y", matrix_to_json(rg.ys[i])}});
          }
          sec["qc_params"] = qc;
        }
      }
      sec["gamma_rob"] = optional_number(gamma_rob);
      const bool ge_lines = gamma_rob && max_line && *gamma_rob >= *max_line;
      const bool ge_vertices = gamma_rob && max_vertex && *gamma_rob >= *max_vertex;
      sec["checks"] = {{"certified", gamma_rob.has_value()},
                       {"ge_max_per_line", ge_lines},
                       {"ge_max_vertex", ge_vertices}};
      if (!gamma_rob) {
        certify_failure = Failure{Stage::kCertify, sec["message"].get<std::string>()};
      } else if (!ge_lines || !ge_vertices) {
        certify_failure = Failure{Stage::kCertify, "robust bound below a covered gain"};
      }
    } catch (const std::exception& e) {
      sec["error"] = e.what();
      certify_failure = Failure{Stage::kCertify, e.what()};
    }
    stages["certify"] = sec;
  }

  if (!failure && wants(Stage::kSweep)) {
    json sec;
    try {
      SweepReport sw = sweep_theta(env, red, design.k, opts.step, opts.jobs, opts.certify);
      sec["step"] = sw.step;
      sec["axis"] = sw.axis;
      sec["points"] = sw.points.size();
      sec["failures"] = sw.failures;
      if (sw.argmax.size() > 0) {
        sweep_max = sw.max_gamma;
        sec["max_gamma"] = sw.max_gamma;
        sec["argmax"] = vector_to_json(sw.argmax);
      } else {
        sec["max_gamma"] = nullptr;
        sec["argmax"] = nullptr;
      }
      json table = json::array();
      for (const auto& pt : sw.points) {
        table.push_back({{"theta", vector_to_json(pt.theta)}, {"gain", gain_json(pt.gain)}});
      }
      sec["table"] = table;
      const bool covered = gamma_rob && sweep_max && *sweep_max <= *gamma_rob;
      sec["checks"] = {{"all_points_solved", sw.failures == 0}, {"max_le_gamma_rob", covered}};
      if (sw.failures > 0) {
        record_failure(Stage::kSweep, std::to_string(sw.failures) + " grid points without a gain");
      } else if (gamma_rob && !covered) {
        record_failure(Stage::kSweep, "grid maximum exceeds the robust bound");
      }
      out.sweep = std::move(sw);
    } catch (const std::exception& e) {
      sec["error"] = e.what();
      record_failure(Stage::kSweep, e.what());
    }
    stages["sweep"] = sec;
  }
  if (certify_failure && (!failure || static_cast<int>(certify_failure->stage) <
                                          static_cast<int>(failure->stage))) {
    failure = certify_failure;
  }

  const ReferenceValues ref;
  json per_line = json::array();
  for (const auto& [line, value] : ref.per_line) {
    json row{{"line", line}, {"reference", value}, {"ours", nullptr}};
    for (const auto& lg : line_gains) {
      if (lg.line_id == line && lg.lmi.ok) row["ours"] = lg.lmi.gamma;
    }
    per_line.push_back(row);
  }
  auto ratio = [](const std::optional<double>& a, const std::optional<double>& b) -> json {
    if (!a || !b || *b <= 0.0) return nullptr;
    return *a / *b - 1.0;
  };
  rep["conservatism"] = {
      {"gamma_rob", {{"reference", ref.gamma_rob}, {"ours", optional_number(gamma_rob)}}},
      {"per_line", per_line},
      {"sweep_max",
       {{"reference", ref.sweep_max},
        {"reference_argmax", ref.sweep_argmax},
        {"ours", optional_number(sweep_max)},
        {"ours_argmax", out.sweep && out.sweep->argmax.size() > 0
                            ? vector_to_json(out.sweep->argmax)
                            : json(nullptr)}}},
      {"over_max_per_line", {{"reference", ref.over_lines}, {"ours", ratio(gamma_rob, max_line)}}},
      {"over_sweep_max", {{"reference", ref.over_grid}, {"ours", ratio(gamma_rob, sweep_max)}}}};

  if (failure) {
    out.failed = failure->stage;
    out.failure = failure->message;
    rep["status"] = "failed";
    rep["failed_stage"] = to_string(failure->stage);
    rep["message"] = failure->message;
  } else {
    rep["status"] = "ok";
  }
  return out;
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream os;
  os << std::setprecision(10);
  const Eigen::Index dims = rep.points.empty() ? 0 : rep.points.front().theta.size();
  for (Eigen::Index d = 0; d < dims; ++d) os << "theta" << d + 1 << ',';
  os << "gamma,status\n";
  for (const auto& pt : rep.points) {
    for (Eigen::Index d = 0; d < dims; ++d) os << pt.theta(d) << ',';
    if (pt.gain.ok) os << pt.gain.gamma;
    std::string status = pt.gain.ok ? "ok" : pt.gain.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << ',' << status << '\n';
  }
  return os.str();
}

}  // namespace daecert::power
