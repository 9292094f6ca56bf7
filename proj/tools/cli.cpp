#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "daecert/certify/certify.hpp"
#include "daecert/certify/json.hpp"
#include "daecert/dae/json.hpp"
#include "daecert/power/pipeline.hpp"
#include "daecert/sdp/json.hpp"
#include "daecert/sos/thm1.hpp"

#ifndef DAECERT_DATA_DIR
#define DAECERT_DATA_DIR "data"
#endif

namespace daecert::cli {

namespace {

using nlohmann::json;

struct SolverFlags {
  double tol = 0.0;
  int max_iters = 200;
  double audit_factor = 10.0;

  void add(CLI::App* app) {
    tol = default_solver_tol();
    app->add_option("--tol", tol, "Solver tolerance (env DAE_CERTIFY_SOLVER_TOL)")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-iters", max_iters, "Solver iteration limit")->check(CLI::PositiveNumber);
    app->add_option("--audit-factor", audit_factor, "Audit tolerance as a multiple of --tol")
        ->check(CLI::PositiveNumber);
  }
  sdp::SolverOptions solver() const {
    sdp::SolverOptions s;
    s.tol = tol;
    s.max_iters = max_iters;
    return s;
  }
};

dae::SupplyKind supply_kind(const std::string& name) {
  if (name == "stability") return dae::SupplyKind::kStability;
  if (name == "passivity") return dae::SupplyKind::kPassivity;
  if (name == "l2gain") return dae::SupplyKind::kL2Gain;
  throw InputError("unknown supply '" + name + "'");
}

void emit(const json& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write report to '" + path + "'");
  f << text;
}

int exit_for(certify::Outcome o) {
  switch (o) {
    case certify::Outcome::kCertified:
      return kOk;
    case certify::Outcome::kInfeasible:
      return kInfeasible;
    case certify::Outcome::kNumericalFailure:
      break;
  }
  return kNumericalFailure;
}

struct CertifyCmd {
  std::string model, supply = "l2gain", out;
  std::optional<double> gamma;
  SolverFlags solver;

  int run(std::ostream& os) const {
    const dae::Model m = dae::load_model(model);
    if (!m.is_linear()) throw InputError("certify expects a linear model; use 'sos'");
    const auto& sys = std::get<dae::LinearDae>(m.system);
    const dae::SupplyKind kind = supply_kind(supply);
    certify::CertifyOptions opts;
    opts.solver = solver.solver();
    opts.audit_factor = solver.audit_factor;

    certify::CertifyResult res;
    std::string mode;
    if (kind == dae::SupplyKind::kL2Gain && !gamma) {
      mode = "min_gain";
      res = certify::min_l2_gain(sys, m.uncertainty, opts);
    } else {
      if (kind == dae::SupplyKind::kL2Gain && !(*gamma > 0.0)) {
        throw InputError("--gamma must be positive");
      }
      mode = "feasibility";
      const auto s = dae::make_supply_rate(kind, sys, gamma.value_or(0.0));
      res = certify::certify(sys, s, m.uncertainty, opts);
    }
    int code = exit_for(res.outcome);
    // A certificate is only reported with a passing audit.
    if (code == kOk && !(res.certificate && res.certificate->verification.pass)) {
      code = kNumericalFailure;
    }
    json rep{{"schema", 1},
             {"command", "certify"},
             {"model", model},
             {"supply", supply},
             {"gamma", gamma ? json(*gamma) : json(nullptr)},
             {"mode", mode},
             {"solver_tol", solver.tol},
             {"result", certify::to_json(res)},
             {"exit_code", code}};
    emit(rep, out, os);
    return code;
  }
};

sos::BasisPruning pruning_from(const std::string& name) {
  if (name == "none") return sos::BasisPruning::kNone;
  if (name == "support") return sos::BasisPruning::kSupport;
  if (name == "facial") return sos::BasisPruning::kFacial;
  throw InputError("unknown pruning '" + name + "'");
}

json polynomial_json(const sos::Polynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exponent", e}, {"coef", c}});
  return {{"vars", p.vars()}, {"text", p.to_string()}, {"terms", terms}};
}

struct SosCmd {
  std::string model, supply = "stability", prune = "none", out;
  double gamma = 0.0;
  int deg_v = 4;
  double eps = 1e-3;
  SolverFlags solver;

  int run(std::ostream& os) const {
    const dae::Model m = dae::load_model(model);
    if (m.is_linear()) throw InputError("sos expects a polynomial model; use 'certify'");
    const auto& sys = std::get<dae::PolynomialDae>(m.system);
    const dae::SupplyKind kind = supply_kind(supply);
    if (kind == dae::SupplyKind::kL2Gain && !(gamma > 0.0)) {
      throw InputError("--gamma must be positive for l2gain");
    }
    sos::Thm1Options th;
    th.deg_v = deg_v;
    th.epsilon = eps;
    sos::Thm1Program prog =
        sos::build_thm1_sos_program(sys, sos::supply_polynomial(kind, sys, gamma), m.uncertainty, th);
    prog.program.pruning = pruning_from(prune);
    const sos::CompiledSos compiled = sos::compile_sos(prog.program);

    json rep{{"schema", 1}, {"command", "sos"}, {"model", model},  {"supply", supply},
             {"degV", deg_v}, {"eps", eps},     {"prune", prune},  {"solver_tol", solver.tol}};
    int code = kNumericalFailure;
    if (compiled.infeasible_reason) {
      rep["outcome"] = "infeasible";
      rep["message"] = *compiled.infeasible_reason;
      rep["solver"] = nullptr;
      code = kInfeasible;
    } else {
      const sdp::SdpSolution sol = sdp::solve(compiled.problem, solver.solver());
      rep["solver"] = {{"status", sdp::to_string(sol.status)},
                       {"iterations", sol.iterations},
                       {"primal_residual", sol.primal_residual},
                       {"dual_residual", sol.dual_residual},
                       {"message", sol.message}};
      if (sol.ok()) {
        try {
          const sos::SosCertificate cert = sos::extract_certificate(prog.program, compiled, sol);
          const double gram_tol = -solver.audit_factor * solver.tol;
          json grams = json::array();
          for (const auto& g : cert.grams) {
            grams.push_back({{"name", g.name},
                             {"size", g.basis.size()},
                             {"min_eigenvalue", g.min_eigenvalue},
                             {"residual", g.residual}});
          }
          json polys = json::object();
          for (const auto& [name, p] : cert.polynomials) polys[name] = polynomial_json(p);
          rep["certificate"] = {{"polynomials", polys},
                                {"scalars", cert.scalars},
                                {"grams", grams},
                                {"max_residual", cert.max_residual},
                                {"min_gram_eigenvalue", cert.min_gram_eigenvalue}};
          const bool pass = cert.min_gram_eigenvalue >= gram_tol;
          rep["audit"] = {{"pass", pass}, {"gram_eigenvalue_floor", gram_tol}};
          rep["outcome"] = pass ? "feasible" : "failed_audit";
          code = pass ? kOk : kNumericalFailure;
        } catch (const std::runtime_error& e) {
          rep["outcome"] = "failed_audit";
          rep["message"] = e.what();
        }
      } else if (sol.status == sdp::Status::kInfeasible) {
        rep["outcome"] = "infeasible";
        code = kInfeasible;
        if (sol.certificate) {
          const auto a = sdp::audit_certificate(compiled.problem, *sol.certificate,
                                                solver.audit_factor * solver.tol);
          rep["audit"] = {{"stationarity", a.stationarity},
                          {"min_eigenvalue", a.min_eigenvalue},
                          {"violation", a.violation},
                          {"pass", a.pass}};
        }
      } else {
        rep["outcome"] = "numerical_failure";
      }
    }
    rep["exit_code"] = code;
    emit(rep, out, os);
    return code;
  }
};

struct PowerCmd {
  std::string case_path = std::string(DAECERT_DATA_DIR) + "/ieee39";
  std::string stage = "sweep", lines = "30,41,42,43", out, csv;
  int base = 43, rank = 3, jobs = 1;
  double step = 0.1, alpha = 0.5;
  SolverFlags solver;

  int run(std::ostream& os, std::ostream& err) const {
    power::PipelineOptions opts;
    opts.case_path = case_path;
    opts.stop = power::stage_from_string(stage);
    opts.lines.clear();
    std::stringstream ss(lines);
    for (std::string tok; std::getline(ss, tok, ',');) {
      try {
        std::size_t used = 0;
        opts.lines.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InputError("--lines: '" + tok + "' is not a line id");
      }
    }
    opts.base = base;
    opts.rank = rank;
    opts.jobs = jobs;
    opts.step = step;
    opts.alpha = alpha;
    opts.certify.solver = solver.solver();
    opts.certify.audit_factor = solver.audit_factor;
    opts.robust.solver = solver.solver();
    opts.robust.audit_factor = solver.audit_factor;

    const power::PipelineResult res = power::run_pipeline(opts);
    const int code = res.failed ? kStageFailure : kOk;
    json rep = res.report;
    rep["exit_code"] = code;
    emit(rep, out, os);
    if (!csv.empty() && res.sweep) {
      std::ofstream f(csv);
      if (!f) throw InputError("cannot write sweep table to '" + csv + "'");
      f << power::sweep_csv(*res.sweep);
    }
    if (res.failed) err << "stage " << power::to_string(*res.failed) << " failed: " << res.failure << "\n";
    return code;
  }
};

}  // namespace

double default_solver_tol() {
  if (const char* env = std::getenv("DAE_CERTIFY_SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
  }
  return 1e-8;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dissipativity certification for uncertain DAE systems", "daecert"};
  app.require_subcommand(1);

  CertifyCmd cert;
  auto* c = app.add_subcommand("certify", "LMI certificate for a linear model");
  c->add_option("--model", cert.model, "Model JSON")->required();
  c->add_option("--supply", cert.supply, "stability | passivity | l2gain")
      ->check(CLI::IsMember({"stability", "passivity", "l2gain"}));
  c->add_option("--gamma", cert.gamma, "Gain level; omit with l2gain to minimize");
  c->add_option("--out", cert.out, "Report path (default stdout)");
  cert.solver.add(c);

  SosCmd sos;
  auto* s = app.add_subcommand("sos", "SOS certificate for a polynomial model");
  s->add_option("--model", sos.model, "Model JSON")->required();
  s->add_option("--supply", sos.supply, "stability | passivity | l2gain")
      ->check(CLI::IsMember({"stability", "passivity", "l2gain"}));
  s->add_option("--gamma", sos.gamma, "Gain level for l2gain");
  s->add_option("--degV", sos.deg_v, "Storage degree")->check(CLI::Range(2, 12));
  s->add_option("--eps", sos.eps, "Positivity margin")->check(CLI::NonNegativeNumber);
  s->add_option("--prune", sos.prune, "none | support | facial")
      ->check(CLI::IsMember({"none", "support", "facial"}));
  s->add_option("--out", sos.out, "Report path (default stdout)");
  sos.solver.add(s);

  PowerCmd pw;
  auto* p = app.add_subcommand("power39", "Line-failure robustness pipeline");
  p->add_option("--case", pw.case_path, "Case directory or case.json");
  p->add_option("--stage", pw.stage, "Last stage to run");
  p->add_option("--lines", pw.lines, "Contingency line ids, comma separated");
  p->add_option("--base", pw.base, "Base contingency");
  p->add_option("--rank", pw.rank, "Envelope rank per term")->check(CLI::PositiveNumber);
  p->add_option("--step", pw.step, "Sweep grid step in (0, 2]");
  p->add_option("--alpha", pw.alpha, "Pole-region margin")->check(CLI::NonNegativeNumber);
  p->add_option("--jobs", pw.jobs, "Sweep threads")->check(CLI::PositiveNumber);
  p->add_option("--out", pw.out, "Report path (default stdout)");
  p->add_option("--csv", pw.csv, "Sweep table path");
  pw.solver.add(p);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (c->parsed()) return cert.run(out);
    if (s->parsed()) return sos.run(out);
    return pw.run(out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace daecert::cli
