#include "daecert/certify/json.hpp"

#include "daecert/core/json.hpp"
#include "daecert/sdp/json.hpp"

namespace daecert::certify {

using nlohmann::json;

json to_json(const Certificate& c) {
  json params = json::object();
  for (const auto& [name, m] : c.qc_params) params[name] = matrix_to_json(m);
  json out = {{"P", matrix_to_json(c.p)},
              {"P_delta", matrix_to_json(c.p_delta)},
              {"lambda", c.lambda},
              {"tau", c.tau},
              {"qc_params", params},
              {"gamma", c.gamma ? json(*c.gamma) : json(nullptr)},
              {"verification", sdp::to_json(c.verification)}};
  return out;
}

json to_json(const CertifyResult& r) {
  json out = {{"outcome", to_string(r.outcome)},
              {"message", r.message},
              {"solver",
               {{"status", sdp::to_string(r.solution.status)},
                {"iterations", r.solution.iterations},
                {"primal_residual", r.solution.primal_residual},
                {"dual_residual", r.solution.dual_residual},
                {"duality_gap", r.solution.duality_gap},
                {"margin", r.solution.margin}}}};
  out["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  if (r.infeasibility_audit) {
    const auto& a = *r.infeasibility_audit;
    out["infeasibility_audit"] = {{"stationarity", a.stationarity},
                                  {"min_eigenvalue", a.min_eigenvalue},
                                  {"violation", a.violation},
                                  {"pass", a.pass}};
  } else {
    out["infeasibility_audit"] = nullptr;
  }
  return out;
}

}  // namespace daecert::certify
