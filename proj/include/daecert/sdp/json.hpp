#pragma once

#include <nlohmann/json.hpp>

#include "daecert/sdp/check.hpp"
#include "daecert/sdp/problem.hpp"
#include "daecert/sdp/solver.hpp"

namespace daecert::sdp {

nlohmann::json to_json(const SdpProblem& problem);
SdpProblem problem_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SdpSolution& solution);
nlohmann::json to_json(const VerificationReport& report);

}  // namespace daecert::sdp
