#pragma once

#include <nlohmann/json.hpp>

#include "daecert/certify/certify.hpp"

namespace daecert::certify {

nlohmann::json to_json(const Certificate& c);
/// Outcome, message, solver summary, certificate (if any) and audits.
nlohmann::json to_json(const CertifyResult& r);

}  // namespace daecert::certify
