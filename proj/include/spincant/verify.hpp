#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spincant/app.hpp"
#include "spincant/oracle.hpp"

namespace spincant::app {

struct VerifyReport {
  std::vector<oracle::QuantityReport> quantities;
  bool pass = true;
  std::string worst;  // name of the quantity furthest over (or nearest to) its tolerance
  std::string worst_case;
  double worst_ratio = 0.0;  // max_error / tolerance
  std::vector<std::string> notes;
};

/// Random coefficient suite, reference cases, analytic limits and property
/// checks. The configured parameters (if any) are added as an extra case.
VerifyReport run_verification(const RunConfig& c);

nlohmann::json to_json(const VerifyReport& r, const RunConfig& c);

}  // namespace spincant::app
