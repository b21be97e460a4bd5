#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace rml::cli {

enum ExitCode : int { kPass = 0, kAssertionFailure = 1, kConfigError = 2, kResolutionError = 3 };

// Verify kinds: bound, propositions, chain, equivalence, critical, dual.
const std::vector<std::string>& verify_kinds();
nlohmann::json default_config(const std::string& kind);

// Defaults overlaid with `overrides`; unknown keys are a config error.
nlohmann::json resolve_config(const std::string& kind, const nlohmann::json& overrides);

// Runs one verification on a resolved config. The report carries the config,
// results, assertion records, overall verdict and a SHA-256 of the rest.
nlohmann::json run_verify(const std::string& kind, const nlohmann::json& config);

// Hex SHA-256 of the compact dump of `report` without its "sha256" field.
std::string report_hash(const nlohmann::json& report);

// Rows of the equivalence table as CSV.
std::string equivalence_csv(const nlohmann::json& report);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rml::cli
