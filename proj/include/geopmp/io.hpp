#pragma once

// Problem files (JSON, version "geopmp-problem/1"), trajectory CSV and the
// JSON forms of certificates, reports and solver results.

#include "geopmp/frequency.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/problem.hpp"
#include "geopmp/solvers.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace geopmp {

inline constexpr const char* kProblemVersion = "geopmp-problem/1";

using Json = nlohmann::json;

/// Throws ParseError located by JSON pointer on any schema violation.
ControlProblem parse_problem(const Json& doc);
ControlProblem parse_problem_text(const std::string& text);
ControlProblem parse_problem_file(const std::string& path);

/// Canonical problem file: every default filled in and every per-stage field
/// expanded. Only problems that came from a file carry a descriptor.
std::string serialize_problem(const ControlProblem& problem);

/// Header t,x0..x{N-1},u0..u{m-1}; one row per t = 0..T, controls blank on
/// the last row.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const ControlProblem& problem, const std::string& text);

/// Numeric CSV table. A header row is skipped when it does not parse.
std::vector<std::vector<double>> read_numeric_csv(const std::string& text);

/// bin,re,im,abs
std::string dft_to_csv(const CVec& spectrum);

Json to_json(const PMPCertificate& cert);
PMPCertificate certificate_from_json(const ControlProblem& problem, const Json& j);
Json to_json(const PMPReport& report);
Json to_json(const SolveResult& result);
Json to_json(const FrequencyConstraintMatrices& mats);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace geopmp
