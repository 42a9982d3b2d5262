#pragma once

#include "slabkin/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace slabkin {

inline constexpr const char* version_string = "0.1.0";

/// Profile file name for one Kn, e.g. profile_kn1.csv, profile_kn0.05.csv.
std::string profile_file_name(double knudsen);

/// Runs every configured stage and writes the artifacts into
/// config.output.directory. Returns the summary that summary.json holds.
/// Throws InvalidArgument, DivergenceError or IoError.
nlohmann::json run_experiment(const RunConfig& config);

/// Versions and build facts recorded in the provenance block.
nlohmann::json version_info();

/// 2 for invalid input, 3 for divergence, 4 for I/O, 1 otherwise.
int exit_code_for(const std::exception& e);

} // namespace slabkin
