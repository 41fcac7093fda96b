// Run orchestration: one directory per scenario with CSV payloads and metadata.json

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "steer/scenario.hpp"

namespace steer {

struct RunOptions {
    std::filesystem::path out_root = "runs";
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    std::string version;
};

struct RunResult {
    std::filesystem::path directory;
    bool ok = true;
    std::vector<std::string> failures;
    nlohmann::json metadata;
};

// Creates <out_root>/<UTC timestamp>-<scenario hash>/ and runs the scenario's mode there.
// Sub-run failures do not abort siblings; they are flagged in metadata and `failures`.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

std::string tool_version();

} // namespace steer
