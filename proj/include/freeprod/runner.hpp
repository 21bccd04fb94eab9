// runner.hpp — config-driven batch runner: parses a JSON task description,
// dispatches to the library, and emits a deterministic JSON report.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace freeprod {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<double> tol_override;
    bool with_timing = false;  // timing is opt-in so reports stay byte-stable
};

struct RunOutcome {
    nlohmann::json report;
    bool pass = false;
};

// Throws ConfigError on schema violations (message points at the field).
RunOutcome run_task(const nlohmann::json& config, const RunOptions& opts = {});

// Convenience: parse, run, serialize. Exit code semantics: 0 pass,
// 1 assertion failure, 2 config error.
int run_to_stream(const std::string& config_text, const RunOptions& opts,
                  std::string& out_report, std::string& out_error);

}  // namespace freeprod
