// Command-line front end: scenario construction, exact / Monte Carlo runs,
// F sweeps, fixed-point iteration, and machine-readable CSV/JSON output.
// Numbers are serialized with 17 significant digits so outputs are
// round-trip-exact and byte-stable for golden files.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace lqd::cli {

// Exit codes: 0 success, 2 config validation error, 3 internal invariant
// violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInternal = 3;

/// Inclusive F grid start:stop:step.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
};

struct RunConfig {
    std::string command;  // distill | sweep | iterate | state

    std::string kind = "logic-bit";  // logic-bit | logic-phase | physical-bit
    int m = 2;
    std::optional<double> F;
    std::optional<GridSpec> grid;
    std::string policy = "canonical";  // canonical | extended
    std::string mode = "exact";        // exact | montecarlo
    std::uint64_t trials = 100000;
    std::optional<std::uint64_t> seed;
    int rounds = 1;
    std::string strategy = "known-location";  // known-location | localize
    int flip_index = 1;
    bool verify_exact = false;
    std::string format = "json";  // json | csv (distill only; sweep is always CSV)
    std::string output;           // path; empty writes to stdout
    std::string state_name;       // for the `state` command
};

std::string format_double(double v);

/// Parses "start:stop:step".
GridSpec parse_grid(const std::string& text);

/// Applies the LQDISTILL_OUTPUT_DIR override to relative output paths.
std::string resolve_output_path(const std::string& path);

int run_distill(const RunConfig& config);
int run_sweep(const RunConfig& config);
int run_iterate(const RunConfig& config);
int run_state(const RunConfig& config);

/// Dispatches on config.command; maps validation failures to exit code 2 and
/// internal invariant violations to 3.
int run(const RunConfig& config);

/// Full argv interface (CLI11 subcommands plus --config JSON file; explicit
/// flags override file values).
int main_entry(int argc, char** argv);

}  // namespace lqd::cli
