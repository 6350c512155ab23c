#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace semidot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     ///< selftest failures
inline constexpr int kExitBadInput = 2;    ///< unreadable/malformed input, bad flags
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitZeroMass = 4;

struct RunConfig {
    std::string source_path;
    std::string target_path;
    double eps = 1e-3;
    int factor = 5;
    int coarsest = 10;
    std::uint64_t seed = 0;
    int grid_divisor = 1;
    int refine = 1;
    int max_iters = 1000;
    int threads = 1;
    std::optional<std::string> render_path;
    std::optional<std::string> trace_path;
    std::optional<std::string> weights_path;
};

/// Solves source -> target and prints the JSON report on `out`.
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Like cmd_compare but also writes the SVG to cfg.render_path. With
/// cfg.weights_path the solve is skipped and the given weights are drawn.
int cmd_render(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct SelftestOptions {
    /// Flips the sign of one gradient component seen by the finite-difference
    /// check; the suite must then fail.
    bool inject_gradient_fault = false;
};

int cmd_selftest(const SelftestOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand. Returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace semidot::cli
