#pragma once

#include "semidot/measure.hpp"
#include "semidot/optimizer.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace semidot {

/// Seeded generator used for every random choice in the solver. std::mt19937_64
/// has a fully specified output sequence, and bounded draws go through
/// uniform_index() rather than a library distribution, so runs reproduce
/// across platforms.
using Rng = std::mt19937_64;

/// Unbiased draw from [0, bound) by rejection. bound must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// One coarsening step: `measure` is the clustered target, tau maps each fine
/// site to the index of its cluster in `measure`.
struct DecompositionLevel {
    DiscreteMeasure measure;
    std::vector<int> tau;
    int lloyd_rounds = 0;
    std::vector<double> lloyd_sse;  ///< sum_p lambda_p |p - q^p|^2 after each round
    double lloyd_distance = 0.0;    ///< sum_p lambda_p |p - q^p| at exit
};

/// Weighted Lloyd clustering of nu into n_clusters centers, seeded with
/// distinct sites drawn from nu. Runs until the center set stops changing
/// or max_rounds is reached. An empty cluster takes over the point farthest
/// from its own center (lowest index on ties) among clusters with more than
/// one member.
DecompositionLevel lloyd_cluster(const DiscreteMeasure& nu, int n_clusters, std::uint64_t seed,
                                 int max_rounds = 500);

/// Repeatedly clusters with N = floor(|S| / factor) while N >= 2 and
/// |S| > coarsest. Levels are ordered fine to coarse; level k uses seed + k.
std::vector<DecompositionLevel> decompose(const DiscreteMeasure& nu, int factor, int coarsest,
                                          std::uint64_t seed);

struct MultiscaleOptions {
    int factor = 5;
    int coarsest = 10;
    std::uint64_t seed = 0;
    /// Grid block size used for the coarse levels (level >= 1); 1 keeps the
    /// full resolution everywhere.
    int coarse_grid_divisor = 1;
    int threads = 1;
};

struct LevelTiming {
    std::size_t n_sites = 0;
    double seconds = 0.0;
};

struct MultiscaleReport {
    std::vector<DecompositionLevel> levels;
    /// Solves ordered coarse to fine; the last entry is the full problem.
    std::vector<OptimResult> per_level;
    std::vector<std::vector<double>> initial_w; ///< starting weights, same order as per_level
    std::vector<LevelTiming> timings; ///< same order as per_level
    std::vector<double> final_w;      ///< level-0 weights shifted to mean zero

    OptimStatus status() const noexcept { return per_level.back().status; }
    int iterations_total() const noexcept;
};

/// Solves the coarsest decomposition level from w = 0, then warm-starts each
/// finer level with the weight of its cluster representative.
MultiscaleReport solve_multiscale(const GridDensity& density, const DiscreteMeasure& nu,
                                  const OptimizerConfig& cfg, const MultiscaleOptions& ms);

/// Single-level solve from w = 0, weights shifted to mean zero.
OptimResult solve_single(const GridDensity& density, const DiscreteMeasure& nu,
                         const OptimizerConfig& cfg, int threads = 1);

/// Subtracts the mean weight.
void recenter(std::vector<double>& w) noexcept;

/// JSON summary: level sizes, iterations, grad_l1 and status per level, and
/// wall time when `include_timing` is set (which makes the text run-dependent).
std::string to_json(const MultiscaleReport& report, bool include_timing);

} // namespace semidot
