#pragma once

#include "semidot/measure.hpp"

#include <vector>

namespace semidot {

/// Balanced discrete transport problem with Euclidean costs.
struct FlowProblem {
    DiscreteMeasure sources;
    DiscreteMeasure sinks;
    std::vector<std::vector<double>> costs; ///< costs[i][j] = |a_i - b_j|

    static FlowProblem euclidean(DiscreteMeasure sources, DiscreteMeasure sinks);
};

/// One site per positive-mass square, at the square center.
DiscreteMeasure density_to_discrete(const GridDensity& density);

/// Exact minimum transport cost. Masses are scaled to integers
/// (`mass_scale` units in total, largest-remainder rounding so both
/// marginals stay exact) and the problem is solved as a min-cost flow by
/// successive shortest paths with Dijkstra on reduced costs. Intended for a
/// few thousand nodes at most.
///
/// Throws Error{Unbalanced} when the total masses differ by more than 1e-9.
double exact_ot_cost(const FlowProblem& problem, long long mass_scale = 1'000'000'000);

/// Integer masses summing to exactly `total`, by largest-remainder rounding.
std::vector<long long> scale_masses(const std::vector<double>& masses, long long total);

} // namespace semidot
