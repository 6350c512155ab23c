#pragma once

// Instance generators and independent reference computations shared by the
// test suites. Nothing here calls into the solver beyond assign_cells.

#include "semidot/error.hpp"
#include "semidot/laguerre.hpp"
#include "semidot/measure.hpp"
#include "semidot/multiscale.hpp"
#include "semidot/objective.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace semidot::testing {

/// Code of the semidot::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<ErrorCode> error_code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

template <class F>
std::string error_message_of(F&& f)
{
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0)
{
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline DiscreteMeasure random_sites(Rng& rng, int n, double lo = 0.0, double hi = 1.0)
{
    DiscreteMeasure nu;
    for (int i = 0; i < n; ++i) {
        nu.sites.push_back({uniform(rng, lo, hi), uniform(rng, lo, hi)});
        nu.masses.push_back(1.0 / n);
    }
    return nu;
}

inline std::vector<double> random_weights(Rng& rng, std::size_t n, double spread = 0.1)
{
    std::vector<double> w(n);
    for (double& v : w)
        v = uniform(rng, -spread / 2, spread / 2);
    return w;
}

inline GridDensity random_density(Rng& rng, int cols, int rows)
{
    GridDensity d = uniform_density(cols, rows);
    double total = 0.0;
    for (double& m : d.cell_mass) {
        m = uniform(rng, 0.1, 1.0);
        total += m;
    }
    for (double& m : d.cell_mass)
        m /= total;
    return d;
}

/// Replaces the masses of nu by the cell masses of a random weight vector, so
/// an exactly adapted weight vector is known to exist. Draws again while a
/// cell comes out empty; returns false if that keeps happening.
inline bool plant_masses(const GridDensity& density, DiscreteMeasure& nu, Rng& rng,
                         double spread = 0.1)
{
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto const w = random_weights(rng, nu.size(), spread);
        auto const a = assign_cells_bruteforce(density, nu, w);
        if (std::all_of(a.masses.begin(), a.masses.end(), [](double m) { return m > 0.0; })) {
            nu.masses = a.masses;
            return true;
        }
        spread /= 2;
    }
    return false;
}

/// Central difference of Phi along coordinate i, or nullopt when a label
/// changes inside [w - h e_i, w + h e_i].
inline std::optional<double> central_difference(const GridDensity& density,
                                                const DiscreteMeasure& nu,
                                                const std::vector<double>& w, std::size_t i,
                                                double h)
{
    std::vector<double> up = w, down = w;
    up[i] += h;
    down[i] -= h;
    auto const base = assign_cells_bruteforce(density, nu, w).labels;
    if (assign_cells_bruteforce(density, nu, up).labels != base
        || assign_cells_bruteforce(density, nu, down).labels != base)
        return std::nullopt;
    return (evaluate(up, density, nu).value - evaluate(down, density, nu).value) / (2.0 * h);
}

/// int_{[0,1]^2} |x - p| dx by the midpoint rule on an m x m grid.
inline double unit_square_first_moment(Point p, int m)
{
    double total = 0.0;
    double const h = 1.0 / m;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            total += distance({(c + 0.5) * h, (r + 0.5) * h}, p);
    return total * h * h;
}

} // namespace semidot::testing
