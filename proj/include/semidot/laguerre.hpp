#pragma once

#include "semidot/geometry.hpp"
#include "semidot/measure.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace semidot {

/// One additive weight per site of the paired DiscreteMeasure.
using WeightVector = std::vector<double>;

/// Rasterized additively weighted Voronoi partition of a GridDensity.
///
/// labels[q] is the site owning grid square q (same indexing as
/// GridDensity::cell_mass). masses[i] and cost_integrals[i] aggregate
/// cell_mass and |center - s_i| * cell_mass over the squares labeled i.
struct CellAssignment {
    int cols = 0;
    int rows = 0;
    double cell_side = 1.0;
    Point origin{0.0, 0.0};
    std::vector<std::int32_t> labels;
    std::vector<double> masses;
    std::vector<double> cost_integrals;

    std::size_t n_sites() const noexcept { return masses.size(); }
};

/// Labels each grid square with argmin_i |center - s_i| - w_i (ties to the
/// lowest index) and accumulates per-site mass and cost.
///
/// The argmin uses a bucketed site index with exact lower bounds, so labels
/// are identical to a brute-force scan. `threads` only splits the labeling
/// pass; aggregation always runs in square order, so results do not depend
/// on the thread count.
CellAssignment assign_cells(const GridDensity& density, const DiscreteMeasure& nu,
                            std::span<const double> w, int threads = 1);

/// Reference O(n * cols * rows) labeling, single-threaded.
CellAssignment assign_cells_bruteforce(const GridDensity& density, const DiscreteMeasure& nu,
                                       std::span<const double> w);

/// Maximal polyline of raster edges separating the cells of two sites.
struct BoundaryChain {
    int site_a = 0; ///< lower site index
    int site_b = 0; ///< higher site index
    std::vector<Point> points; ///< midpoints of the shared raster edges, in walk order
    bool closed = false;
};

/// Chains the raster edges between differently labeled neighbor squares.
/// Output is sorted by (site_a, site_b) and then by first point.
std::vector<BoundaryChain> cell_boundary_chains(const CellAssignment& assignment);

/// P2 dump of the label raster, top row first, gray = label mod 256.
std::string labels_to_pgm(const CellAssignment& assignment);

} // namespace semidot
