#pragma once

#include "semidot/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

namespace semidot {

/// Grayscale raster as read from disk. Row-major, top row first.
struct RawImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    int maxval = 255;
};

/// Piecewise-constant density on an axis-aligned grid of squares.
///
/// Cells are stored row-major with row 0 at the bottom (lowest y), so cell
/// (col, row) covers [origin.x + col*side, +side) x [origin.y + row*side, +side).
struct GridDensity {
    int cols = 0;
    int rows = 0;
    double cell_side = 1.0;
    Point origin{0.0, 0.0};
    std::vector<double> cell_mass;

    std::size_t size() const noexcept { return cell_mass.size(); }
    std::size_t index(int col, int row) const noexcept
    {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols)
               + static_cast<std::size_t>(col);
    }
    Point center(std::size_t q) const noexcept
    {
        auto const col = static_cast<double>(q % static_cast<std::size_t>(cols));
        auto const row = static_cast<double>(q / static_cast<std::size_t>(cols));
        return {origin.x + (col + 0.5) * cell_side, origin.y + (row + 0.5) * cell_side};
    }
    /// Value of the density on cell q (mass per unit area).
    double density(std::size_t q) const noexcept { return cell_mass[q] / (cell_side * cell_side); }
};

/// Finitely supported probability measure: sum of masses[i] * delta(sites[i]).
struct DiscreteMeasure {
    std::vector<Point> sites;
    std::vector<double> masses;

    std::size_t size() const noexcept { return sites.size(); }
};

/// Throws Error{InvalidArgument} when the density breaks its invariants.
void validate(const GridDensity& density);
/// Throws Error{InvalidArgument}; distinctness of sites is checked only when
/// `require_distinct` is set since it costs a sort.
void validate(const DiscreteMeasure& nu, bool require_distinct = true);

/// Parses a P2 or P5 PGM. Errors carry the byte offset of the problem.
RawImage load_pgm(std::string_view bytes);
RawImage load_pgm_file(const std::filesystem::path& path);

GridDensity image_to_density(const RawImage& img);
DiscreteMeasure image_to_discrete(const RawImage& img);

/// Uniform density on a cols x rows grid scaled into the unit square.
GridDensity uniform_density(int cols, int rows);

/// Block-sums the grid by an integer factor. Partial blocks at the top/right
/// edges are kept as full-size cells.
GridDensity coarsen(const GridDensity& density, int divisor);

/// Splits every cell into factor x factor equal squares carrying equal
/// shares of its mass; the density function itself is unchanged.
GridDensity refine(const GridDensity& density, int factor);

} // namespace semidot
