#pragma once

#include "semidot/geometry.hpp"
#include "semidot/laguerre.hpp"
#include "semidot/measure.hpp"

#include <span>
#include <string>
#include <vector>

namespace semidot {

/// Affine description of the boundary between two weighted sites.
///
/// Sites are normalized so that `first` carries the larger weight. The
/// boundary { p : |p - s_first| - |p - s_second| = w_first - w_second } is
/// then one hyperbola branch, mapped onto the graph of 1/x (x > 0) by
/// G = A^{-1} (p - M) and back by p = A G + M. Equal weights give the
/// perpendicular bisector instead.
struct BisectorMap {
    enum class Kind { Hyperbola, Line };

    Kind kind = Kind::Line;
    Point first, second;          ///< sites after normalization
    double w_first = 0.0, w_second = 0.0;
    double a = 0.0;               ///< (w_first - w_second) / 2
    double b = 0.0;               ///< |first - second| / 2
    double c = 0.0;               ///< sqrt(b^2 - a^2)
    double gamma = 0.0;           ///< angle of second - first against the x axis
    Point M;                      ///< midpoint of the sites
    Mat2 A, A_inv;                ///< Hyperbola only
    Point direction;              ///< Line only: unit vector along the bisector

    /// |p - s_first| - w_first - (|p - s_second| - w_second); zero on the boundary.
    double residual(Point p) const noexcept;
};

/// Throws Error{EmptyBisector} when |w_i - w_j| >= |s_i - s_j| (one cell
/// swallows the other) and Error{InvalidArgument} when s_i == s_j.
BisectorMap bisector_map(Point s_i, Point s_j, double w_i, double w_j);

/// Moves p onto the boundary: parallel to the focal axis for a hyperbola,
/// orthogonally for a line.
Point project_onto(const BisectorMap& map, Point p) noexcept;

/// k points on the boundary between e1 and e2, in that order. Hyperbolas are
/// sampled uniformly in log x on the 1/x graph between the transformed
/// endpoints; lines are interpolated linearly. Throws
/// Error{EndpointOffCurve} when a transformed endpoint has x <= 0.
std::vector<Point> sample_bisector(const BisectorMap& map, Point e1, Point e2, int k);

struct SvgOptions {
    double scale = 512.0;       ///< pixels per world unit
    double stroke_width = 1.0;
    int samples = 64;           ///< points per hyperbola segment
    bool show_raster = false;
};

/// SVG 1.1 drawing of the diagram: one path per raster boundary chain
/// (analytic curve through the projected chain ends, raster polyline as a
/// fallback), a "site" dot per site and a "weight" circle of radius |w_i|,
/// dashed when w_i < 0. Output depends only on the inputs.
std::string render_svg(const GridDensity& density, const DiscreteMeasure& nu,
                       std::span<const double> w, const CellAssignment& assignment,
                       const SvgOptions& options = {});

} // namespace semidot
