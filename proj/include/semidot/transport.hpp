#pragma once

#include "semidot/laguerre.hpp"
#include "semidot/measure.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace semidot {

/// Summary of a transport map induced by a weight vector.
struct TransportReport {
    double cost = 0.0;              ///< sum_i int_{Vor_i} |x - s_i| dmu
    double wasserstein_paper = 0.0; ///< sqrt(cost)
    double upper_bound_C = 0.0;
    double grad_l1 = 0.0;
    std::size_t n_sites = 0;
    int cols = 0;
    int rows = 0;
    int iterations_total = 0;
};

/// Cost of the map sending every square to its labeled site.
double transport_cost(const CellAssignment& assignment) noexcept;

/// int |x| dmu + max_i |s_i|; bounds the cost of every transport map.
double upper_bound_C(const GridDensity& density, const DiscreteMeasure& nu);

TransportReport make_report(const GridDensity& density, const DiscreteMeasure& nu,
                            const CellAssignment& assignment, int iterations_total);

/// Text form of an assignment; see docs/FORMATS.md. Floats use 17
/// significant digits, so the bytes are a function of the inputs alone.
std::string format_assignment(const CellAssignment& assignment, const DiscreteMeasure& nu);

/// Writes format_assignment() to `path`. IO failures name the path.
void export_assignment(const CellAssignment& assignment, const DiscreteMeasure& nu,
                       const std::filesystem::path& path);

struct ParsedAssignment {
    CellAssignment assignment;
    std::vector<double> target_masses;
};

ParsedAssignment parse_assignment(std::string_view text);

} // namespace semidot
