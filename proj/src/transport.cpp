#include "semidot/transport.hpp"

#include "semidot/error.hpp"
#include "semidot/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace semidot {

double transport_cost(const CellAssignment& assignment) noexcept
{
    double total = 0.0;
    for (double c : assignment.cost_integrals)
        total += c;
    return total;
}

double upper_bound_C(const GridDensity& density, const DiscreteMeasure& nu)
{
    double first_moment = 0.0;
    for (std::size_t q = 0; q < density.size(); ++q)
        first_moment += norm(density.center(q)) * density.cell_mass[q];
    double farthest = 0.0;
    for (auto const& s : nu.sites)
        farthest = std::max(farthest, norm(s));
    return first_moment + farthest;
}

TransportReport make_report(const GridDensity& density, const DiscreteMeasure& nu,
                            const CellAssignment& assignment, int iterations_total)
{
    if (assignment.n_sites() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "assignment and measure sizes differ");
    TransportReport r;
    r.cost = transport_cost(assignment);
    r.wasserstein_paper = std::sqrt(r.cost);
    r.upper_bound_C = upper_bound_C(density, nu);
    for (std::size_t i = 0; i < nu.size(); ++i)
        r.grad_l1 += std::abs(assignment.masses[i] - nu.masses[i]);
    r.n_sites = nu.size();
    r.cols = density.cols;
    r.rows = density.rows;
    r.iterations_total = iterations_total;
    return r;
}

std::string format_assignment(const CellAssignment& a, const DiscreteMeasure& nu)
{
    if (a.n_sites() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "assignment and measure sizes differ");
    std::string out = "semidot-assignment 1\n";
    out += "grid " + std::to_string(a.cols) + " " + std::to_string(a.rows) + " "
           + format_double(a.cell_side) + " " + format_double(a.origin.x) + " "
           + format_double(a.origin.y) + "\n";
    out += "sites " + std::to_string(a.n_sites()) + "\n";
    for (std::size_t i = 0; i < a.n_sites(); ++i)
        out += std::to_string(i) + " " + format_double(a.masses[i]) + " "
               + format_double(nu.masses[i]) + " " + format_double(a.cost_integrals[i]) + "\n";
    out += "labels\n";
    for (int row = a.rows - 1; row >= 0; --row) {
        for (int col = 0; col < a.cols; ++col) {
            if (col > 0)
                out += ' ';
            out += std::to_string(a.labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(a.cols)
                                           + static_cast<std::size_t>(col)]);
        }
        out += '\n';
    }
    return out;
}

void export_assignment(const CellAssignment& assignment, const DiscreteMeasure& nu,
                       const std::filesystem::path& path)
{
    std::string const text = format_assignment(assignment, nu);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out << text;
    out.close();
    if (!out)
        throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

ParsedAssignment parse_assignment(std::string_view text)
{
    std::istringstream in{std::string(text)};
    auto fail = [](const std::string& what) {
        return Error(ErrorCode::InvalidArgument, "assignment: " + what);
    };
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "semidot-assignment" || version != 1)
        throw fail("bad magic line");

    ParsedAssignment p;
    auto& a = p.assignment;
    if (!(in >> word >> a.cols >> a.rows >> a.cell_side >> a.origin.x >> a.origin.y)
        || word != "grid" || a.cols <= 0 || a.rows <= 0)
        throw fail("bad grid line");
    std::size_t n = 0;
    if (!(in >> word >> n) || word != "sites" || n == 0)
        throw fail("bad sites line");
    a.masses.resize(n);
    a.cost_integrals.resize(n);
    p.target_masses.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t index = 0;
        if (!(in >> index >> a.masses[i] >> p.target_masses[i] >> a.cost_integrals[i]) || index != i)
            throw fail("bad site row " + std::to_string(i));
    }
    if (!(in >> word) || word != "labels")
        throw fail("missing labels section");
    a.labels.resize(static_cast<std::size_t>(a.cols) * static_cast<std::size_t>(a.rows));
    for (int row = a.rows - 1; row >= 0; --row) {
        for (int col = 0; col < a.cols; ++col) {
            long v = 0;
            if (!(in >> v) || v < 0 || static_cast<std::size_t>(v) >= n)
                throw fail("bad label");
            a.labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(a.cols)
                     + static_cast<std::size_t>(col)] = static_cast<std::int32_t>(v);
        }
    }
    return p;
}

} // namespace semidot
