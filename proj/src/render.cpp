#include "semidot/render.hpp"

#include "semidot/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace semidot {

double BisectorMap::residual(Point p) const noexcept
{
    return (distance(p, first) - w_first) - (distance(p, second) - w_second);
}

BisectorMap bisector_map(Point s_i, Point s_j, double w_i, double w_j)
{
    if (s_i == s_j)
        throw Error(ErrorCode::InvalidArgument, "bisector of coincident sites");
    double const dist = distance(s_i, s_j);
    if (std::abs(w_i - w_j) >= dist)
        throw Error(ErrorCode::EmptyBisector,
                    "weight gap " + std::to_string(std::abs(w_i - w_j)) + " >= site distance "
                        + std::to_string(dist));

    BisectorMap m;
    if (w_i < w_j) {
        std::swap(s_i, s_j);
        std::swap(w_i, w_j);
    }
    m.first = s_i;
    m.second = s_j;
    m.w_first = w_i;
    m.w_second = w_j;
    m.M = 0.5 * (s_i + s_j);
    m.a = (w_i - w_j) / 2.0;
    m.b = dist / 2.0;
    m.c = std::sqrt(m.b * m.b - m.a * m.a);
    m.gamma = std::atan2(s_j.y - s_i.y, s_j.x - s_i.x);

    if (w_i == w_j) {
        m.kind = BisectorMap::Kind::Line;
        Point const axis = (1.0 / dist) * (s_j - s_i);
        m.direction = {-axis.y, axis.x};
        return m;
    }

    m.kind = BisectorMap::Kind::Hyperbola;
    double const cg = std::cos(m.gamma);
    double const sg = std::sin(m.gamma);
    double const a = m.a;
    double const c = m.c;
    m.A = {0.5 * (a * cg + c * sg), 0.5 * (a * cg - c * sg),
           0.5 * (a * sg - c * cg), 0.5 * (a * sg + c * cg)};
    m.A_inv = {cg / a + sg / c, sg / a - cg / c,
               cg / a - sg / c, sg / a + cg / c};
    return m;
}

Point project_onto(const BisectorMap& map, Point p) noexcept
{
    Point const rel = p - map.M;
    if (map.kind == BisectorMap::Kind::Line)
        return map.M + dot(rel, map.direction) * map.direction;
    Point const axis{std::cos(map.gamma), std::sin(map.gamma)};
    Point const perp{-axis.y, axis.x};
    double const v = dot(rel, perp);
    double const u = map.a * std::sqrt(1.0 + (v / map.c) * (v / map.c));
    return map.M + u * axis + v * perp;
}

std::vector<Point> sample_bisector(const BisectorMap& map, Point e1, Point e2, int k)
{
    if (k < 2)
        throw Error(ErrorCode::InvalidArgument, "need at least two samples");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(k));
    if (map.kind == BisectorMap::Kind::Line) {
        Point const p1 = project_onto(map, e1);
        Point const p2 = project_onto(map, e2);
        for (int t = 0; t < k; ++t) {
            double const f = static_cast<double>(t) / (k - 1);
            out.push_back(p1 + f * (p2 - p1));
        }
        out.back() = p2;
        return out;
    }

    double const x1 = (map.A_inv * (e1 - map.M)).x;
    double const x2 = (map.A_inv * (e2 - map.M)).x;
    if (!(x1 > 0.0) || !(x2 > 0.0))
        throw Error(ErrorCode::EndpointOffCurve, "endpoint maps to the wrong side of the 1/x graph");
    double const l1 = std::log(x1);
    double const l2 = std::log(x2);
    for (int t = 0; t < k; ++t) {
        double x = x1;
        if (t == k - 1)
            x = x2;
        else if (t > 0)
            x = std::exp(l1 + (l2 - l1) * static_cast<double>(t) / (k - 1));
        out.push_back(map.A * Point{x, 1.0 / x} + map.M);
    }
    return out;
}

namespace {

std::string fmt3(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    // Avoid "-0.000" so equal drawings compare equal byte for byte.
    if (std::string_view(buf) == "-0.000")
        return "0.000";
    return buf;
}

std::string label_color(int label)
{
    // Golden-angle hue walk, converted to RGB with fixed saturation/lightness.
    double const h = std::fmod(label * 137.50776405, 360.0) / 60.0;
    double const s = 0.55, l = 0.82;
    double const chroma = (1.0 - std::abs(2.0 * l - 1.0)) * s;
    double const x = chroma * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h)) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
    }
    double const m = l - chroma / 2.0;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround((r + m) * 255)),
                  static_cast<int>(std::lround((g + m) * 255)),
                  static_cast<int>(std::lround((b + m) * 255)));
    return buf;
}

} // namespace

std::string render_svg(const GridDensity& density, const DiscreteMeasure& nu,
                       std::span<const double> w, const CellAssignment& assignment,
                       const SvgOptions& options)
{
    if (w.size() != nu.size() || assignment.n_sites() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "weights, measure and assignment sizes differ");
    if (!(options.scale > 0.0) || options.samples < 2)
        throw Error(ErrorCode::InvalidArgument, "render scale must be positive and samples >= 2");

    double const scale = options.scale;
    double const width = density.cols * density.cell_side * scale;
    double const height = density.rows * density.cell_side * scale;
    auto X = [&](double x) { return fmt3((x - density.origin.x) * scale); };
    auto Y = [&](double y) { return fmt3(height - (y - density.origin.y) * scale); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt3(width)
           + "\" height=\"" + fmt3(height) + "\" viewBox=\"0 0 " + fmt3(width) + " " + fmt3(height)
           + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + fmt3(width) + "\" height=\"" + fmt3(height)
           + "\" fill=\"white\"/>\n";

    if (options.show_raster) {
        out += "<g id=\"raster\" stroke=\"none\">\n";
        for (int row = 0; row < assignment.rows; ++row) {
            int col = 0;
            while (col < assignment.cols) {
                auto const at = [&](int c) {
                    return assignment.labels[static_cast<std::size_t>(row)
                                                 * static_cast<std::size_t>(assignment.cols)
                                             + static_cast<std::size_t>(c)];
                };
                int const label = at(col);
                int end = col + 1;
                while (end < assignment.cols && at(end) == label)
                    ++end;
                double const x0 = assignment.origin.x + col * assignment.cell_side;
                double const y1 = assignment.origin.y + (row + 1) * assignment.cell_side;
                out += "<rect x=\"" + X(x0) + "\" y=\"" + Y(y1) + "\" width=\""
                       + fmt3((end - col) * assignment.cell_side * scale) + "\" height=\""
                       + fmt3(assignment.cell_side * scale) + "\" fill=\"" + label_color(label)
                       + "\"/>\n";
                col = end;
            }
        }
        out += "</g>\n";
    }

    out += "<g id=\"bisectors\" fill=\"none\" stroke=\"black\" stroke-width=\""
           + fmt3(options.stroke_width) + "\">\n";
    for (auto const& chain : cell_boundary_chains(assignment)) {
        auto const i = static_cast<std::size_t>(chain.site_a);
        auto const j = static_cast<std::size_t>(chain.site_b);
        std::vector<Point> pts;
        bool analytic = false;
        if (!chain.closed && chain.points.size() >= 2) {
            try {
                BisectorMap const map = bisector_map(nu.sites[i], nu.sites[j], w[i], w[j]);
                Point const e1 = project_onto(map, chain.points.front());
                Point const e2 = project_onto(map, chain.points.back());
                if (map.kind == BisectorMap::Kind::Line) {
                    pts = {e1, e2};
                } else {
                    pts = sample_bisector(map, e1, e2, options.samples);
                }
                analytic = true;
            } catch (const Error&) {
                analytic = false;
            }
        }
        if (!analytic)
            pts = chain.points;
        std::string d = "M" + X(pts[0].x) + " " + Y(pts[0].y);
        for (std::size_t k = 1; k < pts.size(); ++k)
            d += " L" + X(pts[k].x) + " " + Y(pts[k].y);
        if (chain.closed)
            d += " Z";
        out += "<path class=\"" + std::string(analytic ? "bisector" : "raster-boundary")
               + "\" data-sites=\"" + std::to_string(i) + "," + std::to_string(j) + "\" d=\"" + d
               + "\"/>\n";
    }
    out += "</g>\n";

    out += "<g id=\"sites\" stroke=\"black\" stroke-width=\"" + fmt3(options.stroke_width) + "\">\n";
    for (std::size_t i = 0; i < nu.size(); ++i) {
        Point const s = nu.sites[i];
        out += "<circle class=\"weight\" cx=\"" + X(s.x) + "\" cy=\"" + Y(s.y) + "\" r=\""
               + fmt3(std::abs(w[i]) * scale) + "\" fill=\"none\""
               + (w[i] < 0.0 ? " stroke-dasharray=\"4 3\"" : "") + "/>\n";
        out += "<circle class=\"site\" cx=\"" + X(s.x) + "\" cy=\"" + Y(s.y) + "\" r=\""
               + fmt3(std::max(1.5, 1.5 * options.stroke_width)) + "\" fill=\"black\"/>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace semidot
