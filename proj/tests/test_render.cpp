#include "test_support.hpp"

#include "semidot/render.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace semidot;
using namespace semidot::testing;

namespace {

// Defining equation written out independently of BisectorMap::residual.
double gap(Point p, Point si, Point sj, double wi, double wj)
{
    return (std::hypot(p.x - si.x, p.y - si.y) - wi) - (std::hypot(p.x - sj.x, p.y - sj.y) - wj);
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

Point on_curve(const BisectorMap& m, double x)
{
    return m.A * Point{x, 1.0 / x} + m.M;
}

} // namespace

TEST_CASE("equal weights give the perpendicular bisector")
{
    auto const m = bisector_map({0, 0}, {1, 0}, 0, 0);
    CHECK(m.kind == BisectorMap::Kind::Line);
    CHECK(m.M == Point{0.5, 0.0});
    CHECK(std::abs(m.direction.x) <= 1e-15);
    CHECK(std::abs(std::abs(m.direction.y) - 1.0) <= 1e-15);

    auto const pts = sample_bisector(m, {0.5, 0}, {0.5, 1}, 3);
    REQUIRE(pts.size() == 3);
    CHECK(distance(pts[0], {0.5, 0}) <= 1e-15);
    CHECK(distance(pts[1], {0.5, 0.5}) <= 1e-15);
    CHECK(distance(pts[2], {0.5, 1}) <= 1e-15);
}

TEST_CASE("degenerate and invalid configurations")
{
    CHECK(error_code_of([] { bisector_map({0, 0}, {1, 0}, 1, 0); }) == ErrorCode::EmptyBisector);
    CHECK(error_code_of([] { bisector_map({0, 0}, {1, 0}, 0, 2); }) == ErrorCode::EmptyBisector);
    CHECK(error_code_of([] { bisector_map({0, 0}, {0, 0}, 0, 0.5); }) == ErrorCode::InvalidArgument);
    auto const m = bisector_map({0, 0}, {2, 0}, 1, 0);
    CHECK(error_code_of([&] { sample_bisector(m, on_curve(m, 1), on_curve(m, 2), 1); })
          == ErrorCode::InvalidArgument);
    // A point on the other branch maps to negative x.
    CHECK(error_code_of([&] { sample_bisector(m, on_curve(m, 1), on_curve(m, -1), 5); })
          == ErrorCode::EndpointOffCurve);
}

TEST_CASE("hyperbola parameters for a hand-worked case")
{
    auto const m = bisector_map({0, 0}, {2, 0}, 1, 0);
    CHECK(m.kind == BisectorMap::Kind::Hyperbola);
    CHECK(m.a == doctest::Approx(0.5));
    CHECK(m.b == doctest::Approx(1.0));
    CHECK(m.c == doctest::Approx(std::sqrt(0.75)));
    CHECK(m.M == Point{1, 0});

    auto const I = m.A * m.A_inv;
    CHECK(std::abs(I.a11 - 1) <= 1e-12);
    CHECK(std::abs(I.a12) <= 1e-12);
    CHECK(std::abs(I.a21) <= 1e-12);
    CHECK(std::abs(I.a22 - 1) <= 1e-12);

    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        Point const p{uniform(rng, -5, 5), uniform(rng, -5, 5)};
        Point const back = m.A * (m.A_inv * (p - m.M)) + m.M;
        CHECK(distance(back, p) <= 1e-12);
    }
    // The graph of 1/x maps onto the boundary.
    for (double x : {0.01, 0.5, 1.0, 3.0, 80.0})
        CHECK(std::abs(gap(on_curve(m, x), {0, 0}, {2, 0}, 1, 0)) <= 1e-12 * (1 + x + 1 / x));
}

TEST_CASE("samples satisfy the defining equation")
{
    Rng rng(2);
    int line_cases = 0;
    for (int trial = 0; trial < 300; ++trial) {
        Point const si{uniform(rng, -1, 2), uniform(rng, -1, 2)};
        Point const sj{uniform(rng, -1, 2), uniform(rng, -1, 2)};
        double const dist = distance(si, sj);
        double wi = uniform(rng, -1, 1);
        double wj = wi + uniform(rng, -0.95, 0.95) * dist;
        if (trial % 25 == 0) {
            wj = wi;
            ++line_cases;
        }
        auto const m = bisector_map(si, sj, wi, wj);
        Point e1, e2;
        if (m.kind == BisectorMap::Kind::Line) {
            e1 = m.M + uniform(rng, -2, 0) * m.direction;
            e2 = m.M + uniform(rng, 0, 2) * m.direction;
        } else {
            e1 = on_curve(m, std::exp(uniform(rng, -3, 3)));
            e2 = on_curve(m, std::exp(uniform(rng, -3, 3)));
        }
        auto const pts = sample_bisector(m, e1, e2, 2 + static_cast<int>(uniform_index(rng, 64)));
        double const tol = 1e-9 * std::max(1.0, distance(e1, e2));
        for (auto const& p : pts)
            CHECK(std::abs(gap(p, si, sj, wi, wj)) <= tol);
        CHECK(distance(pts.front(), e1) <= 1e-9);
        CHECK(distance(pts.back(), e2) <= 1e-9);
    }
    CHECK(line_cases > 0);
}

TEST_CASE("two samples are the endpoints")
{
    auto const m = bisector_map({0.1, 0.2}, {0.7, 0.9}, 0.05, 0.2);
    Point const e1 = on_curve(m, 0.3), e2 = on_curve(m, 4.0);
    auto const pts = sample_bisector(m, e1, e2, 2);
    REQUIRE(pts.size() == 2);
    CHECK(distance(pts[0], e1) <= 1e-12);
    CHECK(distance(pts[1], e2) <= 1e-12);
}

TEST_CASE("swapping the two sites gives the same curve")
{
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Point const si{uniform(rng), uniform(rng)};
        Point const sj{uniform(rng), uniform(rng)};
        double const wi = uniform(rng, -0.2, 0.2);
        double const wj = wi + uniform(rng, -0.9, 0.9) * distance(si, sj);
        auto const m1 = bisector_map(si, sj, wi, wj);
        auto const m2 = bisector_map(sj, si, wj, wi);
        Point const e1 = on_curve(m1, 0.5), e2 = on_curve(m1, 2.0);
        auto a = sample_bisector(m1, e1, e2, 16);
        auto b = sample_bisector(m2, e1, e2, 16);
        REQUIRE(a.size() == b.size());
        for (auto const& p : a) {
            double best = 1e9;
            for (auto const& q : b)
                best = std::min(best, distance(p, q));
            CHECK(best <= 1e-9);
        }
    }
}

TEST_CASE("nearly equal weights approach the straight bisector")
{
    Point const si{0.2, 0.3}, sj{0.8, 0.5};
    auto const line = bisector_map(si, sj, 0.1, 0.1);
    auto const hyp = bisector_map(si, sj, 0.1 + 1e-6, 0.1);
    REQUIRE(hyp.kind == BisectorMap::Kind::Hyperbola);
    Point const e1 = project_onto(hyp, line.M - 0.5 * line.direction);
    Point const e2 = project_onto(hyp, line.M + 0.5 * line.direction);
    auto const curve = sample_bisector(hyp, e1, e2, 64);
    auto const straight = sample_bisector(line, e1, e2, 64);
    for (std::size_t k = 0; k < curve.size(); ++k) {
        double const off_line = std::abs(dot(curve[k] - line.M, (1.0 / distance(si, sj)) * (sj - si)));
        CHECK(off_line <= 1e-4);
        double best = 1e9;
        for (std::size_t m = 0; m + 1 < straight.size(); ++m) {
            Point const seg = straight[m + 1] - straight[m];
            double const t = std::clamp(dot(curve[k] - straight[m], seg) / dot(seg, seg), 0.0, 1.0);
            best = std::min(best, distance(curve[k], straight[m] + t * seg));
        }
        CHECK(best <= 1e-4);
    }
}

TEST_CASE("projection lands on the curve")
{
    Rng rng(4);
    auto const m = bisector_map({0.3, 0.3}, {0.6, 0.8}, 0.15, 0.0);
    for (int k = 0; k < 100; ++k) {
        Point const p = on_curve(m, std::exp(uniform(rng, -2, 2)));
        Point const noisy{p.x + uniform(rng, -0.01, 0.01), p.y + uniform(rng, -0.01, 0.01)};
        Point const q = project_onto(m, noisy);
        CHECK(std::abs(m.residual(q)) <= 1e-12);
        CHECK(distance(q, noisy) <= 0.1);
    }
}

TEST_CASE("curves drawn from raster chain ends stay near the true boundary")
{
    auto const d = uniform_density(64, 64);
    DiscreteMeasure nu{{{0.21, 0.33}, {0.74, 0.28}, {0.52, 0.81}}, {0.3, 0.3, 0.4}};
    std::vector<double> w{0.05, -0.02, 0.01};
    auto const chains = cell_boundary_chains(assign_cells(d, nu, w));
    REQUIRE_FALSE(chains.empty());
    for (auto const& chain : chains) {
        auto const i = static_cast<std::size_t>(chain.site_a);
        auto const j = static_cast<std::size_t>(chain.site_b);
        auto const m = bisector_map(nu.sites[i], nu.sites[j], w[i], w[j]);
        auto const pts = sample_bisector(m, project_onto(m, chain.points.front()),
                                         project_onto(m, chain.points.back()), 64);
        for (auto const& p : pts)
            CHECK(std::abs(gap(p, nu.sites[i], nu.sites[j], w[i], w[j]))
                  <= 2 * std::sqrt(2.0) * d.cell_side);
        CHECK(distance(pts.front(), chain.points.front()) <= 2 * d.cell_side);
        CHECK(distance(pts.back(), chain.points.back()) <= 2 * d.cell_side);
    }
}

TEST_CASE("svg documents")
{
    auto const d = uniform_density(16, 16);
    SUBCASE("single site")
    {
        DiscreteMeasure nu{{{0.5, 0.5}}, {1.0}};
        std::vector<double> w{0.0};
        auto const svg = render_svg(d, nu, w, assign_cells(d, nu, w));
        CHECK(count(svg, "class=\"site\"") == 1);
        CHECK(count(svg, "<path") == 0);
    }
    SUBCASE("two equal weights")
    {
        DiscreteMeasure nu{{{0.25, 0.5}, {0.75, 0.5}}, {0.5, 0.5}};
        std::vector<double> w{0.0, 0.0};
        auto const svg = render_svg(d, nu, w, assign_cells(d, nu, w));
        CHECK(count(svg, "<path") == 1);
        CHECK(count(svg, "class=\"bisector\"") == 1);
        // A straight path has exactly one line segment.
        auto const start = svg.find(" d=\"", svg.find("<path"));
        auto const end = svg.find('"', start + 4);
        CHECK(count(svg.substr(start, end - start), " L") == 1);
        CHECK(count(svg, "class=\"site\"") == 2);
    }
    SUBCASE("negative weights are dashed and output is stable")
    {
        Rng rng(5);
        auto const nu = random_sites(rng, 6);
        std::vector<double> w{0.05, -0.03, 0.0, 0.02, -0.01, 0.04};
        auto const a = assign_cells(d, nu, w);
        SvgOptions opt;
        opt.show_raster = true;
        auto const svg = render_svg(d, nu, w, a, opt);
        CHECK(svg == render_svg(d, nu, w, assign_cells(d, nu, w), opt));
        CHECK(count(svg, "stroke-dasharray") == 2);
        CHECK(count(svg, "class=\"weight\"") == 6);
        CHECK(svg.find("<g id=\"raster\"") != std::string::npos);
        CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
    }
    SUBCASE("mismatched sizes")
    {
        DiscreteMeasure nu{{{0.5, 0.5}}, {1.0}};
        std::vector<double> w{0.0, 1.0};
        auto const a = assign_cells(d, nu, std::vector<double>{0.0});
        CHECK(error_code_of([&] { render_svg(d, nu, w, a); }) == ErrorCode::DimensionMismatch);
    }
}
