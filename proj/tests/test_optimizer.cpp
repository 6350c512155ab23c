#include "test_support.hpp"

#include "semidot/optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace semidot;
using namespace semidot::testing;

namespace {

Objective shifted_quadratic(std::size_t n)
{
    return [n](std::span<const double> w) {
        ObjectiveEvaluation e;
        e.gradient.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            double const r = w[j] - static_cast<double>(j + 1);
            e.value += r * r;
            e.gradient[j] = 2.0 * r;
        }
        return e;
    };
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

void check_wolfe(const OptimResult& r, const OptimizerConfig& cfg)
{
    for (auto const& s : r.steps) {
        CHECK(s.slope_before < 0.0);
        CHECK(s.phi_after <= s.phi_before + cfg.c1 * s.step * s.slope_before);
        CHECK(s.slope_after >= cfg.c2 * s.slope_before);
    }
    for (std::size_t k = 1; k < r.phi_trace.size(); ++k)
        CHECK(r.phi_trace[k] <= r.phi_trace[k - 1]);
}

} // namespace

TEST_CASE("quadratic with known minimizer")
{
    OptimizerConfig cfg;
    cfg.eps = 1e-8;
    std::vector<double> w0(6, 0.0);
    auto const r = minimize(shifted_quadratic(6), w0, cfg);
    CHECK(r.status == OptimStatus::Converged);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(std::abs(r.w[j] - static_cast<double>(j + 1)) <= 1e-6);
    CHECK(r.final_grad_l1 <= cfg.eps);
    check_wolfe(r, cfg);
}

TEST_CASE("single-site objective returns the start point")
{
    auto const d = uniform_density(8, 8);
    DiscreteMeasure nu{{{0.3, 0.3}}, {1.0}};
    std::vector<double> w0{0.42};
    auto const r = minimize(make_transport_objective(d, nu), w0, OptimizerConfig{});
    CHECK(r.status == OptimStatus::Converged);
    CHECK(r.iterations == 0);
    CHECK(r.w == w0);
}

TEST_CASE("mirrored sites end with both cells near one half")
{
    // Density symmetric about x = 0.5 but otherwise uneven.
    GridDensity d = uniform_density(16, 16);
    double total = 0.0;
    for (int r = 0; r < d.rows; ++r)
        for (int c = 0; c < d.cols; ++c) {
            double const v = 1.0 + std::abs(c - 7.5) + 0.3 * r;
            d.cell_mass[d.index(c, r)] = v;
            total += v;
        }
    for (double& m : d.cell_mass)
        m /= total;
    DiscreteMeasure nu{{{0.3, 0.4}, {0.7, 0.4}}, {0.5, 0.5}};
    OptimizerConfig cfg;
    auto const r = minimize(make_transport_objective(d, nu), std::vector<double>{0, 0}, cfg);
    REQUIRE(r.status == OptimStatus::Converged);
    auto const a = assign_cells(d, nu, r.w);
    CHECK(std::abs(a.masses[0] - 0.5) <= cfg.eps / 2);
    CHECK(std::abs(a.masses[1] - 0.5) <= cfg.eps / 2);
}

TEST_CASE("two sites with uneven masses agree with a bisection on the weight gap")
{
    auto const d = uniform_density(16, 16);
    DiscreteMeasure nu{{{0.3, 0.45}, {0.65, 0.6}}, {77.0 / 256.0, 179.0 / 256.0}};
    auto mass0 = [&](double t) { return assign_cells(d, nu, std::vector<double>{t, 0.0}).masses[0]; };

    // mass0 is non-decreasing in t; find the interval where it equals lambda_0.
    auto boundary = [&](bool strict) {
        double lo = -1.0, hi = 1.0;
        for (int k = 0; k < 200; ++k) {
            double const mid = 0.5 * (lo + hi);
            bool const above = strict ? mass0(mid) > nu.masses[0] + 1e-12
                                      : mass0(mid) >= nu.masses[0] - 1e-12;
            (above ? hi : lo) = mid;
        }
        return hi;
    };
    double const t_lo = boundary(false);
    double const t_hi = boundary(true);
    REQUIRE(t_lo < t_hi);

    OptimizerConfig cfg;
    cfg.eps = 1e-3; // finer than the 1/256 mass granularity
    auto const r = minimize(make_transport_objective(d, nu), std::vector<double>{0, 0}, cfg);
    REQUIRE(r.status == OptimStatus::Converged);
    double const gap = r.w[0] - r.w[1];
    CHECK(gap >= t_lo - 1e-9);
    CHECK(gap <= t_hi + 1e-9);
}

TEST_CASE("two-loop recursion")
{
    std::vector<double> g{0.5, -2.0, 1.0};
    auto const plain = two_loop_direction({}, g);
    CHECK(plain == std::vector<double>{-0.5, 2.0, -1.0});

    // One pair from f(w) = a w^2 / 2: dgrad = a dw, so H = 1/a.
    double const a = 4.0;
    std::vector<CurvaturePair> one{{{0.5}, {a * 0.5}}};
    auto const d = two_loop_direction(one, std::vector<double>{3.0});
    CHECK(d[0] == doctest::Approx(-3.0 / a).epsilon(1e-15));

    // Pairs with non-positive curvature are ignored.
    std::vector<CurvaturePair> with_bad{{{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}};
    CHECK(two_loop_direction(with_bad, g) == plain);
    std::vector<CurvaturePair> good{{{0.1, 0.2, 0.0}, {0.3, 0.1, 0.2}}};
    std::vector<CurvaturePair> mixed{good[0], {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    auto const dg = two_loop_direction(good, g);
    auto const dm = two_loop_direction(mixed, g);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(dm[i] == doctest::Approx(dg[i]).epsilon(1e-14));

    CHECK(error_code_of([&] { two_loop_direction(good, std::vector<double>{1.0}); })
          == ErrorCode::DimensionMismatch);
}

TEST_CASE("two-loop output is a descent direction")
{
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t const n = 2 + uniform_index(rng, 8);
        std::vector<CurvaturePair> history;
        auto const pairs = uniform_index(rng, 6);
        for (std::size_t k = 0; k < pairs; ++k) {
            CurvaturePair p{random_weights(rng, n, 2.0), random_weights(rng, n, 2.0)};
            history.push_back(p);
        }
        auto g = random_weights(rng, n, 2.0);
        auto const d = two_loop_direction(history, g);
        CHECK(dot(d, g) < 0.0);
    }
}

TEST_CASE("line search on a parabola accepts the unit step")
{
    Objective f = [](std::span<const double> w) {
        return ObjectiveEvaluation{(w[0] - 1) * (w[0] - 1), {2 * (w[0] - 1)}};
    };
    OptimizerConfig cfg;
    std::vector<double> w{0.0}, d{1.0};
    auto const ls = wolfe_line_search(f, w, f(w), d, cfg);
    REQUIRE(ls.accepted);
    CHECK(ls.step == 1.0);
    CHECK(ls.w[0] == 1.0);
    CHECK(ls.eval.value == 0.0);
}

TEST_CASE("line search fails on a linear objective")
{
    Objective f = [](std::span<const double> w) { return ObjectiveEvaluation{-w[0], {-1.0}}; };
    OptimizerConfig cfg;
    std::vector<double> w{0.0}, d{1.0};
    auto const ls = wolfe_line_search(f, w, f(w), d, cfg);
    CHECK_FALSE(ls.accepted);
    CHECK(ls.evaluations == cfg.max_linesearch);

    auto const r = minimize(f, w, cfg);
    CHECK(r.status == OptimStatus::LineSearchFailed);
}

TEST_CASE("accepted steps satisfy both Wolfe inequalities on transport objectives")
{
    Rng rng(2);
    for (int trial = 0; trial < 6; ++trial) {
        auto const d = random_density(rng, 24, 24);
        auto nu = random_sites(rng, trial < 3 ? 4 : 10);
        plant_masses(d, nu, rng);
        OptimizerConfig cfg;
        cfg.eps = 1e-4;
        cfg.max_iters = 200;
        auto const r = minimize(make_transport_objective(d, nu), std::vector<double>(nu.size(), 0.0), cfg);
        CHECK(r.phi_trace.size() == r.steps.size() + 1);
        check_wolfe(r, cfg);
        for (auto const& s : r.steps)
            CHECK(s.phi_before - s.phi_after >= cfg.c1 * s.step * std::abs(s.slope_before));
        CHECK((r.status == OptimStatus::Converged) == (r.final_grad_l1 <= cfg.eps));
    }
}

TEST_CASE("planted instances converge to adapted weights")
{
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        auto const d = trial % 2 ? uniform_density(32, 32) : random_density(rng, 32, 32);
        auto nu = random_sites(rng, 8 + 4 * trial);
        REQUIRE(plant_masses(d, nu, rng));
        OptimizerConfig cfg;
        auto const r = minimize(make_transport_objective(d, nu), std::vector<double>(nu.size(), 0.0), cfg);
        REQUIRE(r.status == OptimStatus::Converged);
        auto const a = assign_cells(d, nu, r.w);
        for (std::size_t i = 0; i < nu.size(); ++i)
            CHECK(std::abs(a.masses[i] - nu.masses[i]) <= cfg.eps);
        for (std::size_t k = 0; k < r.steps.size(); ++k)
            CHECK(r.phi_trace[k + 1] < r.phi_trace[k]);
    }
}

TEST_CASE("config validation")
{
    OptimizerConfig ok;
    CHECK_NOTHROW(ok.validate());
    auto bad = ok;
    bad.eps = 0.0;
    CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    bad = ok;
    bad.c1 = 0.95;
    CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    bad = ok;
    bad.c2 = 1.0;
    CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    bad = ok;
    bad.memory = 0;
    CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    CHECK(std::string(to_string(OptimStatus::Converged)) != to_string(OptimStatus::MaxIters));
}

TEST_CASE("trace csv")
{
    OptimizerConfig cfg;
    cfg.eps = 1e-8;
    auto const r = minimize(shifted_quadratic(2), std::vector<double>{0, 0}, cfg);
    std::ostringstream out;
    write_trace_csv(out, r, 3, true);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "level,iter,phi,grad_l1,step,n_evals");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind("3,", 0) == 0);
        ++rows;
    }
    CHECK(rows == static_cast<int>(r.phi_trace.size()));
}
