#include "semidot/cli.hpp"

#include "semidot/laguerre.hpp"
#include "semidot/multiscale.hpp"
#include "semidot/objective.hpp"
#include "semidot/oracle.hpp"
#include "semidot/transport.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace semidot::cli {

namespace {

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

DiscreteMeasure random_sites(Rng& rng, int n)
{
    DiscreteMeasure nu;
    for (int i = 0; i < n; ++i) {
        nu.sites.push_back({uniform01(rng), uniform01(rng)});
        nu.masses.push_back(1.0 / n);
    }
    return nu;
}

struct Check {
    std::string name;
    bool ok = false;
    std::string detail;
};

Check check_gradient(bool inject_fault)
{
    Check c{"gradient_fd", true, {}};
    Rng rng(7);
    GridDensity const density = uniform_density(16, 16);
    double const h = 1e-3;
    double worst = 0.0;
    for (int instance = 0; instance < 3 && c.ok; ++instance) {
        DiscreteMeasure const nu = random_sites(rng, 4 + instance);
        auto const n = nu.size();
        auto eval = [&](const std::vector<double>& w) {
            ObjectiveEvaluation e = evaluate(w, density, nu);
            if (inject_fault)
                e.gradient[0] = -e.gradient[0];
            return e;
        };
        for (std::size_t i = 0; i < n; ++i) {
            bool sampled = false;
            for (int attempt = 0; attempt < 500 && !sampled; ++attempt) {
                std::vector<double> w(n);
                for (double& v : w)
                    v = 0.1 * (uniform01(rng) - 0.5);
                std::vector<double> up = w, down = w;
                up[i] += h;
                down[i] -= h;
                auto const base = assign_cells(density, nu, w).labels;
                if (assign_cells(density, nu, up).labels != base
                    || assign_cells(density, nu, down).labels != base)
                    continue;
                sampled = true;
                double const fd = (evaluate(up, density, nu).value - evaluate(down, density, nu).value)
                                  / (2.0 * h);
                double const err = std::abs(fd - eval(w).gradient[i]);
                worst = std::max(worst, err);
                if (err > 1e-6)
                    c.ok = false;
            }
            if (!sampled) {
                c.ok = false;
                c.detail = "no flip-free sample";
            }
        }
    }
    if (c.detail.empty())
        c.detail = "max |fd - grad| = " + std::to_string(worst);
    return c;
}

Check check_shift()
{
    Check c{"shift_invariance", true, {}};
    Rng rng(11);
    GridDensity const density = uniform_density(16, 16);
    DiscreteMeasure const nu = random_sites(rng, 5);
    std::vector<double> w(nu.size());
    for (double& v : w)
        v = 0.1 * (uniform01(rng) - 0.5);
    auto const base_labels = assign_cells(density, nu, w).labels;
    double const base = evaluate(w, density, nu).value;
    for (double r : {-3.0, 0.7, 100.0}) {
        std::vector<double> shifted = w;
        for (double& v : shifted)
            v += r;
        double const value = evaluate(shifted, density, nu).value;
        if (std::abs(value - base) > 1e-10 * std::abs(base)
            || assign_cells(density, nu, shifted).labels != base_labels)
            c.ok = false;
    }
    c.detail = c.ok ? "r in {-3, 0.7, 100}" : "value or labels changed under a shift";
    return c;
}

Check check_two_sites()
{
    Check c{"two_site_symmetry", true, {}};
    GridDensity const density = uniform_density(16, 16);
    DiscreteMeasure const nu{{{0.25, 0.5}, {0.75, 0.5}}, {0.5, 0.5}};
    OptimizerConfig cfg;
    OptimResult const r = solve_single(density, nu, cfg);
    auto const a = assign_cells(density, nu, r.w);
    c.ok = r.status == OptimStatus::Converged && std::abs(a.masses[0] - 0.5) <= cfg.eps / 2
           && std::abs(a.masses[1] - 0.5) <= cfg.eps / 2;
    c.detail = "masses " + std::to_string(a.masses[0]) + ", " + std::to_string(a.masses[1]);
    return c;
}

Check check_oracle()
{
    Check c{"oracle_8x8", true, {}};
    Rng rng(3);
    GridDensity const density = uniform_density(8, 8);
    DiscreteMeasure nu = random_sites(rng, 4);
    // Target masses realized by a known weight vector, so exact adaptation exists.
    std::vector<double> planted(nu.size());
    for (double& v : planted)
        v = 0.1 * (uniform01(rng) - 0.5);
    nu.masses = assign_cells(density, nu, planted).masses;
    for (double m : nu.masses)
        if (m <= 0.0)
            return {"oracle_8x8", false, "planted instance has an empty cell"};

    OptimizerConfig cfg;
    cfg.eps = 1e-3;
    OptimResult const r = solve_single(density, nu, cfg);
    double const cost = transport_cost(assign_cells(density, nu, r.w));
    double const exact = exact_ot_cost(FlowProblem::euclidean(density_to_discrete(density), nu));
    double const bound = std::sqrt(2.0) / 2.0 * density.cell_side + 2.0 * cfg.eps;
    c.ok = r.status == OptimStatus::Converged && std::abs(cost - exact) <= bound;
    c.detail = "|" + std::to_string(cost) + " - " + std::to_string(exact) + "| <= "
               + std::to_string(bound);
    return c;
}

} // namespace

int cmd_selftest(const SelftestOptions& options, std::ostream& out, std::ostream& err)
{
    auto const start = std::chrono::steady_clock::now();
    std::vector<std::function<Check()>> const checks = {
        [&] { return check_gradient(options.inject_gradient_fault); },
        check_shift,
        check_two_sites,
        check_oracle,
    };
    bool all = true;
    for (auto const& run_check : checks) {
        Check const c = run_check();
        all = all && c.ok;
        out << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    double const seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (all ? "selftest passed" : "selftest FAILED") << " in " << seconds << " s\n";
    if (!all)
        err << "semidot: selftest failed\n";
    return all ? kExitOk : kExitFailure;
}

} // namespace semidot::cli
