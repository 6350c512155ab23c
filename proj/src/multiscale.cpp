#include "semidot/multiscale.hpp"

#include "semidot/error.hpp"
#include "semidot/format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace semidot {

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound)
{
    if (bound == 0)
        throw Error(ErrorCode::InvalidArgument, "uniform_index needs a positive bound");
    // 2^64 mod bound; draws below it would bias the result.
    std::uint64_t const threshold = (0 - bound) % bound;
    std::uint64_t x = rng();
    while (x < threshold)
        x = rng();
    return x % bound;
}

namespace {

double squared(Point p) noexcept { return dot(p, p); }

int nearest(const std::vector<Point>& centers, Point p)
{
    int best = 0;
    double best_d = squared(p - centers[0]);
    for (std::size_t k = 1; k < centers.size(); ++k) {
        double const d = squared(p - centers[k]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

} // namespace

DecompositionLevel lloyd_cluster(const DiscreteMeasure& nu, int n_clusters, std::uint64_t seed,
                                 int max_rounds)
{
    auto const n = static_cast<int>(nu.size());
    if (n_clusters < 1 || n_clusters > n)
        throw Error(ErrorCode::InvalidArgument, "cluster count must lie in [1, |S|]");
    if (nu.masses.size() != nu.sites.size())
        throw Error(ErrorCode::InvalidArgument, "site and mass counts differ");

    DecompositionLevel level;
    if (n_clusters == n) {
        level.measure = nu;
        level.tau.resize(static_cast<std::size_t>(n));
        std::iota(level.tau.begin(), level.tau.end(), 0);
        return level;
    }

    // Distinct initial centers: partial Fisher-Yates over the site indices.
    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<Point> centers(static_cast<std::size_t>(n_clusters));
    for (int k = 0; k < n_clusters; ++k) {
        auto const j = k + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - k)));
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
        centers[static_cast<std::size_t>(k)] = nu.sites[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    }

    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    std::vector<double> mass(static_cast<std::size_t>(n_clusters));
    std::vector<int> members(static_cast<std::size_t>(n_clusters));
    for (int round = 0; round < max_rounds; ++round) {
        std::fill(members.begin(), members.end(), 0);
        for (int p = 0; p < n; ++p) {
            int const k = nearest(centers, nu.sites[static_cast<std::size_t>(p)]);
            assign[static_cast<std::size_t>(p)] = k;
            ++members[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < n_clusters; ++k) {
            if (members[static_cast<std::size_t>(k)] > 0)
                continue;
            int far = -1;
            double far_d = -1.0;
            for (int p = 0; p < n; ++p) {
                int const c = assign[static_cast<std::size_t>(p)];
                if (members[static_cast<std::size_t>(c)] < 2)
                    continue;
                double const d = squared(nu.sites[static_cast<std::size_t>(p)] - centers[static_cast<std::size_t>(c)]);
                if (d > far_d) {
                    far_d = d;
                    far = p;
                }
            }
            --members[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
            assign[static_cast<std::size_t>(far)] = k;
            members[static_cast<std::size_t>(k)] = 1;
        }

        std::vector<Point> next(static_cast<std::size_t>(n_clusters), Point{});
        std::fill(mass.begin(), mass.end(), 0.0);
        for (int p = 0; p < n; ++p) {
            auto const k = static_cast<std::size_t>(assign[static_cast<std::size_t>(p)]);
            double const m = nu.masses[static_cast<std::size_t>(p)];
            next[k] = next[k] + m * nu.sites[static_cast<std::size_t>(p)];
            mass[k] += m;
        }
        for (std::size_t k = 0; k < next.size(); ++k)
            next[k] = (1.0 / mass[k]) * next[k];

        double sse = 0.0;
        for (int p = 0; p < n; ++p)
            sse += nu.masses[static_cast<std::size_t>(p)]
                   * squared(nu.sites[static_cast<std::size_t>(p)]
                             - next[static_cast<std::size_t>(assign[static_cast<std::size_t>(p)])]);
        level.lloyd_sse.push_back(sse);
        level.lloyd_rounds = round + 1;

        bool const unchanged = next == centers;
        centers = std::move(next);
        if (unchanged)
            break;
    }

    level.measure.sites = centers;
    level.measure.masses = mass;
    level.tau = assign;
    for (int p = 0; p < n; ++p)
        level.lloyd_distance += nu.masses[static_cast<std::size_t>(p)]
                                * distance(nu.sites[static_cast<std::size_t>(p)],
                                           centers[static_cast<std::size_t>(assign[static_cast<std::size_t>(p)])]);
    return level;
}

std::vector<DecompositionLevel> decompose(const DiscreteMeasure& nu, int factor, int coarsest,
                                          std::uint64_t seed)
{
    if (factor < 2)
        throw Error(ErrorCode::InvalidArgument, "decomposition factor must be >= 2");
    if (coarsest < 1)
        throw Error(ErrorCode::InvalidArgument, "coarsest level size must be >= 1");
    std::vector<DecompositionLevel> levels;
    const DiscreteMeasure* current = &nu;
    while (true) {
        auto const size = static_cast<int>(current->size());
        int const clusters = size / factor;
        if (clusters < 2 || size <= coarsest)
            break;
        levels.push_back(lloyd_cluster(*current, clusters, seed + levels.size()));
        current = &levels.back().measure;
    }
    return levels;
}

void recenter(std::vector<double>& w) noexcept
{
    if (w.empty())
        return;
    double const mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    for (double& v : w)
        v -= mean;
}

int MultiscaleReport::iterations_total() const noexcept
{
    int total = 0;
    for (auto const& r : per_level)
        total += r.iterations;
    return total;
}

OptimResult solve_single(const GridDensity& density, const DiscreteMeasure& nu,
                         const OptimizerConfig& cfg, int threads)
{
    OptimResult r = minimize(make_transport_objective(density, nu, threads),
                             std::vector<double>(nu.size(), 0.0), cfg);
    recenter(r.w);
    return r;
}

MultiscaleReport solve_multiscale(const GridDensity& density, const DiscreteMeasure& nu,
                                  const OptimizerConfig& cfg, const MultiscaleOptions& ms)
{
    validate(density);
    validate(nu, false);
    cfg.validate();
    if (ms.coarse_grid_divisor < 1)
        throw Error(ErrorCode::InvalidArgument, "grid divisor must be >= 1");

    MultiscaleReport report;
    report.levels = decompose(nu, ms.factor, ms.coarsest, ms.seed);

    GridDensity const coarse_density = coarsen(density, ms.coarse_grid_divisor);
    std::vector<double> w;
    // Level index L..0; level l > 0 solves for report.levels[l-1].measure.
    for (auto l = report.levels.size() + 1; l-- > 0;) {
        const DiscreteMeasure& target = l == 0 ? nu : report.levels[l - 1].measure;
        const GridDensity& grid = l == 0 ? density : coarse_density;
        if (l == report.levels.size()) {
            w.assign(target.size(), 0.0);
        } else {
            // Each site starts from the weight of its cluster representative.
            auto const& tau = report.levels[l].tau;
            std::vector<double> fine(target.size());
            for (std::size_t p = 0; p < fine.size(); ++p)
                fine[p] = w[static_cast<std::size_t>(tau[p])];
            w = std::move(fine);
        }
        report.initial_w.push_back(w);
        auto const start = std::chrono::steady_clock::now();
        OptimResult r = minimize(make_transport_objective(grid, target, ms.threads), w, cfg);
        auto const stop = std::chrono::steady_clock::now();
        w = r.w;
        report.timings.push_back({target.size(), std::chrono::duration<double>(stop - start).count()});
        report.per_level.push_back(std::move(r));
    }
    report.final_w = w;
    recenter(report.final_w);
    return report;
}

std::string to_json(const MultiscaleReport& report, bool include_timing)
{
    std::string out = "{\"levels\":[";
    for (std::size_t k = 0; k < report.per_level.size(); ++k) {
        auto const& r = report.per_level[k];
        if (k > 0)
            out += ',';
        out += "{\"n_sites\":" + std::to_string(r.w.size())
               + ",\"iterations\":" + std::to_string(r.iterations)
               + ",\"evaluations\":" + std::to_string(r.evaluations)
               + ",\"grad_l1\":" + format_double(r.final_grad_l1) + ",\"status\":\""
               + to_string(r.status) + "\"";
        if (include_timing)
            out += ",\"seconds\":" + format_double(report.timings[k].seconds);
        out += '}';
    }
    out += "],\"iterations_total\":" + std::to_string(report.iterations_total()) + "}";
    return out;
}

} // namespace semidot
