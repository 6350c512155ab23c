#include "semidot/oracle.hpp"

#include "semidot/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

namespace semidot {

FlowProblem FlowProblem::euclidean(DiscreteMeasure sources, DiscreteMeasure sinks)
{
    FlowProblem p;
    p.costs.resize(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        p.costs[i].resize(sinks.size());
        for (std::size_t j = 0; j < sinks.size(); ++j)
            p.costs[i][j] = distance(sources.sites[i], sinks.sites[j]);
    }
    p.sources = std::move(sources);
    p.sinks = std::move(sinks);
    return p;
}

DiscreteMeasure density_to_discrete(const GridDensity& density)
{
    DiscreteMeasure nu;
    for (std::size_t q = 0; q < density.size(); ++q) {
        if (density.cell_mass[q] <= 0.0)
            continue;
        nu.sites.push_back(density.center(q));
        nu.masses.push_back(density.cell_mass[q]);
    }
    return nu;
}

std::vector<long long> scale_masses(const std::vector<double>& masses, long long total)
{
    double const sum = std::accumulate(masses.begin(), masses.end(), 0.0);
    std::vector<long long> out(masses.size());
    std::vector<double> remainder(masses.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        double const exact = masses[i] / sum * static_cast<double>(total);
        out[i] = static_cast<long long>(std::floor(exact));
        remainder[i] = exact - static_cast<double>(out[i]);
        assigned += out[i];
    }
    std::vector<std::size_t> order(masses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
        ++out[order[k]];
        ++assigned;
    }
    for (std::size_t k = order.size(); assigned > total;) {
        k = (k == 0 ? order.size() : k) - 1;
        if (out[order[k]] > 0) {
            --out[order[k]];
            --assigned;
        }
    }
    return out;
}

namespace {

class MinCostFlow {
public:
    explicit MinCostFlow(std::size_t nodes) : adj_(nodes) {}

    void add_edge(std::size_t from, std::size_t to, long long cap, double cost)
    {
        adj_[from].push_back({to, adj_[to].size(), cap, cost});
        adj_[to].push_back({from, adj_[from].size() - 1, 0, -cost});
    }

    // Sends as much flow as possible from s to t; returns sum(flow * cost).
    double run(std::size_t s, std::size_t t)
    {
        std::size_t const n = adj_.size();
        constexpr double inf = std::numeric_limits<double>::infinity();

        // Bellman-Ford potentials; handles negative edge costs if any appear.
        std::vector<double> h(n, inf);
        h[s] = 0.0;
        for (std::size_t round = 0; round + 1 < n; ++round) {
            bool changed = false;
            for (std::size_t u = 0; u < n; ++u) {
                if (h[u] == inf)
                    continue;
                for (auto const& e : adj_[u])
                    if (e.cap > 0 && h[u] + e.cost < h[e.to]) {
                        h[e.to] = h[u] + e.cost;
                        changed = true;
                    }
            }
            if (!changed)
                break;
        }
        for (double& v : h)
            if (v == inf)
                v = 0.0;

        double total = 0.0;
        std::vector<double> dist(n);
        std::vector<std::size_t> prev_node(n), prev_edge(n);
        using Item = std::pair<double, std::size_t>;
        while (true) {
            std::fill(dist.begin(), dist.end(), inf);
            dist[s] = 0.0;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
            heap.push({0.0, s});
            while (!heap.empty()) {
                auto const [d, u] = heap.top();
                heap.pop();
                if (d > dist[u])
                    continue;
                for (std::size_t k = 0; k < adj_[u].size(); ++k) {
                    auto const& e = adj_[u][k];
                    if (e.cap <= 0)
                        continue;
                    double const reduced = std::max(0.0, e.cost + h[u] - h[e.to]);
                    if (d + reduced < dist[e.to]) {
                        dist[e.to] = d + reduced;
                        prev_node[e.to] = u;
                        prev_edge[e.to] = k;
                        heap.push({dist[e.to], e.to});
                    }
                }
            }
            if (dist[t] == inf)
                break;
            for (std::size_t v = 0; v < n; ++v)
                if (dist[v] < inf)
                    h[v] += dist[v];

            long long push = std::numeric_limits<long long>::max();
            for (std::size_t v = t; v != s; v = prev_node[v])
                push = std::min(push, adj_[prev_node[v]][prev_edge[v]].cap);
            for (std::size_t v = t; v != s; v = prev_node[v]) {
                auto& e = adj_[prev_node[v]][prev_edge[v]];
                e.cap -= push;
                adj_[v][e.rev].cap += push;
                total += static_cast<double>(push) * e.cost;
            }
        }
        return total;
    }

private:
    struct Arc {
        std::size_t to;
        std::size_t rev;
        long long cap;
        double cost;
    };
    std::vector<std::vector<Arc>> adj_;
};

} // namespace

double exact_ot_cost(const FlowProblem& problem, long long mass_scale)
{
    auto const& src = problem.sources;
    auto const& dst = problem.sinks;
    if (src.size() == 0 || dst.size() == 0)
        throw Error(ErrorCode::InvalidArgument, "transport problem needs sources and sinks");
    if (problem.costs.size() != src.size())
        throw Error(ErrorCode::DimensionMismatch, "cost matrix row count differs from sources");
    double const total_src = std::accumulate(src.masses.begin(), src.masses.end(), 0.0);
    double const total_dst = std::accumulate(dst.masses.begin(), dst.masses.end(), 0.0);
    if (std::abs(total_src - total_dst) > 1e-9)
        throw Error(ErrorCode::Unbalanced, "source and sink masses differ");

    std::vector<long long> const supply = scale_masses(src.masses, mass_scale);
    std::vector<long long> const demand = scale_masses(dst.masses, mass_scale);
    std::size_t const m = src.size();
    std::size_t const k = dst.size();
    std::size_t const s = m + k;
    std::size_t const t = m + k + 1;
    MinCostFlow flow(m + k + 2);
    for (std::size_t i = 0; i < m; ++i) {
        if (problem.costs[i].size() != k)
            throw Error(ErrorCode::DimensionMismatch, "cost matrix column count differs from sinks");
        flow.add_edge(s, i, supply[i], 0.0);
        for (std::size_t j = 0; j < k; ++j)
            flow.add_edge(i, m + j, mass_scale, problem.costs[i][j]);
    }
    for (std::size_t j = 0; j < k; ++j)
        flow.add_edge(m + j, t, demand[j], 0.0);
    return flow.run(s, t) / static_cast<double>(mass_scale);
}

} // namespace semidot
