#include "semidot/laguerre.hpp"

#include "semidot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>
#include <tuple>
#include <utility>

namespace semidot {

namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) noexcept
    {
        double const t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    double value() const noexcept { return sum + carry; }
};

void check_inputs(const GridDensity& density, const DiscreteMeasure& nu, std::span<const double> w)
{
    if (nu.sites.empty())
        throw Error(ErrorCode::InvalidArgument, "discrete measure has no sites");
    if (w.size() != nu.sites.size() || nu.masses.size() != nu.sites.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "weight vector has " + std::to_string(w.size()) + " entries for "
                        + std::to_string(nu.sites.size()) + " sites");
    if (density.cols <= 0 || density.rows <= 0
        || density.cell_mass.size()
               != static_cast<std::size_t>(density.cols) * static_cast<std::size_t>(density.rows))
        throw Error(ErrorCode::InvalidArgument, "malformed grid density");
    for (double v : w)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "weights must be finite");
}

CellAssignment make_assignment(const GridDensity& density, std::size_t n)
{
    CellAssignment a;
    a.cols = density.cols;
    a.rows = density.rows;
    a.cell_side = density.cell_side;
    a.origin = density.origin;
    a.labels.assign(density.size(), 0);
    a.masses.assign(n, 0.0);
    a.cost_integrals.assign(n, 0.0);
    return a;
}

void aggregate(const GridDensity& density, const DiscreteMeasure& nu, CellAssignment& a)
{
    std::vector<CompensatedSum> mass(nu.size());
    std::vector<CompensatedSum> cost(nu.size());
    for (std::size_t q = 0; q < density.size(); ++q) {
        double const m = density.cell_mass[q];
        if (m == 0.0)
            continue;
        auto const i = static_cast<std::size_t>(a.labels[q]);
        mass[i].add(m);
        cost[i].add(distance(density.center(q), nu.sites[i]) * m);
    }
    for (std::size_t i = 0; i < nu.size(); ++i) {
        a.masses[i] = mass[i].value();
        a.cost_integrals[i] = cost[i].value();
    }
}

// Uniform bucket grid over the bounding box of the sites. Each bucket keeps
// its site indices in increasing order and the largest weight among them.
class SiteIndex {
public:
    SiteIndex(const DiscreteMeasure& nu, std::span<const double> w) : sites_(nu.sites), w_(w)
    {
        lo_ = hi_ = sites_.front();
        for (auto const& s : sites_) {
            lo_.x = std::min(lo_.x, s.x);
            lo_.y = std::min(lo_.y, s.y);
            hi_.x = std::max(hi_.x, s.x);
            hi_.y = std::max(hi_.y, s.y);
        }
        auto const n = static_cast<double>(sites_.size());
        int const side = std::max(1, static_cast<int>(std::ceil(std::sqrt(n / 2.0))));
        // A degenerate extent gets a single bucket so ring distance stays meaningful.
        sx_ = hi_.x > lo_.x ? side : 1;
        sy_ = hi_.y > lo_.y ? side : 1;
        bw_ = hi_.x > lo_.x ? (hi_.x - lo_.x) / sx_ : 1.0;
        bh_ = hi_.y > lo_.y ? (hi_.y - lo_.y) / sy_ : 1.0;
        min_bucket_ = std::min(sx_ > 1 ? bw_ : std::numeric_limits<double>::infinity(),
                               sy_ > 1 ? bh_ : std::numeric_limits<double>::infinity());
        buckets_.resize(static_cast<std::size_t>(sx_) * static_cast<std::size_t>(sy_));
        max_w_.assign(buckets_.size(), -std::numeric_limits<double>::infinity());
        global_max_w_ = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            auto const b = bucket_of(sites_[i]);
            buckets_[b].push_back(static_cast<std::int32_t>(i));
            max_w_[b] = std::max(max_w_[b], w_[i]);
            global_max_w_ = std::max(global_max_w_, w_[i]);
        }
    }

    double value(std::int32_t i, Point x) const noexcept
    {
        auto const k = static_cast<std::size_t>(i);
        return distance(x, sites_[k]) - w_[k];
    }

    // Exact argmin with lowest-index tie-break, seeded with a candidate label.
    std::int32_t argmin(Point x, std::int32_t hint) const
    {
        std::int32_t best = hint;
        double best_v = value(hint, x);
        int const cx = clamp_coord((x.x - lo_.x) / bw_, sx_);
        int const cy = clamp_coord((x.y - lo_.y) / bh_, sy_);
        int const rings = std::max(sx_, sy_);
        for (int r = 0; r < rings; ++r) {
            // Every bucket on ring r is at least (r-1) bucket widths away from
            // the projection of x onto the bounding box.
            if (r >= 2 && (r - 1) * min_bucket_ - global_max_w_ > best_v + kSlack)
                break;
            for_ring(cx, cy, r, [&](int bx, int by) {
                auto const b = static_cast<std::size_t>(by) * static_cast<std::size_t>(sx_)
                               + static_cast<std::size_t>(bx);
                if (buckets_[b].empty())
                    return;
                double const lb = box_distance(x, bx, by) - max_w_[b];
                if (lb > best_v + kSlack)
                    return;
                for (std::int32_t i : buckets_[b]) {
                    double const v = value(i, x);
                    if (v < best_v || (v == best_v && i < best)) {
                        best = i;
                        best_v = v;
                    }
                }
            });
        }
        return best;
    }

private:
    static constexpr double kSlack = 1e-12;

    static int clamp_coord(double t, int count) noexcept
    {
        if (!(t > 0.0))
            return 0;
        if (t >= count)
            return count - 1;
        return static_cast<int>(t);
    }

    std::size_t bucket_of(Point p) const noexcept
    {
        return static_cast<std::size_t>(clamp_coord((p.y - lo_.y) / bh_, sy_))
                   * static_cast<std::size_t>(sx_)
               + static_cast<std::size_t>(clamp_coord((p.x - lo_.x) / bw_, sx_));
    }

    double box_distance(Point x, int bx, int by) const noexcept
    {
        // Bucket boxes on the outer rim extend to cover clamped sites exactly.
        double const x0 = bx == 0 ? lo_.x : lo_.x + bx * bw_;
        double const x1 = bx == sx_ - 1 ? hi_.x : lo_.x + (bx + 1) * bw_;
        double const y0 = by == 0 ? lo_.y : lo_.y + by * bh_;
        double const y1 = by == sy_ - 1 ? hi_.y : lo_.y + (by + 1) * bh_;
        double const dx = x.x < x0 ? x0 - x.x : (x.x > x1 ? x.x - x1 : 0.0);
        double const dy = x.y < y0 ? y0 - x.y : (x.y > y1 ? x.y - y1 : 0.0);
        return std::hypot(dx, dy);
    }

    template <class F>
    void for_ring(int cx, int cy, int r, F&& visit) const
    {
        if (r == 0) {
            visit(cx, cy);
            return;
        }
        for (int bx = cx - r; bx <= cx + r; ++bx) {
            if (bx < 0 || bx >= sx_)
                continue;
            if (cy - r >= 0)
                visit(bx, cy - r);
            if (cy + r < sy_)
                visit(bx, cy + r);
        }
        for (int by = cy - r + 1; by <= cy + r - 1; ++by) {
            if (by < 0 || by >= sy_)
                continue;
            if (cx - r >= 0)
                visit(cx - r, by);
            if (cx + r < sx_)
                visit(cx + r, by);
        }
    }

    std::span<const Point> sites_;
    std::span<const double> w_;
    Point lo_, hi_;
    int sx_ = 1, sy_ = 1;
    double bw_ = 1.0, bh_ = 1.0, min_bucket_ = 1.0;
    std::vector<std::vector<std::int32_t>> buckets_;
    std::vector<double> max_w_;
    double global_max_w_ = 0.0;
};

} // namespace

CellAssignment assign_cells(const GridDensity& density, const DiscreteMeasure& nu,
                            std::span<const double> w, int threads)
{
    check_inputs(density, nu, w);
    CellAssignment a = make_assignment(density, nu.size());
    if (nu.size() > 1) {
        SiteIndex const index(nu, w);
        auto label_rows = [&](int row_begin, int row_end) {
            for (int row = row_begin; row < row_end; ++row) {
                std::int32_t hint = row > row_begin ? a.labels[density.index(0, row - 1)] : 0;
                for (int col = 0; col < density.cols; ++col) {
                    auto const q = density.index(col, row);
                    hint = index.argmin(density.center(q), hint);
                    a.labels[q] = hint;
                }
            }
        };
        int const workers = std::clamp(threads, 1, density.rows);
        if (workers == 1) {
            label_rows(0, density.rows);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int t = 0; t < workers; ++t) {
                int const begin = density.rows * t / workers;
                int const end = density.rows * (t + 1) / workers;
                pool.emplace_back(label_rows, begin, end);
            }
            for (auto& th : pool)
                th.join();
        }
    }
    aggregate(density, nu, a);
    return a;
}

CellAssignment assign_cells_bruteforce(const GridDensity& density, const DiscreteMeasure& nu,
                                       std::span<const double> w)
{
    check_inputs(density, nu, w);
    CellAssignment a = make_assignment(density, nu.size());
    for (std::size_t q = 0; q < density.size(); ++q) {
        Point const x = density.center(q);
        std::int32_t best = 0;
        double best_v = distance(x, nu.sites[0]) - w[0];
        for (std::size_t i = 1; i < nu.size(); ++i) {
            double const v = distance(x, nu.sites[i]) - w[i];
            if (v < best_v) {
                best_v = v;
                best = static_cast<std::int32_t>(i);
            }
        }
        a.labels[q] = best;
    }
    aggregate(density, nu, a);
    return a;
}

namespace {

// Lattice vertex id for raster corner (cx, cy), 0 <= cx <= cols, 0 <= cy <= rows.
struct Edge {
    std::int64_t v0 = 0;
    std::int64_t v1 = 0;
    Point mid;
};

} // namespace

std::vector<BoundaryChain> cell_boundary_chains(const CellAssignment& a)
{
    std::vector<BoundaryChain> chains;
    if (a.n_sites() <= 1 || a.labels.empty())
        return chains;

    auto const stride = static_cast<std::int64_t>(a.cols) + 1;
    auto vertex = [stride](int cx, int cy) { return static_cast<std::int64_t>(cy) * stride + cx; };
    auto label = [&a](int col, int row) {
        return a.labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(a.cols)
                        + static_cast<std::size_t>(col)];
    };

    std::map<std::pair<int, int>, std::vector<Edge>> by_pair;
    for (int row = 0; row < a.rows; ++row) {
        for (int col = 0; col < a.cols; ++col) {
            int const here = label(col, row);
            if (col + 1 < a.cols && label(col + 1, row) != here) {
                int const there = label(col + 1, row);
                by_pair[{std::min(here, there), std::max(here, there)}].push_back(
                    {vertex(col + 1, row), vertex(col + 1, row + 1),
                     {a.origin.x + (col + 1) * a.cell_side, a.origin.y + (row + 0.5) * a.cell_side}});
            }
            if (row + 1 < a.rows && label(col, row + 1) != here) {
                int const there = label(col, row + 1);
                by_pair[{std::min(here, there), std::max(here, there)}].push_back(
                    {vertex(col, row + 1), vertex(col + 1, row + 1),
                     {a.origin.x + (col + 0.5) * a.cell_side, a.origin.y + (row + 1) * a.cell_side}});
            }
        }
    }

    for (auto const& [pair, edges] : by_pair) {
        std::map<std::int64_t, std::vector<std::size_t>> incident;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            incident[edges[e].v0].push_back(e);
            incident[edges[e].v1].push_back(e);
        }
        std::vector<bool> used(edges.size(), false);

        auto walk = [&](std::int64_t start, std::size_t first_edge) {
            BoundaryChain chain;
            chain.site_a = pair.first;
            chain.site_b = pair.second;
            std::int64_t v = start;
            std::size_t e = first_edge;
            while (true) {
                used[e] = true;
                chain.points.push_back(edges[e].mid);
                v = edges[e].v0 == v ? edges[e].v1 : edges[e].v0;
                auto const& next = incident[v];
                if (next.size() != 2)
                    break;
                std::size_t const f = next[0] == e ? next[1] : next[0];
                if (used[f]) {
                    chain.closed = v == start;
                    break;
                }
                e = f;
            }
            chains.push_back(std::move(chain));
        };

        // Open chains start at vertices that are not simple pass-throughs.
        for (auto const& [v, es] : incident) {
            if (es.size() == 2)
                continue;
            for (std::size_t e : es)
                if (!used[e])
                    walk(v, e);
        }
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (!used[e])
                walk(edges[e].v0, e);
    }

    std::sort(chains.begin(), chains.end(), [](const BoundaryChain& l, const BoundaryChain& r) {
        auto const& lp = l.points.front();
        auto const& rp = r.points.front();
        return std::tie(l.site_a, l.site_b, lp.x, lp.y) < std::tie(r.site_a, r.site_b, rp.x, rp.y);
    });
    return chains;
}

std::string labels_to_pgm(const CellAssignment& a)
{
    std::string out = "P2\n" + std::to_string(a.cols) + " " + std::to_string(a.rows) + "\n255\n";
    for (int row = a.rows - 1; row >= 0; --row) {
        for (int col = 0; col < a.cols; ++col) {
            if (col > 0)
                out += ' ';
            out += std::to_string(
                a.labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(a.cols)
                         + static_cast<std::size_t>(col)]
                % 256);
        }
        out += '\n';
    }
    return out;
}

} // namespace semidot
