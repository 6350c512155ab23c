#include "semidot/objective.hpp"

#include "semidot/error.hpp"

#include <cmath>

namespace semidot {

ObjectiveEvaluation evaluate_from(const CellAssignment& assignment, std::span<const double> w,
                                  const DiscreteMeasure& nu)
{
    std::size_t const n = nu.size();
    if (w.size() != n || assignment.n_sites() != n)
        throw Error(ErrorCode::DimensionMismatch, "weight vector and measure sizes differ");
    ObjectiveEvaluation out;
    out.gradient.resize(n);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        value += -nu.masses[i] * w[i] - assignment.cost_integrals[i] + w[i] * assignment.masses[i];
        out.gradient[i] = assignment.masses[i] - nu.masses[i];
    }
    out.value = value;
    return out;
}

ObjectiveEvaluation evaluate(std::span<const double> w, const GridDensity& density,
                             const DiscreteMeasure& nu, int threads)
{
    return evaluate_from(assign_cells(density, nu, w, threads), w, nu);
}

double grad_l1_norm(std::span<const double> gradient) noexcept
{
    double total = 0.0;
    for (double g : gradient)
        total += std::abs(g);
    return total;
}

double grad_l1_norm(const ObjectiveEvaluation& eval) noexcept
{
    return grad_l1_norm(eval.gradient);
}

Objective make_transport_objective(const GridDensity& density, const DiscreteMeasure& nu,
                                   int threads)
{
    return [&density, &nu, threads](std::span<const double> w) {
        return evaluate(w, density, nu, threads);
    };
}

} // namespace semidot
