#pragma once

#include "semidot/laguerre.hpp"
#include "semidot/measure.hpp"

#include <functional>
#include <span>
#include <vector>

namespace semidot {

/// Value and gradient of a function at one point.
struct ObjectiveEvaluation {
    double value = 0.0;
    std::vector<double> gradient;
};

/// Callable the optimizer minimizes.
using Objective = std::function<ObjectiveEvaluation(std::span<const double>)>;

/// Dual functional of the semi-discrete transport problem,
///
///   Phi(w) = sum_i ( -lambda_i w_i - int_{Vor_i} (|x - s_i| - w_i) dmu ),
///
/// together with its gradient dPhi/dw_i = mu(Vor_i) - lambda_i. Phi is convex
/// and its minimizers are exactly the adapted weight vectors.
ObjectiveEvaluation evaluate(std::span<const double> w, const GridDensity& density,
                             const DiscreteMeasure& nu, int threads = 1);

/// Same as evaluate() but reuses an assignment computed for w.
ObjectiveEvaluation evaluate_from(const CellAssignment& assignment, std::span<const double> w,
                                  const DiscreteMeasure& nu);

/// Sum of |gradient_i|; twice the mass sent to the wrong sites.
double grad_l1_norm(const ObjectiveEvaluation& eval) noexcept;
double grad_l1_norm(std::span<const double> gradient) noexcept;

/// Binds density and target so the result can be handed to minimize().
Objective make_transport_objective(const GridDensity& density, const DiscreteMeasure& nu,
                                   int threads = 1);

} // namespace semidot
