#pragma once

#include "semidot/objective.hpp"

#include <deque>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace semidot {

struct OptimizerConfig {
    double eps = 1e-3;        ///< stop once the l1 norm of the gradient is <= eps
    int memory = 10;          ///< number of (dw, dgrad) pairs kept
    double c1 = 1e-4;         ///< sufficient decrease constant
    double c2 = 0.9;          ///< curvature constant
    int max_iters = 1000;
    int max_linesearch = 40;  ///< trial points per line search
    double initial_step = 1.0;

    /// Throws Error{InvalidArgument} unless 0 < c1 < c2 < 1, eps > 0 and the
    /// counts are positive.
    void validate() const;
};

enum class OptimStatus { Converged, MaxIters, LineSearchFailed };

const char* to_string(OptimStatus status) noexcept;

/// One accepted step, kept so the Wolfe conditions can be checked after the fact.
struct StepRecord {
    int iter = 0;
    double phi_before = 0.0;
    double slope_before = 0.0; ///< grad(w) . d
    double step = 0.0;
    double phi_after = 0.0;
    double slope_after = 0.0;  ///< grad(w + t d) . d
    double grad_l1_after = 0.0;
    int n_evals = 0;           ///< objective calls spent by the line search
};

struct OptimResult {
    std::vector<double> w;
    int iterations = 0;
    int evaluations = 0;
    double initial_grad_l1 = 0.0;
    double final_grad_l1 = 0.0;
    std::vector<double> phi_trace; ///< Phi at w0 and after every accepted step
    std::vector<StepRecord> steps;
    OptimStatus status = OptimStatus::MaxIters;
};

/// Step and gradient differences between consecutive iterates.
struct CurvaturePair {
    std::vector<double> dw;
    std::vector<double> dgrad;
};

/// L-BFGS two-loop recursion: returns -H * grad for the inverse Hessian
/// approximation built from `history` (oldest first). Pairs with
/// dw . dgrad <= 0 are skipped. The initial matrix is gamma * I with gamma
/// taken from the newest usable pair, or the identity without one.
std::vector<double> two_loop_direction(std::span<const CurvaturePair> history,
                                       std::span<const double> grad);

struct LineSearchResult {
    bool accepted = false;
    double step = 0.0;
    std::vector<double> w;      ///< w + step * direction
    ObjectiveEvaluation eval;   ///< objective at w
    int evaluations = 0;
};

/// Bracketing search for a step satisfying the weak Wolfe conditions
///
///   f(w + t d) <= f(w) + c1 t grad(w).d   and   grad(w + t d).d >= c2 grad(w).d,
///
/// starting from cfg.initial_step. Doubles the step until the interval is
/// bracketed, then shrinks it with safeguarded quadratic interpolation.
/// `accepted` is false after cfg.max_linesearch trials without success.
LineSearchResult wolfe_line_search(const Objective& objective, std::span<const double> w,
                                   const ObjectiveEvaluation& at_w,
                                   std::span<const double> direction, const OptimizerConfig& cfg);

/// Minimizes `objective` from w0 with L-BFGS and the Wolfe line search.
/// Failures are reported through OptimResult::status.
OptimResult minimize(const Objective& objective, std::span<const double> w0,
                     const OptimizerConfig& cfg);

/// Writes "level,iter,phi,grad_l1,step,n_evals" rows for one solve. The
/// header is written when `header` is set.
void write_trace_csv(std::ostream& out, const OptimResult& result, int level, bool header);

} // namespace semidot
