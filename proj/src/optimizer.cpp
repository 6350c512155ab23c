#include "semidot/optimizer.hpp"

#include "semidot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace semidot {

namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

bool usable(const CurvaturePair& p) noexcept
{
    return dot(p.dw, p.dgrad) > 0.0;
}

std::vector<double> axpy(std::span<const double> w, double t, std::span<const double> d)
{
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = w[i] + t * d[i];
    return out;
}

} // namespace

void OptimizerConfig::validate() const
{
    if (!(eps > 0.0))
        throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0))
        throw Error(ErrorCode::InvalidArgument, "Wolfe constants need 0 < c1 < c2 < 1");
    if (memory < 1 || max_iters < 1 || max_linesearch < 1)
        throw Error(ErrorCode::InvalidArgument, "memory and iteration limits must be positive");
    if (!(initial_step > 0.0))
        throw Error(ErrorCode::InvalidArgument, "initial step must be positive");
}

const char* to_string(OptimStatus status) noexcept
{
    switch (status) {
    case OptimStatus::Converged: return "Converged";
    case OptimStatus::MaxIters: return "MaxIters";
    case OptimStatus::LineSearchFailed: return "LineSearchFailed";
    }
    return "Unknown";
}

std::vector<double> two_loop_direction(std::span<const CurvaturePair> history,
                                       std::span<const double> grad)
{
    std::vector<double> q(grad.begin(), grad.end());
    std::vector<double> alpha(history.size(), 0.0);
    std::vector<double> rho(history.size(), 0.0);

    double gamma = 1.0;
    bool have_scale = false;
    for (std::size_t k = history.size(); k-- > 0;) {
        auto const& p = history[k];
        if (p.dw.size() != grad.size() || p.dgrad.size() != grad.size())
            throw Error(ErrorCode::DimensionMismatch, "history pair has the wrong dimension");
        double const sy = dot(p.dw, p.dgrad);
        if (!(sy > 0.0))
            continue;
        rho[k] = 1.0 / sy;
        alpha[k] = rho[k] * dot(p.dw, q);
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] -= alpha[k] * p.dgrad[i];
        if (!have_scale) {
            gamma = sy / dot(p.dgrad, p.dgrad);
            have_scale = true;
        }
    }
    for (double& v : q)
        v *= gamma;
    for (std::size_t k = 0; k < history.size(); ++k) {
        if (rho[k] == 0.0)
            continue;
        auto const& p = history[k];
        double const beta = rho[k] * dot(p.dgrad, q);
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] += (alpha[k] - beta) * p.dw[i];
    }
    for (double& v : q)
        v = -v;
    return q;
}

LineSearchResult wolfe_line_search(const Objective& objective, std::span<const double> w,
                                   const ObjectiveEvaluation& at_w,
                                   std::span<const double> direction, const OptimizerConfig& cfg)
{
    LineSearchResult res;
    double const f0 = at_w.value;
    double const slope0 = dot(at_w.gradient, direction);
    if (!(slope0 < 0.0))
        return res;

    double lo = 0.0, f_lo = f0, slope_lo = slope0;
    double hi = std::numeric_limits<double>::infinity(), f_hi = 0.0;
    double t = cfg.initial_step;

    for (int trial = 0; trial < cfg.max_linesearch; ++trial) {
        std::vector<double> wt = axpy(w, t, direction);
        ObjectiveEvaluation ev = objective(wt);
        ++res.evaluations;
        double const slope = dot(ev.gradient, direction);

        if (!std::isfinite(ev.value) || ev.value > f0 + cfg.c1 * t * slope0) {
            hi = t;
            f_hi = ev.value;
        } else if (slope < cfg.c2 * slope0) {
            lo = t;
            f_lo = ev.value;
            slope_lo = slope;
        } else {
            res.accepted = true;
            res.step = t;
            res.w = std::move(wt);
            res.eval = std::move(ev);
            return res;
        }

        if (!std::isfinite(hi)) {
            t *= 2.0;
            continue;
        }
        // Minimizer of the quadratic through (lo, f_lo, slope_lo) and (hi, f_hi),
        // kept away from the interval ends.
        double const width = hi - lo;
        double next = lo + 0.5 * width;
        if (std::isfinite(f_hi)) {
            double const curv = (f_hi - f_lo - slope_lo * width) / (width * width);
            if (curv > 0.0)
                next = lo - slope_lo / (2.0 * curv);
        }
        t = std::clamp(next, lo + 0.1 * width, hi - 0.1 * width);
    }
    return res;
}

OptimResult minimize(const Objective& objective, std::span<const double> w0,
                     const OptimizerConfig& cfg)
{
    cfg.validate();
    OptimResult result;
    result.w.assign(w0.begin(), w0.end());
    ObjectiveEvaluation current = objective(result.w);
    result.evaluations = 1;
    if (current.gradient.size() != result.w.size())
        throw Error(ErrorCode::DimensionMismatch, "objective gradient has the wrong dimension");
    result.phi_trace.push_back(current.value);
    result.initial_grad_l1 = grad_l1_norm(current);
    result.final_grad_l1 = result.initial_grad_l1;

    std::deque<CurvaturePair> history;
    while (true) {
        if (result.final_grad_l1 <= cfg.eps) {
            result.status = OptimStatus::Converged;
            break;
        }
        if (result.iterations >= cfg.max_iters) {
            result.status = OptimStatus::MaxIters;
            break;
        }

        std::vector<CurvaturePair> const pairs(history.begin(), history.end());
        std::vector<double> direction = two_loop_direction(pairs, current.gradient);
        if (!(dot(direction, current.gradient) < 0.0)) {
            history.clear();
            direction = two_loop_direction({}, current.gradient);
        }
        LineSearchResult ls = wolfe_line_search(objective, result.w, current, direction, cfg);
        result.evaluations += ls.evaluations;
        if (!ls.accepted && !history.empty()) {
            // Stale curvature information; retry along the steepest descent direction.
            history.clear();
            direction = two_loop_direction({}, current.gradient);
            int const spent = ls.evaluations;
            ls = wolfe_line_search(objective, result.w, current, direction, cfg);
            result.evaluations += ls.evaluations;
            ls.evaluations += spent;
        }
        if (!ls.accepted) {
            result.status = OptimStatus::LineSearchFailed;
            break;
        }

        StepRecord rec;
        rec.iter = result.iterations + 1;
        rec.phi_before = current.value;
        rec.slope_before = dot(current.gradient, direction);
        rec.step = ls.step;
        rec.phi_after = ls.eval.value;
        rec.slope_after = dot(ls.eval.gradient, direction);
        rec.grad_l1_after = grad_l1_norm(ls.eval);
        rec.n_evals = ls.evaluations;
        result.steps.push_back(rec);

        CurvaturePair pair;
        pair.dw.resize(result.w.size());
        pair.dgrad.resize(result.w.size());
        for (std::size_t i = 0; i < result.w.size(); ++i) {
            pair.dw[i] = ls.w[i] - result.w[i];
            pair.dgrad[i] = ls.eval.gradient[i] - current.gradient[i];
        }
        if (usable(pair)) {
            history.push_back(std::move(pair));
            if (history.size() > static_cast<std::size_t>(cfg.memory))
                history.pop_front();
        }

        result.w = std::move(ls.w);
        current = std::move(ls.eval);
        ++result.iterations;
        result.phi_trace.push_back(current.value);
        result.final_grad_l1 = rec.grad_l1_after;
    }
    return result;
}

void write_trace_csv(std::ostream& out, const OptimResult& result, int level, bool header)
{
    auto const precision = out.precision(17);
    if (header)
        out << "level,iter,phi,grad_l1,step,n_evals\n";
    if (!result.phi_trace.empty())
        out << level << ",0," << result.phi_trace.front() << ',' << result.initial_grad_l1
            << ",0,1\n";
    for (auto const& s : result.steps)
        out << level << ',' << s.iter << ',' << s.phi_after << ',' << s.grad_l1_after << ','
            << s.step << ',' << s.n_evals << '\n';
    out.precision(precision);
}

} // namespace semidot
