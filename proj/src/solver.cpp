#include "vref/solver.hpp"

#include <algorithm>
#include <cmath>

#include "vref/errors.hpp"

namespace vref {

ScalarRoot solve_bracketed(const ScalarResidual& f, double lo, double hi, double seed,
                           const SolverSettings& settings, const std::string& label) {
    ResidualEval elo = f(lo);
    ResidualEval ehi = f(hi);

    if (elo.f == 0.0) return {lo, elo.rel, 0};
    if (ehi.f == 0.0) return {hi, ehi.rel, 0};
    if (std::signbit(elo.f) == std::signbit(ehi.f))
        throw ConvergenceError(label, lo, elo.rel,
                               "no sign change over bracket [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");

    const bool rising = ehi.f > 0.0;  // sign convention of the bracket
    double x = std::clamp(seed, lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo));
    if (!std::isfinite(x)) x = 0.5 * (lo + hi);
    double last_dx = hi - lo;
    ResidualEval e{};

    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        e = f(x);
        if (e.f == 0.0) return {x, e.rel, iter};
        if ((e.f > 0.0) == rising)
            hi = x;
        else
            lo = x;

        if (e.rel <= settings.tol_rel_i && last_dx <= settings.tol_v) return {x, e.rel, iter};
        if (settings.bisection_only && (hi - lo) <= settings.tol_v)
            return {0.5 * (lo + hi), e.rel, iter};

        double cand;
        if (settings.bisection_only || !std::isfinite(e.step)) {
            cand = 0.5 * (lo + hi);
        } else {
            cand = x + e.step;
            if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        }
        last_dx = std::fabs(cand - x);
        x = cand;
    }
    throw ConvergenceError(label, x, e.rel, "max_iter exceeded");
}

}  // namespace vref
