#pragma once

#include <functional>
#include <string>

namespace vref {

struct SolverSettings {
    double tol_v = 1e-7;       // voltage tolerance, V (0.1 uV)
    double tol_rel_i = 1e-9;   // relative KCL residual tolerance
    int max_iter = 100;
    bool bisection_only = false;  // disable Newton refinement (for cross-checks)
};

/// One evaluation of a scalar KCL residual.
struct ResidualEval {
    double f = 0.0;     // signed residual, used for bracketing
    double rel = 0.0;   // |f| / max branch-current magnitude
    double step = 0.0;  // proposed Newton displacement
};

using ScalarResidual = std::function<ResidualEval(double)>;

struct ScalarRoot {
    double x = 0.0;
    double rel = 0.0;  // residual at x
    int iterations = 0;
};

/// Root of a monotone residual on [lo, hi]. The bracket must show a sign
/// change; Newton steps that leave the current bracket fall back to
/// bisection. Throws ConvergenceError if no sign change exists or the
/// iteration budget runs out.
ScalarRoot solve_bracketed(const ScalarResidual& f, double lo, double hi, double seed,
                           const SolverSettings& settings, const std::string& label);

}  // namespace vref
