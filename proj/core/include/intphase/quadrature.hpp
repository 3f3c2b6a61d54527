#pragma once

#include <functional>

#include "intphase/errors.hpp"

namespace intphase {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod 7/15 with bisection. Converges when the panel error
// satisfies err <= max(abs_tol, rel_tol*|panel|); refinement stops once a
// branch reaches max_depth or the call has spent max_evals evaluations, and
// throws NumericalError only if a panel is left unconverged with
// throw_on_failure set.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol = 0.0, int max_depth = 48,
                              bool throw_on_failure = false, long max_evals = 5000);

}  // namespace intphase
