#include "intphase/quadrature.hpp"

#include <cmath>

namespace intphase {

namespace {

// 15-point Kronrod nodes on [-1, 1] (positive half) and weights; the embedded
// 7-point Gauss rule uses the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double kronrod;
    double gauss;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double fc = f(mid);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        resk += fsum * kWgk[i];
        if (i % 2 == 1) resg += fsum * kWg[i / 2];
    }
    return {resk * h, resg * h};
}

struct Accum {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
    bool ok = true;
};

void refine(const std::function<double(double)>& f, double a, double b,
            double rel_tol, double abs_tol, int depth, long max_evals, Accum& acc) {
    const Panel p = gk15(f, a, b);
    acc.evals += 15;
    const double err = std::abs(p.kronrod - p.gauss);
    const double goal = std::max(abs_tol, rel_tol * std::abs(p.kronrod));
    if (err <= goal || depth <= 0 || acc.evals >= max_evals) {
        acc.value += p.kronrod;
        acc.error += err;
        if (err > goal) acc.ok = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    refine(f, a, mid, rel_tol, 0.5 * abs_tol, depth - 1, max_evals, acc);
    refine(f, mid, b, rel_tol, 0.5 * abs_tol, depth - 1, max_evals, acc);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int max_depth,
                              bool throw_on_failure, long max_evals) {
    if (!(rel_tol > 0.0) && !(abs_tol > 0.0))
        throw ValidationError("quadrature: need a positive tolerance");
    if (a == b) return {0.0, 0.0, 0, true};
    Accum acc;
    refine(f, a, b, rel_tol, abs_tol, max_depth, max_evals, acc);
    if (!acc.ok && throw_on_failure)
        throw NumericalError("quadrature: adaptive refinement did not converge");
    return {acc.value, acc.error, acc.evals, acc.ok};
}

}  // namespace intphase
