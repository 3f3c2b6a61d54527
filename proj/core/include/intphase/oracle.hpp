#pragma once

#include <functional>
#include <vector>

#include "intphase/trajectory.hpp"

namespace intphase {

// Independent cross-check integrator: adaptive embedded Runge-Kutta (Cash-Karp
// 4/5) driven directly by the branch programs, never by the closed-form
// segments. Events (kicks, trap edges, center knots) are hard stop points.
struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    long max_steps = 20000000;
};

struct OdeState {
    double z = 0.0;
    double v = 0.0;
};

// State at t_final, including kicks placed exactly there.
OdeState integrate_branch_ode(const BranchProgram& program, double mass, double g,
                              double gamma, double t_final, const OdeOptions& opts = {});

// States at the requested times (sorted, within [0, t_final]). A time that
// coincides with a kick reports the post-kick velocity.
std::vector<OdeState> sample_branch_ode(const BranchProgram& program, double mass, double g,
                                        double gamma, double t_final,
                                        const std::vector<double>& times,
                                        const OdeOptions& opts = {});

// Scalar density along a simultaneously integrated branch pair.
using PairDensity = std::function<double(double t, double zu, double vu, double zl, double vl)>;

// Integrals of the given densities over [a, b] along the numerical pair.
std::vector<double> integrate_pair_density_ode(const BranchProgram& upper,
                                               const BranchProgram& lower, double mass,
                                               double g, double gamma, double t_final,
                                               double a, double b,
                                               const std::vector<PairDensity>& densities,
                                               const OdeOptions& opts = {});

}  // namespace intphase
