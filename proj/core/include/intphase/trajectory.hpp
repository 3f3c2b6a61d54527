#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "intphase/model.hpp"
#include "intphase/piecewise.hpp"
#include "intphase/trigpoly.hpp"

namespace intphase {

enum class KickTag { beam_splitter, relaunch, velocity_transfer };

// Instantaneous momentum/velocity transfer at time t. dp is divided by the
// mean mass; dv is applied as-is. laser_phase enters the laser phase ledger.
struct Kick {
    double t = 0.0;
    double dp = 0.0;           // [kg m/s]
    double dv = 0.0;           // [m/s]
    double laser_phase = 0.0;  // [rad]
    KickTag tag = KickTag::beam_splitter;
};

// Harmonic confinement over [t_on, t_off] around a piecewise-polynomial
// center; outside every window the motion is ballistic.
struct TrapWindow {
    double t_on = 0.0;
    double t_off = 0.0;
    PiecewisePoly center;
};

// Complete single-branch control sequence.
struct BranchProgram {
    double z0 = 0.0;
    double v0 = 0.0;
    std::vector<Kick> kicks;        // sorted by time
    std::vector<TrapWindow> traps;  // sorted, disjoint
    bool coalesce_kicks = false;    // sum coincident kicks instead of rejecting

    void validate(double t_final) const;
};

// One interval of the exact solution:
//   z(tau) = pos(tau) + A cos(w tau) + B sin(w tau),  tau = t - t0
// with w = 0 (ballistic, A = B = 0) or w = gamma (trapped). center is the
// trap center re-anchored to tau for offset forms.
struct Segment {
    double t0 = 0.0, t1 = 0.0;
    Poly pos;
    double w = 0.0;
    double A = 0.0, B = 0.0;
    Poly center;
    bool trapped = false;

    double z(double t) const;
    double v(double t) const;

    TrigPoly position_form() const;
    TrigPoly velocity_form() const;
    // z - zeta; requires trapped.
    TrigPoly offset_form() const;
    // zeta itself (trapped segments).
    TrigPoly center_form() const;
};

struct BranchTrajectory {
    std::vector<Segment> segments;
    double t_final = 0.0;
    double z_end = 0.0;
    double v_end = 0.0;  // after any kick placed exactly at t_final

    // Segment lookup is O(log S).
    std::size_t segment_index(double t) const;
    double z(double t) const;
    // Right-limit velocity except at t_final, where the post-kick value is
    // returned; v_pre(t_final) gives the last in-flight value.
    double v(double t) const;
    double v_pre_final() const;
};

// Exact propagation of a branch program. gamma must be positive when the
// program has trap windows. Kicks are left-closed: a kick at time t shapes
// the segment starting at t.
BranchTrajectory propagate_branch(const BranchProgram& program, double mass, double g,
                                  double gamma, double t_final);

// Free flight with momentum kicks.
BranchTrajectory solve_ballistic(double z0, double v0, const std::vector<Kick>& kicks,
                                 double mass, double g, double t_final);

// Full-window confinement; initial conditions (z0, v0) at t = 0.
BranchTrajectory solve_trap_exact(double z0, double v0, const PiecewisePoly& center,
                                  double gamma, double g, double t_final);

// Adiabatic large-gamma expansion of full-window confinement, truncated at
// 1/gamma^order with order <= 3:
//   z = zeta - [g + zeta''(t) - zeta''(0) cos(gamma t)]/gamma^2
//       + zeta'''(0) sin(gamma t)/gamma^3
BranchTrajectory solve_trap_expansion(const PiecewisePoly& center, double gamma, double g,
                                      double t_final, int order);

// Mean/difference kinematics of a branch pair. The difference coordinate
// dz = z_u - z_l obeys dz'' = dF/m - gamma^2 (dz - dzeta): g drops out, so
// dz is propagated in a g-free program and is bitwise independent of g.
struct PairKinematics {
    BranchTrajectory mean;  // zbar = (z_u + z_l)/2
    BranchTrajectory diff;  // dz = z_u - z_l
    BranchTrajectory upper;
    BranchTrajectory lower;
};

PairKinematics make_pair_kinematics(const BranchProgram& upper, const BranchProgram& lower,
                                    double mass, double g, double gamma, double t_final);

// Exact integral of dz over [a, b].
double integrate_position(const BranchTrajectory& traj, double a, double b);

}  // namespace intphase
