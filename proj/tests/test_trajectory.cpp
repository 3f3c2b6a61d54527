#include "doctest.h"

#include <cmath>
#include <vector>

#include "intphase/constants.hpp"
#include "intphase/errors.hpp"
#include "intphase/geometry.hpp"
#include "intphase/model.hpp"
#include "intphase/trajectory.hpp"

using namespace intphase;

namespace {

const AtomSpecies sr = sr88_species(nullptr);

void check_segment_continuity(const BranchTrajectory& traj, double scale) {
    for (std::size_t i = 0; i + 1 < traj.segments.size(); ++i) {
        const Segment& a = traj.segments[i];
        const Segment& b = traj.segments[i + 1];
        CHECK(std::abs(a.z(a.t1) - b.z(b.t0)) <= 1e-12 * scale);
    }
}

}  // namespace

TEST_CASE("ballistic flight with momentum kicks") {
    const double dp = 2e-27;
    std::vector<Kick> kicks{{0.4, dp, 0.0, 0.0, KickTag::beam_splitter}};
    const BranchTrajectory traj = solve_ballistic(0.1, 0.2, kicks, sr.mass, 9.81, 1.0);

    CHECK(traj.z(0.3) ==
          doctest::Approx(0.1 + 0.2 * 0.3 - 0.5 * 9.81 * 0.09).epsilon(1e-13));
    const double v_pre = 0.2 - 9.81 * 0.4;
    CHECK(traj.v(0.4) == doctest::Approx(v_pre + dp / sr.mass).epsilon(1e-13));
    CHECK(traj.z(1.0) == doctest::Approx(0.1 + 0.2 - 0.5 * 9.81 +
                                         (dp / sr.mass) * 0.6).epsilon(1e-13));
    CHECK(traj.v_pre_final() == traj.v_end);  // no kick at t_final
}

TEST_CASE("kick exactly at t_final changes v_end only") {
    std::vector<Kick> kicks{{1.0, 3e-27, 0.0, 0.0, KickTag::beam_splitter}};
    const BranchTrajectory traj = solve_ballistic(0.0, 0.0, kicks, sr.mass, 9.81, 1.0);
    CHECK(traj.v_end == doctest::Approx(traj.v_pre_final() + 3e-27 / sr.mass).epsilon(1e-13));
    CHECK(traj.z_end == doctest::Approx(-0.5 * 9.81).epsilon(1e-13));
}

TEST_CASE("velocity kicks apply as-is") {
    std::vector<Kick> kicks{{0.5, 0.0, 0.25, 0.0, KickTag::velocity_transfer}};
    const BranchTrajectory traj = solve_ballistic(0.0, 0.0, kicks, sr.mass, 0.0, 1.0);
    CHECK(traj.v(0.6) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("constant-center trap matches the harmonic closed form") {
    const double gamma = 40.0, g = 9.81, zc = 0.3, z0 = 0.31, v0 = 0.02;
    const PiecewisePoly center = pw_constant(zc, 0.0, 2.0);
    const BranchTrajectory traj = solve_trap_exact(z0, v0, center, gamma, g, 2.0);
    const double sag = g / (gamma * gamma);
    for (double t : {0.0, 0.3, 0.7, 1.4, 2.0}) {
        const double expect = zc - sag + (z0 - zc + sag) * std::cos(gamma * t) +
                              (v0 / gamma) * std::sin(gamma * t);
        CHECK(traj.z(t) == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("order-3 expansion solves cubic center ramps exactly") {
    const PiecewisePoly cubic{{0.0, 1.0}, {Poly{0.0, 0.0, 0.0, 0.01}}};
    const double gamma = 5.0, g = 9.81;
    const double sag = g / (gamma * gamma);
    const BranchTrajectory exact = solve_trap_exact(-sag, 0.0, cubic, gamma, g, 1.0);
    const BranchTrajectory expanded = solve_trap_expansion(cubic, gamma, g, 1.0, 3);
    for (int i = 0; i <= 200; ++i) {
        const double t = i / 200.0;
        CHECK(std::abs(exact.z(t) - expanded.z(t)) <= 1e-12 * std::max(0.01, sag));
    }
}

TEST_CASE("branch difference is bitwise independent of gravity") {
    const ViolationModel none{};
    const GeometrySpec spec = build_ai_mach_zehnder(sr, none, make_environment(9.81),
                                                    1.54586e7, 0.1);
    const PairKinematics at_g =
        make_pair_kinematics(spec.upper, spec.lower, sr.mass, 9.81, 0.0, spec.t_final);
    const PairKinematics at_zero =
        make_pair_kinematics(spec.upper, spec.lower, sr.mass, 0.0, 0.0, spec.t_final);
    for (int i = 0; i <= 100; ++i) {
        const double t = spec.t_final * i / 100.0;
        CHECK(at_g.diff.z(t) == at_zero.diff.z(t));
        CHECK(at_g.diff.v(t) == at_zero.diff.v(t));
    }
}

TEST_CASE("mean and difference reconstruct the branches") {
    const ViolationModel none{};
    const GeometrySpec spec = build_ai_mach_zehnder(sr, none, make_environment(9.81),
                                                    1.54586e7, 0.1);
    const PairKinematics pair =
        make_pair_kinematics(spec.upper, spec.lower, sr.mass, 9.81, 0.0, spec.t_final);
    for (int i = 0; i <= 100; ++i) {
        const double t = spec.t_final * i / 100.0;
        const double rebuilt = pair.mean.z(t) + 0.5 * pair.diff.z(t);
        CHECK(rebuilt == doctest::Approx(pair.upper.z(t)).epsilon(1e-11));
    }
}

TEST_CASE("guided pair is continuous across trap segments") {
    const GeometrySpec spec =
        build_clock_guided(sr, ViolationModel{}, make_environment(9.81),
                           make_trap(kTwoPi * 50.0), 0.005, 1.0, 10.0);
    const BranchTrajectory upper =
        propagate_branch(spec.upper, sr.mass, 9.81, kTwoPi * 50.0, spec.t_final);
    check_segment_continuity(upper, 0.1);
}

TEST_CASE("position integral of a falling branch") {
    const BranchTrajectory traj = solve_ballistic(1.0, 0.0, {}, sr.mass, 9.81, 1.0);
    CHECK(integrate_position(traj, 0.0, 1.0) ==
          doctest::Approx(1.0 - 9.81 / 6.0).epsilon(1e-13));
    CHECK(integrate_position(traj, 0.25, 0.75) ==
          doctest::Approx(0.5 - 9.81 / 6.0 * (0.421875 - 0.015625)).epsilon(1e-12));
}

TEST_CASE("program validation") {
    BranchProgram p;
    p.kicks.push_back(Kick{1.5, 1e-27});
    CHECK_THROWS_AS(p.validate(1.0), ValidationError);

    BranchProgram q;
    q.traps.push_back(TrapWindow{0.0, 0.6, pw_constant(0.0, 0.0, 0.6)});
    q.traps.push_back(TrapWindow{0.5, 1.0, pw_constant(0.0, 0.5, 1.0)});
    CHECK_THROWS_AS(q.validate(1.0), ValidationError);

    BranchProgram r;
    r.traps.push_back(TrapWindow{0.2, 0.8, pw_constant(0.0, 0.3, 0.8)});
    CHECK_THROWS_AS(r.validate(1.0), ValidationError);  // center misses the window

    BranchProgram ok;
    ok.kicks.push_back(Kick{0.2, 1e-27});
    ok.traps.push_back(TrapWindow{0.4, 0.9, pw_constant(0.0, 0.4, 0.9)});
    CHECK_NOTHROW(ok.validate(1.0));
}

TEST_CASE("coincident kicks require coalescing") {
    BranchProgram p;
    p.kicks.push_back(Kick{0.5, 1e-27});
    p.kicks.push_back(Kick{0.5, 2e-27});
    CHECK_THROWS_AS(p.validate(1.0), ValidationError);
    p.coalesce_kicks = true;
    CHECK_NOTHROW(p.validate(1.0));
    const BranchTrajectory traj = propagate_branch(p, sr.mass, 0.0, 0.0, 1.0);
    CHECK(traj.v_end == doctest::Approx(3e-27 / sr.mass).epsilon(1e-13));
}
