#include "doctest.h"

#include <cmath>

#include "intphase/constants.hpp"
#include "intphase/errors.hpp"
#include "intphase/geometry.hpp"
#include "intphase/model.hpp"
#include "intphase/oracle.hpp"
#include "intphase/phase.hpp"

using namespace intphase;

namespace {
const AtomSpecies sr = sr88_species(nullptr);
const LabEnvironment env = make_environment(9.81);
}  // namespace

TEST_CASE("static clock differential and breakdown") {
    const ViolationModel viol = violation_from_alpha(0.0, sr);
    const GeometrySpec spec =
        build_clock_static(sr, viol, env, make_trap(kTwoPi * 100.0), 1.0, 1.0);
    const PhaseResult res = compute_phases(spec);

    CHECK(res.differential == doctest::Approx(-0.29421496709011385).epsilon(1e-12));
    CHECK(differential_phase(res) == res.differential);
    CHECK(res.primary.dyn_internal == doctest::Approx(-sr.omega()).epsilon(1e-14));
    CHECK(res.reference.dyn_internal == res.primary.dyn_internal);
    CHECK(res.redshift_area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.delta_tau == doctest::Approx(1.0915097049885998e-16).epsilon(1e-12));
    CHECK(res.virial_residual <= 1e-9 * res.virial_scale);
    CHECK(res.phi0 == 0.0);
}

TEST_CASE("proper time of a falling branch") {
    const BranchTrajectory traj = solve_ballistic(1.0, 0.0, {}, sr.mass, 9.81, 1.0);
    const ProperTime tau = proper_time(traj, 0.0, 1.0, 9.81);
    CHECK(tau.lab == doctest::Approx(1.0).epsilon(1e-15));
    const double expect = (9.81 - 9.81 * 9.81 / 3.0) / kCSquared;
    CHECK(tau.correction == doctest::Approx(expect).epsilon(1e-12));
    CHECK(tau.total() == doctest::Approx(1.0 + expect).epsilon(1e-15));
}

TEST_CASE("Mach-Zehnder routes agree") {
    const double k = 1.54586e7, T = 0.1;
    const ViolationModel viol{5e-10, 1.5e-9};
    const GeometrySpec spec = build_ai_mach_zehnder(sr, viol, env, k, T);
    const PhaseResult res = compute_phases(spec);
    const double kgT2 = k * 9.81 * T * T;

    CHECK(res.phi0 == doctest::Approx(-kgT2).epsilon(1e-9));
    CHECK(unperturbed_phase(spec) == res.phi0);
    CHECK(res.differential == doctest::Approx(-viol.dbeta() * kgT2).epsilon(1e-9));
    CHECK(res.primary.phi0 == res.phi0);
    CHECK(res.primary.dyn_internal == 0.0);
    CHECK(res.primary.total() ==
          doctest::Approx(res.phi0 - viol.beta_b * kgT2).epsilon(1e-9));
    CHECK(res.closure.closed);
    CHECK(res.virial_residual <= 1e-9 * res.virial_scale);

    const PartialIntegration partial = phase_partial_integration(spec);
    CHECK(partial.total() == doctest::Approx(res.differential).epsilon(1e-9));
    CHECK(wavepacket_phase_interferometer(spec) == 0.0);
}

TEST_CASE("guided clock adaptive quadrature matches the closed form route") {
    const ViolationModel viol = violation_from_alpha(1e-3, sr);
    const GeometrySpec spec = build_clock_guided(sr, viol, env, make_trap(kTwoPi * 50.0),
                                                 0.005, 1.0, 10.0);
    const double closed = phase_dynamical_differential(spec);
    EvalOptions adaptive;
    adaptive.quadrature = QuadMode::adaptive;
    adaptive.quad_tol = 1e-13;
    CHECK(phase_dynamical_differential(spec, adaptive) ==
          doctest::Approx(closed).epsilon(1e-10));

    // Below the roundoff floor of the panel estimates the refinement cannot
    // converge; that must surface as an error, not as an unconverged value.
    adaptive.quad_tol = 1e-30;
    CHECK_THROWS_AS(phase_dynamical_differential(spec, adaptive), NumericalError);
}

TEST_CASE("differential is linear in alpha") {
    const GeometrySpec base = build_clock_static(sr, violation_from_alpha(0.0, sr), env,
                                                 make_trap(kTwoPi * 100.0), 1.0, 1.0);
    auto phi_at = [&](double alpha) {
        GeometrySpec s = base;
        s.violation = violation_from_alpha(alpha, sr);
        return phase_dynamical_differential(s);
    };
    const double lo = phi_at(-1e-3), mid = phi_at(0.0), hi = phi_at(1e-3);
    CHECK(std::abs(hi - 2.0 * mid + lo) <= 1e-10 * std::abs(mid));
    CHECK(hi / mid == doctest::Approx(1.0 + 1e-3).epsilon(1e-12));
}

TEST_CASE("ODE oracle agrees on free fall") {
    const ViolationModel viol = violation_from_alpha(1e-3, sr);
    const GeometrySpec spec = build_clock_free_fall(sr, viol, env, 1.0, 1.0);
    const double direct = phase_dynamical_differential(spec);
    const double ode = differential_phase_ode(spec);
    CHECK(ode == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("released wave packet phase") {
    const double gamma = kTwoPi * 100.0;
    const WavePacketSpec wp = trap_ground_state(sr, gamma);
    const double phi = wavepacket_phase_clock(sr, make_trap(gamma),
                                              ClockWavePacketMode::released, 1.0, wp);
    CHECK(phi == doctest::Approx(3.4035031156556866e-9).epsilon(1e-12));
    CHECK(phi == doctest::Approx(sr.defect_ratio() * gamma / 4.0).epsilon(1e-12));
}

TEST_CASE("differential_phase validates its inputs") {
    PhaseResult res;
    res.primary.dyn_motion = 1.0;
    res.reference.dyn_motion = 0.25;
    res.differential = 0.75;
    CHECK(differential_phase(res) == 0.75);

    PhaseResult wp = res;
    wp.primary.wavepacket = 1e-9;
    CHECK_THROWS_AS(differential_phase(wp), ValidationError);

    PhaseResult phi0 = res;
    phi0.primary.phi0 = 1.0;
    CHECK_THROWS_AS(differential_phase(phi0), ValidationError);

    PhaseResult drift = res;
    drift.differential = 0.76;
    CHECK_THROWS_AS(differential_phase(drift), NumericalError);
}

TEST_CASE("clock wavepacket term cancels in the differential") {
    const ViolationModel viol = violation_from_alpha(1e-3, sr);
    const GeometrySpec spec =
        build_clock_static(sr, viol, env, make_trap(kTwoPi * 100.0, 10.0), 1.0, 1.0);
    EvalOptions with_wp;
    with_wp.wavepacket = trap_ground_state(sr, kTwoPi * 100.0);
    const PhaseResult on = compute_phases(spec, with_wp);
    const PhaseResult off = compute_phases(spec);
    CHECK(on.primary.wavepacket == on.reference.wavepacket);
    CHECK(on.primary.wavepacket != 0.0);
    CHECK(off.primary.wavepacket == 0.0);
    CHECK(differential_phase(on) == differential_phase(off));
}
