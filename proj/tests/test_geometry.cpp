#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "intphase/constants.hpp"
#include "intphase/errors.hpp"
#include "intphase/geometry.hpp"
#include "intphase/model.hpp"
#include "intphase/phase.hpp"

using namespace intphase;

namespace {
const AtomSpecies sr = sr88_species(nullptr);
const LabEnvironment env = make_environment(9.81);
const ViolationModel viol = violation_from_alpha(1e-3, sr);
}  // namespace

TEST_CASE("geometry names round-trip") {
    const std::vector<std::string> names{
        "clock_static",        "clock_free_fall",          "clock_guided",
        "ai_mach_zehnder",     "ai_levitated",             "ai_doubly_differential",
        "ai_symmetric_transitions", "ai_guided",           "custom"};
    for (const std::string& name : names) {
        const auto kind = geometry_kind_from_string(name);
        REQUIRE(kind.has_value());
        CHECK(to_string(*kind) == name);
    }
    CHECK_FALSE(geometry_kind_from_string("ramsey").has_value());
}

TEST_CASE("static clock sits at the sagged equilibrium") {
    const GeometrySpec spec =
        build_clock_static(sr, viol, env, make_trap(kTwoPi * 100.0), 1.0, 1.0);
    const double sag = 2.484902028828334e-5;
    CHECK(spec.upper.z0 == doctest::Approx(1.0 - sag).epsilon(1e-12));
    CHECK(spec.lower.z0 == doctest::Approx(-sag).epsilon(1e-10));
    CHECK(spec.upper.traps.size() == 1);
    CHECK(spec.upper.traps[0].center.eval(0.5) == 1.0);
    CHECK(spec.lower.traps[0].center.eval(0.5) == 0.0);
    CHECK(spec.mode == MeasurementMode::clock_differential);
    CHECK(spec.reference_separation == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Mach-Zehnder pulse layout") {
    const double k = 1.54586e7, T = 0.1;
    const GeometrySpec spec = build_ai_mach_zehnder(sr, viol, env, k, T);
    REQUIRE(spec.upper.kicks.size() == 2);
    REQUIRE(spec.lower.kicks.size() == 2);
    CHECK(spec.upper.kicks[0].t == 0.0);
    CHECK(spec.upper.kicks[1].t == T);
    CHECK(spec.lower.kicks[0].t == T);
    CHECK(spec.lower.kicks[1].t == 2.0 * T);
    CHECK(spec.upper.kicks[0].dp == doctest::Approx(kHbar * k).epsilon(1e-15));
    CHECK(spec.upper.kicks[1].dp == doctest::Approx(-kHbar * k).epsilon(1e-15));
    CHECK(spec.t_final == 2.0 * T);
    CHECK(spec.mode == MeasurementMode::state_differential);
    CHECK(spec.reference_separation ==
          doctest::Approx(1.116813565454189e-3).epsilon(1e-12));

    const ClosureReport closure = closure_check(spec);
    CHECK(closure.applicable);
    CHECK(closure.closed);
}

TEST_CASE("tampered final pulse leaves the interferometer open") {
    GeometrySpec spec = build_ai_mach_zehnder(sr, viol, env, 1.54586e7, 0.1);
    spec.lower.kicks[1].dp *= 0.9;
    const ClosureReport closure = closure_check(spec);
    CHECK(closure.applicable);
    CHECK_FALSE(closure.closed);
    CHECK(std::abs(closure.dv_final) ==
          doctest::Approx(0.1 * kHbar * 1.54586e7 / sr.mass).epsilon(1e-9));

    const PhaseResult phases = compute_phases(spec);
    CHECK(has_warning(phases.warnings, "open_interferometer"));
}

TEST_CASE("levitated with one period and no relaunch reduces to Mach-Zehnder") {
    const double T = 4.5e-3;
    const double k = 0.02 * sr.mass / (kHbar * T);
    const GeometrySpec lev = build_ai_levitated(sr, viol, env, k, T, 1, 0.0);
    const GeometrySpec mz = build_ai_mach_zehnder(sr, viol, env, k, T);
    CHECK(lev.t_final == mz.t_final);
    CHECK(phase_dynamical_differential(lev) ==
          doctest::Approx(phase_dynamical_differential(mz)).epsilon(1e-12));
}

TEST_CASE("levitated relaunch cadence") {
    const double T = 4.5e-3;
    const double k = 0.02 * sr.mass / (kHbar * T);
    const int n = 3;
    const GeometrySpec spec = build_ai_levitated(sr, viol, env, k, T, n, 9.81);
    CHECK(spec.t_final == doctest::Approx((n + 1) * T).epsilon(1e-15));
    CHECK(spec.mimic_accel.has_value());
    CHECK(*spec.mimic_accel == 9.81);

    // n common relaunch kicks of momentum m a T, merged with the beam
    // splitters where they coincide.
    double upper_relaunch = 0.0;
    for (const Kick& kick : spec.upper.kicks)
        if (kick.tag == KickTag::relaunch) upper_relaunch += 1.0;
    CHECK(upper_relaunch > 0.0);

    const ClosureReport closure = closure_check(spec);
    CHECK(closure.closed);

    Warnings w;
    build_ai_levitated(sr, viol, env, k, T, n, 9.81, 0.5 * T, &w);
    CHECK(has_warning(w, "relaunch_offset"));
    CHECK_THROWS_AS(build_ai_levitated(sr, viol, env, k, T, 0, 9.81), ValidationError);
    CHECK_THROWS_AS(build_ai_levitated(sr, viol, env, k, T, n, -1.0), ValidationError);
}

TEST_CASE("doubly differential flips sit inside the hold window") {
    const double T = 0.1, Th = 1.5, t1 = 0.3, t2 = 1.3;
    const double k = 0.01 * sr.mass / (kHbar * T);
    const GeometrySpec spec =
        build_ai_doubly_differential(sr, viol, env, k, T, Th, t1, t2);
    CHECK(spec.doubly_differential);
    REQUIRE(spec.flip_t1.has_value());
    REQUIRE(spec.flip_t2.has_value());
    CHECK(*spec.flip_t1 == t1);
    CHECK(*spec.flip_t2 == t2);
    CHECK(spec.primary.flip_times == std::vector<double>{t1});
    CHECK(spec.reference.flip_times == std::vector<double>{t2});
    CHECK(spec.primary.at(t1 - 1e-6) != spec.primary.at(t1 + 1e-6));

    CHECK_THROWS_AS(build_ai_doubly_differential(sr, viol, env, k, T, Th, 1.3, 0.3),
                    ValidationError);
}

TEST_CASE("symmetric scheme swaps sign with the initial state") {
    const double k = 1.54586e7, T = 0.5, Th = 2.0;
    const GeometrySpec a = build_ai_symmetric_transitions(sr, viol, env, k, T, Th, 'a');
    const GeometrySpec b = build_ai_symmetric_transitions(sr, viol, env, k, T, Th, 'b');
    CHECK(a.primary.lambda0 == -b.primary.lambda0);
    const double phi_a = phase_dynamical_differential(a);
    const double phi_b = phase_dynamical_differential(b);
    CHECK(phi_a == doctest::Approx(-phi_b).epsilon(1e-9));
    CHECK(a.red_multiplier == 2.0);
}

TEST_CASE("lambda programs flip left-closed") {
    LambdaProgram p{+1, {0.4, 0.7}};
    CHECK(p.at(0.0) == 1);
    CHECK(p.at(0.4) == -1);
    CHECK(p.at(0.69) == -1);
    CHECK(p.at(0.7) == 1);
    const auto jumps = p.jumps_in(0.0, 0.7);
    REQUIRE(jumps.size() == 1);  // [a, b) excludes the flip at 0.7
    CHECK(jumps[0].first == 0.4);
    CHECK(jumps[0].second == -2);

    LambdaProgram bad{+1, {0.7, 0.4}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
