#include "doctest.h"

#include <cmath>

#include "intphase/analysis.hpp"
#include "intphase/constants.hpp"
#include "intphase/errors.hpp"
#include "intphase/geometry.hpp"
#include "intphase/model.hpp"

using namespace intphase;

namespace {
const AtomSpecies sr = sr88_species(nullptr);
const LabEnvironment env = make_environment(9.81);
const ViolationModel alpha3 = violation_from_alpha(1e-3, sr);
}  // namespace

TEST_CASE("closed forms for the catalog") {
    const GeometrySpec stat =
        build_clock_static(sr, alpha3, env, make_trap(kTwoPi * 100.0), 1.0, 1.0);
    const ReferenceValue rs = closed_form_reference(stat);
    REQUIRE(rs.available);
    const double coeff = -(sr.mass_defect + sr.mass * alpha3.dbeta()) / kHbar;
    CHECK(rs.value == doctest::Approx(coeff * 9.81).epsilon(1e-13));
    CHECK(phase_dynamical_differential(stat) == doctest::Approx(rs.value).epsilon(1e-9));

    const GeometrySpec mz = build_ai_mach_zehnder(sr, ViolationModel{5e-10, 1.5e-9}, env,
                                                  1.54586e7, 0.1);
    const ReferenceValue rm = closed_form_reference(mz);
    REQUIRE(rm.available);
    CHECK(rm.value == doctest::Approx(-1e-9 * 1.54586e7 * 9.81 * 0.01).epsilon(1e-13));
    CHECK(!rm.formula.empty());

    GeometrySpec open = mz;
    open.kind = GeometryKind::custom;
    CHECK_FALSE(closed_form_reference(open).available);
}

TEST_CASE("per-state closed forms exist for MZ and the symmetric scheme only") {
    const ViolationModel viol{5e-10, 1.5e-9};
    const GeometrySpec mz = build_ai_mach_zehnder(sr, viol, env, 1.54586e7, 0.1);
    const auto refs = closed_form_state_references(mz);
    REQUIRE(refs.has_value());
    const double kgT2 = 1.54586e7 * 9.81 * 0.01;
    CHECK(refs->first.value == doctest::Approx(-(1.0 + viol.beta_b) * kgT2).epsilon(1e-13));
    CHECK(refs->second.value == doctest::Approx(-(1.0 + viol.beta_a) * kgT2).epsilon(1e-13));

    const GeometrySpec stat =
        build_clock_static(sr, viol, env, make_trap(kTwoPi * 100.0), 1.0, 1.0);
    CHECK_FALSE(closed_form_state_references(stat).has_value());
}

TEST_CASE("classifier identifies the catalog") {
    auto kind_of = [](const GeometrySpec& spec) { return classify_ugr(spec).kind; };

    CHECK(kind_of(build_clock_static(sr, alpha3, env, make_trap(kTwoPi * 100.0), 1.0,
                                     1.0)) == Classification::gold_standard_ugr);
    CHECK(kind_of(build_clock_free_fall(sr, alpha3, env, 1.0, 1.0)) ==
          Classification::gold_standard_ugr);
    CHECK(kind_of(build_clock_guided(sr, alpha3, env, make_trap(kTwoPi * 50.0), 0.005,
                                     1.0, 10.0)) == Classification::gold_standard_ugr);
    CHECK(kind_of(build_ai_mach_zehnder(sr, alpha3, env, 1.54586e7, 0.1)) ==
          Classification::uff_null_test);

    const double T = 4.5e-3;
    const double k = 0.02 * sr.mass / (kHbar * T);
    CHECK(kind_of(build_ai_levitated(sr, alpha3, env, k, T, 50, 9.81)) ==
          Classification::gold_standard_ugr);
    CHECK(kind_of(build_ai_levitated(sr, alpha3, env, k, T, 50, 0.5 * 9.81)) ==
          Classification::accelerational_redshift);
    CHECK(kind_of(build_ai_levitated(sr, alpha3, env, k, T, 50, 0.0)) ==
          Classification::uff_null_test);

    CHECK(kind_of(build_ai_doubly_differential(sr, alpha3, env, k, 0.1, 1.5, 0.3, 1.3)) ==
          Classification::gold_standard_ugr);
}

TEST_CASE("classifier is invariant under parameter rescaling") {
    auto kind_of = [](const GeometrySpec& spec) { return classify_ugr(spec).kind; };
    for (double f : {0.5, 2.0}) {
        CHECK(kind_of(build_ai_mach_zehnder(sr, alpha3, env, f * 1.54586e7, 0.1)) ==
              Classification::uff_null_test);
        CHECK(kind_of(build_ai_mach_zehnder(sr, alpha3, env, 1.54586e7, f * 0.1)) ==
              Classification::uff_null_test);
        CHECK(kind_of(build_clock_static(sr, alpha3, env, make_trap(kTwoPi * 100.0),
                                         f * 1.0, 1.0)) ==
              Classification::gold_standard_ugr);
    }
}

TEST_CASE("classifier handles a species without mass defect") {
    const AtomSpecies flat = make_species(sr.mass, 0.0, "flat");
    const GeometrySpec mz = build_ai_mach_zehnder(flat, ViolationModel{0.0, 1e-12}, env,
                                                  1.54586e7, 0.1);
    const ClassificationResult cls = classify_ugr(mz);
    CHECK_FALSE(cls.alpha_parametrized);
    CHECK(cls.kind == Classification::uff_null_test);
    CHECK(cls.note.find("dbeta") != std::string::npos);
}

TEST_CASE("classifier grid rebuilds through the builders") {
    const GeometrySpec stat =
        build_clock_static(sr, alpha3, env, make_trap(kTwoPi * 100.0), 1.0, 1.0);
    const ClassificationResult cls = classify_ugr(stat);
    REQUIRE(cls.grid.size() == 9);
    CHECK(cls.grid.front().g == doctest::Approx(0.5 * 9.81).epsilon(1e-15));
    CHECK(cls.grid.back().g == doctest::Approx(1.5 * 9.81).epsilon(1e-15));
    CHECK(cls.gold_fits);
    CHECK(cls.scale > 0.0);
    CHECK(cls.floor == doctest::Approx(1e-9 * cls.scale).epsilon(1e-12));
    for (const auto& pt : cls.grid) CHECK(pt.resid_gold <= cls.tol);
}

TEST_CASE("interference signal") {
    CHECK(interference_signal(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(interference_signal(kPi, 1.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(interference_signal(1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(interference_signal(-0.29421496709011385, 1.0) ==
          doctest::Approx(0.9785150439103647).epsilon(1e-12));
    CHECK_THROWS_AS(interference_signal(0.0, 1.5), ValidationError);
    CHECK_THROWS_AS(interference_signal(0.0, -0.1), ValidationError);
}

TEST_CASE("sensitivity projection") {
    SensitivityInputs in;
    in.n_atoms = 1e5;
    in.t_avg = 1e4;
    in.t_cycle = 9.0;
    in.t_red = 9.0;
    in.dz0 = 0.02;
    in.omega = kTwoPi * kSr88TransitionHz;
    in.g = 9.81;
    const SensitivityResult out = sensitivity(in);
    CHECK(out.delta_alpha == doctest::Approx(0.0017913645995218967).epsilon(1e-12));
    CHECK(out.shots == doctest::Approx(1e4 / 9.0).epsilon(1e-15));
    CHECK(out.phase_per_alpha ==
          doctest::Approx(in.omega * 9.81 * 0.02 * 9.0 / kCSquared).epsilon(1e-13));

    SensitivityInputs bad = in;
    bad.n_atoms = 0.0;
    CHECK_THROWS_AS(sensitivity(bad), ValidationError);
}

TEST_CASE("evaluate_geometry bundles phases, reference, oracle, classifier") {
    const GeometrySpec mz = build_ai_mach_zehnder(sr, alpha3, env, 1.54586e7, 0.1);
    AnalysisOptions opts;
    const GeometryResult res = evaluate_geometry(mz, opts);
    CHECK(res.differential == doctest::Approx(res.reference.value).epsilon(1e-9));
    CHECK(res.residual_rel <= 1e-9);
    REQUIRE(res.oracle.has_value());
    CHECK(*res.oracle == doctest::Approx(res.differential).epsilon(1e-6));
    REQUIRE(res.classification.has_value());
    CHECK(res.classification->kind == Classification::uff_null_test);

    AnalysisOptions lean;
    lean.run_oracle = false;
    lean.run_classifier = false;
    const GeometryResult quick = evaluate_geometry(mz, lean);
    CHECK_FALSE(quick.oracle.has_value());
    CHECK_FALSE(quick.classification.has_value());
}

TEST_CASE("doubly differential extras decompose the headline phase") {
    const double T = 0.1;
    const double k = 0.01 * sr.mass / (kHbar * T);
    const GeometrySpec dd =
        build_ai_doubly_differential(sr, alpha3, env, k, T, 1.5, 0.3, 1.3);
    AnalysisOptions lean;
    lean.run_oracle = false;
    lean.run_classifier = false;
    const GeometryResult res = evaluate_geometry(dd, lean);
    REQUIRE(res.extras.size() == 2);
    CHECK(res.extras[0].first == "phi_ai_t1");
    CHECK(res.extras[1].first == "phi_ai_t2");
    CHECK(res.extras[0].second - res.extras[1].second ==
          doctest::Approx(res.differential).epsilon(1e-9));
}
