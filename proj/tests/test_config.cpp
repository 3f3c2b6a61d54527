#include "doctest.h"

#include <string>

#include "intphase/config.hpp"
#include "intphase/constants.hpp"
#include "intphase/errors.hpp"
#include "intphase/geometry.hpp"

using namespace intphase;

namespace {

const char* kMinimal = R"(
[species]
mass_u = 87.9056
transition_frequency_hz = 4.29e14

[violation]
alpha = 1e-3

[environment]
g = 9.81

[trap]
gamma = 628.3185307179586

[geometry]
name = "clock_static"
separation = 1.0
duration = 1.0
)";

template <typename F>
std::string error_message(F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal config parses and builds") {
    const ExperimentConfig cfg = parse_config_text(kMinimal, "test");
    CHECK(cfg.mass_kg == doctest::Approx(87.9056 * kAtomicMassUnit).epsilon(1e-15));
    CHECK(cfg.omega == doctest::Approx(kTwoPi * 4.29e14).epsilon(1e-15));
    REQUIRE(cfg.violation.alpha.has_value());
    CHECK(*cfg.violation.alpha == 1e-3);
    REQUIRE(cfg.trap.has_value());

    Warnings w;
    const AtomSpecies species = config_species(cfg, &w);
    const GeometrySpec spec = make_geometry(cfg, &w);
    CHECK(spec.kind == GeometryKind::clock_static);
    CHECK(spec.t_final == 1.0);
    CHECK(spec.violation.dbeta() ==
          doctest::Approx(1e-3 * species.defect_ratio()).epsilon(1e-13));
}

TEST_CASE("serialization is a fixpoint") {
    const ExperimentConfig cfg = parse_config_text(kMinimal, "test");
    const std::string once = serialize_config(cfg);
    const ExperimentConfig reparsed = parse_config_text(once, "round");
    const std::string twice = serialize_config(reparsed);
    CHECK(once == twice);

    Warnings w;
    const GeometrySpec a = make_geometry(cfg, &w);
    const GeometrySpec b = make_geometry(reparsed, &w);
    CHECK(phase_dynamical_differential(a) == phase_dynamical_differential(b));
}

TEST_CASE("diagnostics carry source and line") {
    const std::string dup = "[species]\nmass_u = 1.0\nmass_u = 2.0\n";
    CHECK(error_message([&] { parse_config_text(dup, "cfg"); }).find("cfg:3") !=
          std::string::npos);

    const std::string unknown = std::string(kMinimal) + "typo_key = 1.0\n";
    const std::string msg = error_message([&] { parse_config_text(unknown, "cfg"); });
    CHECK(msg.find("typo_key") != std::string::npos);

    const std::string bad_num = "[species]\nmass_u = twelve\n";
    CHECK(error_message([&] { parse_config_text(bad_num, "cfg"); }).find("cfg:2") !=
          std::string::npos);
}

TEST_CASE("schema rejections") {
    CHECK_THROWS_AS(parse_config_text("[geometry]\nname = \"clock_static\"\n", "t"),
                    ValidationError);  // missing species

    const std::string both_masses =
        "[species]\nmass_u = 87.9\nmass_kg = 1e-25\ntransition_frequency_hz = 4e14\n"
        "[geometry]\nname = \"clock_static\"\nseparation = 1.0\nduration = 1.0\n";
    CHECK_THROWS_AS(parse_config_text(both_masses, "t"), ValidationError);

    std::string mixed = kMinimal;
    mixed.replace(mixed.find("alpha = 1e-3"), 12, "alpha = 1e-3\nbeta_a = 1e-9");
    CHECK_THROWS_AS(parse_config_text(mixed, "t"), ValidationError);

    std::string bad_geo = kMinimal;
    bad_geo.replace(bad_geo.find("clock_static"), 12, "not_a_thing0");
    CHECK_THROWS_AS(parse_config_text(bad_geo, "t"), ValidationError);

    std::string missing_param = kMinimal;
    missing_param.replace(missing_param.find("separation = 1.0"), 16, "# separation gone");
    CHECK_THROWS_AS(parse_config_text(missing_param, "t"), ValidationError);
}

TEST_CASE("custom timeline round trip") {
    const char* text = R"(
[species]
mass_u = 87.9056
transition_frequency_hz = 4.29e14

[environment]
g = 9.81

[geometry]
name = "custom"
t_final = 0.2
mode = "state"
reference_separation = 1.116813565454189e-3

[geometry.primary]
lambda0 = 1

[geometry.reference]
lambda0 = -1

[[geometry.event]]
t = 0.0
branch = "upper"
kind = "velocity"
magnitude = 1.116813565454189e-2

[[geometry.event]]
t = 0.1
branch = "upper"
kind = "velocity"
magnitude = -1.116813565454189e-2

[[geometry.event]]
t = 0.1
branch = "lower"
kind = "velocity"
magnitude = 1.116813565454189e-2

[[geometry.event]]
t = 0.2
branch = "lower"
kind = "velocity"
magnitude = -1.116813565454189e-2
)";
    const ExperimentConfig cfg = parse_config_text(text, "custom");
    Warnings w;
    const AtomSpecies species = config_species(cfg, &w);
    const GeometrySpec spec = make_geometry(cfg, &w);
    CHECK(spec.kind == GeometryKind::custom);
    CHECK(spec.mode == MeasurementMode::state_differential);
    REQUIRE(spec.upper.kicks.size() == 2);
    REQUIRE(spec.lower.kicks.size() == 2);
    CHECK(spec.upper.kicks[0].dv == 1.116813565454189e-2);
    CHECK(spec.upper.kicks[0].dp == 0.0);
    CHECK(spec.upper.kicks[0].tag == KickTag::velocity_transfer);

    const std::string out = serialize_config(cfg);
    const ExperimentConfig back = parse_config_text(out, "round");
    CHECK(serialize_config(back) == out);

    std::string clockless = text;
    const auto cut = clockless.find("[geometry.primary]");
    clockless.replace(cut, clockless.find("[[geometry.event]]") - cut, "");
    CHECK_THROWS_AS(parse_config_text(clockless, "t"), ValidationError);
}

TEST_CASE("axis application") {
    ExperimentConfig cfg = parse_config_text(kMinimal, "test");

    ExperimentConfig g2 = cfg;
    apply_axis(g2, "g", 4.9);
    CHECK(g2.g == 4.9);

    ExperimentConfig a2 = cfg;
    apply_axis(a2, "alpha", 2e-3);
    REQUIRE(a2.violation.alpha.has_value());
    CHECK(*a2.violation.alpha == 2e-3);

    ExperimentConfig s2 = cfg;
    apply_axis(s2, "separation", 2.5);
    Warnings w;
    const GeometrySpec spec = make_geometry(s2, &w);
    CHECK(spec.params[0].second == 2.5);

    ExperimentConfig m2 = cfg;
    apply_axis(m2, "mass_kg", 1.5e-25);
    CHECK(m2.mass_kg == 1.5e-25);

    ExperimentConfig t2 = cfg;
    apply_axis(t2, "gamma", 100.0);
    REQUIRE(t2.trap.has_value());
    CHECK(t2.trap->gamma == 100.0);

    CHECK_THROWS_AS(apply_axis(cfg, "no_such_axis", 1.0), ValidationError);
    CHECK_THROWS_AS(apply_axis(cfg, "beta_a", 1e-9), ValidationError);  // alpha mode
}

TEST_CASE("numerics and signal blocks") {
    std::string text = kMinimal;
    text += R"(
[numerics]
quadrature = "adaptive"
quad_tol = 1e-10
oracle = false

[signal]
contrast = 0.8

[output]
report = "out.json"
sample_rate = 50
)";
    const ExperimentConfig cfg = parse_config_text(text, "test");
    CHECK(cfg.numerics.quadrature == QuadMode::adaptive);
    CHECK(cfg.numerics.quad_tol == 1e-10);
    CHECK_FALSE(cfg.numerics.oracle);
    REQUIRE(cfg.contrast.has_value());
    CHECK(*cfg.contrast == 0.8);
    CHECK(cfg.output.report == "out.json");
    CHECK(cfg.output.sample_rate == 50.0);

    std::string bad = text;
    bad.replace(bad.find("\"adaptive\""), 10, "\"simpson1\"");
    CHECK_THROWS_AS(parse_config_text(bad, "t"), ValidationError);
}
