#include "doctest.h"

#include "intphase/constants.hpp"
#include "intphase/errors.hpp"
#include "intphase/model.hpp"

using namespace intphase;

TEST_CASE("strontium 88 species") {
    Warnings w;
    const AtomSpecies sr = sr88_species(&w);
    CHECK(sr.mass == doctest::Approx(1.4597068297291298e-25).epsilon(1e-15));
    CHECK(sr.mass_defect == doctest::Approx(3.1628013499777422e-36).epsilon(1e-15));
    CHECK(sr.defect_ratio() == doctest::Approx(2.166737378741077e-11).epsilon(1e-13));
    CHECK(sr.omega() == doctest::Approx(kTwoPi * kSr88TransitionHz).epsilon(1e-13));
    CHECK(sr.mass_upper() > sr.mass_lower());
    CHECK(w.empty());
}

TEST_CASE("species validation") {
    CHECK_THROWS_AS(make_species(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(make_species(-1e-25, 1.0), ValidationError);
    CHECK_THROWS_AS(make_species(1e-25, -1.0), ValidationError);
    CHECK(make_species(1e-25, 0.0).mass_defect == 0.0);

    Warnings w;
    make_species(1e-25, 1e-6 * 1e-25 * kCSquared / kHbar * 2.0, "", &w);
    CHECK(has_warning(w, "perturbative_mass_defect"));
}

TEST_CASE("violation from alpha") {
    const AtomSpecies sr = sr88_species(nullptr);
    const ViolationModel v = violation_from_alpha(1e-3, sr, 2e-9);
    CHECK(v.dbeta() == doctest::Approx(1e-3 * sr.defect_ratio()).epsilon(1e-13));
    CHECK(v.beta_mean() == doctest::Approx(2e-9).epsilon(1e-13));
    CHECK(v.alpha(sr) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(v.alpha_defined(sr));

    const AtomSpecies flat = make_species(1e-25, 0.0);
    const ViolationModel pair{1e-10, 3e-10};
    CHECK_FALSE(pair.alpha_defined(flat));
    CHECK_THROWS_AS(pair.alpha(flat), ValidationError);
    CHECK_THROWS_AS(violation_from_alpha(1e-3, flat), ValidationError);
}

TEST_CASE("environment and trap validation") {
    CHECK(make_environment(0.0).g == 0.0);
    CHECK(make_environment(9.81).g == 9.81);
    CHECK_THROWS_AS(make_environment(-1.0), ValidationError);

    CHECK(make_trap(100.0, -5.0).dgamma2 == -5.0);
    CHECK_THROWS_AS(make_trap(0.0), ValidationError);
    CHECK_THROWS_AS(make_trap(-1.0), ValidationError);
}

TEST_CASE("wave packet moments") {
    const AtomSpecies sr = sr88_species(nullptr);
    const WavePacketSpec ground = trap_ground_state(sr, kTwoPi * 100.0);
    CHECK(ground.var_z * ground.var_p ==
          doctest::Approx(kHbar * kHbar / 4.0).epsilon(1e-14));
    CHECK_NOTHROW(make_wavepacket(2.0 * ground.var_z, ground.var_p));
    CHECK_THROWS_AS(make_wavepacket(0.5 * ground.var_z, 0.5 * ground.var_p),
                    ValidationError);
    CHECK_THROWS_AS(make_wavepacket(0.0, 1.0), ValidationError);
}

TEST_CASE("perturbation density matches the state Hamiltonian") {
    const AtomSpecies sr = sr88_species(nullptr);
    const ViolationModel v{5e-10, 1.5e-9};
    const double g = 9.81, z = 0.3, vel = -0.7;

    const double free_b = perturbation_density(sr, v, +1, g, z, vel);
    const double expect_b = 0.5 * sr.mass_defect * (kCSquared - 0.5 * vel * vel + g * z) +
                            sr.mass * v.beta_b * g * z;
    CHECK(free_b == doctest::Approx(expect_b).epsilon(1e-14));

    const double free_a = perturbation_density(sr, v, -1, g, z, vel);
    const double expect_a = -0.5 * sr.mass_defect * (kCSquared - 0.5 * vel * vel + g * z) +
                            sr.mass * v.beta_a * g * z;
    CHECK(free_a == doctest::Approx(expect_a).epsilon(1e-14));

    const TrapSpec trap = make_trap(kTwoPi * 100.0, 12.0);
    const double zeta = 0.25;
    const double trapped = perturbation_density(sr, v, +1, g, z, vel, true, trap, zeta);
    const double quad = 0.25 * sr.mass * trap.dgamma2 * (z - zeta) * (z - zeta);
    CHECK(trapped == doctest::Approx(expect_b + quad).epsilon(1e-14));
}
