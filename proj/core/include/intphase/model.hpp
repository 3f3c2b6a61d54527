#pragma once

#include <string>

#include "intphase/constants.hpp"
#include "intphase/errors.hpp"

namespace intphase {

// Two-level atom with internal energy hbar*omega carried as a mass defect
// dm = hbar*omega/c^2 about the mean mass m. State a (lower) has m - dm/2,
// state b (upper) m + dm/2.
struct AtomSpecies {
    double mass = 0.0;         // mean mass m [kg]
    double mass_defect = 0.0;  // dm [kg]
    std::string label;

    double omega() const { return mass_defect * kCSquared / kHbar; }
    double mass_upper() const { return mass + 0.5 * mass_defect; }
    double mass_lower() const { return mass - 0.5 * mass_defect; }
    double defect_ratio() const { return mass_defect / mass; }
};

// omega is the internal transition angular frequency [rad/s].
AtomSpecies make_species(double mass_kg, double omega, std::string label = {},
                         Warnings* warnings = nullptr);

AtomSpecies sr88_species(Warnings* warnings = nullptr);

// Dilaton-type couplings: state j falls with g_j = (1 + beta_j) g.
// The differential coupling dbeta = beta_b - beta_a drives redshift-type
// violations; alpha = dbeta * m/dm is the fractional redshift anomaly.
struct ViolationModel {
    double beta_a = 0.0;
    double beta_b = 0.0;

    double dbeta() const { return beta_b - beta_a; }
    double beta_mean() const { return 0.5 * (beta_a + beta_b); }
    bool alpha_defined(const AtomSpecies& s) const { return s.mass_defect != 0.0; }
    double alpha(const AtomSpecies& s) const;
};

// Builds the couplings giving redshift anomaly alpha at fixed mean coupling.
ViolationModel violation_from_alpha(double alpha, const AtomSpecies& species,
                                    double beta_mean = 0.0);

struct LabEnvironment {
    double g = kDefaultGravity;  // downward gravitational acceleration [m/s^2]
};

LabEnvironment make_environment(double g);

// Harmonic trap felt by the atom: mean angular frequency gamma and the
// state dependence dgamma2 = gamma_b^2 - gamma_a^2.
struct TrapSpec {
    double gamma = 0.0;    // [rad/s]
    double dgamma2 = 0.0;  // [rad^2/s^2]

    bool active() const { return gamma > 0.0; }
};

TrapSpec make_trap(double gamma, double dgamma2 = 0.0);

// Gaussian wave packet second moments at t = 0.
struct WavePacketSpec {
    double var_z = 0.0;  // <dz^2> [m^2]
    double var_p = 0.0;  // <dp^2> [kg^2 m^2 / s^2]
};

WavePacketSpec make_wavepacket(double var_z, double var_p);

// Ground state of the mean trap: var_z = hbar/(2 m gamma), var_p = hbar m gamma / 2.
WavePacketSpec trap_ground_state(const AtomSpecies& species, double gamma);

// Perturbation energy of internal state j (lambda = +1 for b, -1 for a) at
// phase-space point (z, v), including the internal rest energy. zeta is the
// trap center position; pass trapped = false for free flight.
double perturbation_density(const AtomSpecies& species, const ViolationModel& viol,
                            int lambda, double g, double z, double v,
                            bool trapped = false, const TrapSpec& trap = {},
                            double zeta = 0.0);

}  // namespace intphase
