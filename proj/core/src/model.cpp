#include "intphase/model.hpp"

#include <cmath>

namespace intphase {

AtomSpecies make_species(double mass_kg, double omega, std::string label,
                         Warnings* warnings) {
    if (!(mass_kg > 0.0))
        throw ValidationError("species: mass must be positive, got " + std::to_string(mass_kg));
    if (!(omega >= 0.0))
        throw ValidationError("species: transition frequency must be non-negative");
    const double dm = kHbar * omega / kCSquared;
    if (dm >= 2.0 * mass_kg)
        throw ValidationError("species: mass defect exceeds twice the mean mass");
    if (dm / mass_kg >= 1e-6)
        add_warning(warnings, "perturbative_mass_defect",
                    "mass defect ratio dm/m exceeds 1e-6; first-order treatment degrades");
    return AtomSpecies{mass_kg, dm, std::move(label)};
}

AtomSpecies sr88_species(Warnings* warnings) {
    return make_species(kSr88MassU * kAtomicMassUnit, kTwoPi * kSr88TransitionHz,
                        "Sr-88", warnings);
}

double ViolationModel::alpha(const AtomSpecies& s) const {
    if (!alpha_defined(s))
        throw ValidationError("violation: alpha undefined for zero mass defect");
    return dbeta() * s.mass / s.mass_defect;
}

ViolationModel violation_from_alpha(double alpha, const AtomSpecies& species,
                                    double beta_mean) {
    if (species.mass_defect == 0.0)
        throw ValidationError("violation: cannot realize alpha with zero mass defect");
    const double db = alpha * species.defect_ratio();
    return ViolationModel{beta_mean - 0.5 * db, beta_mean + 0.5 * db};
}

LabEnvironment make_environment(double g) {
    if (!(g >= 0.0) || !std::isfinite(g))
        throw ValidationError("environment: g must be finite and non-negative");
    return LabEnvironment{g};
}

TrapSpec make_trap(double gamma, double dgamma2) {
    if (!(gamma > 0.0))
        throw ValidationError("trap: gamma must be positive");
    return TrapSpec{gamma, dgamma2};
}

WavePacketSpec make_wavepacket(double var_z, double var_p) {
    if (!(var_z > 0.0) || !(var_p > 0.0))
        throw ValidationError("wavepacket: variances must be positive");
    const double bound = 0.25 * kHbar * kHbar;
    if (var_z * var_p < bound * (1.0 - 1e-12))
        throw ValidationError("wavepacket: var_z*var_p below the uncertainty bound hbar^2/4");
    return WavePacketSpec{var_z, var_p};
}

WavePacketSpec trap_ground_state(const AtomSpecies& species, double gamma) {
    if (!(gamma > 0.0))
        throw ValidationError("wavepacket: trap ground state needs gamma > 0");
    return WavePacketSpec{kHbar / (2.0 * species.mass * gamma),
                          kHbar * species.mass * gamma / 2.0};
}

double perturbation_density(const AtomSpecies& species, const ViolationModel& viol,
                            int lambda, double g, double z, double v,
                            bool trapped, const TrapSpec& trap, double zeta) {
    if (lambda != 1 && lambda != -1)
        throw ValidationError("perturbation_density: lambda must be +1 or -1");
    const double dm = species.mass_defect;
    const double beta = lambda > 0 ? viol.beta_b : viol.beta_a;
    double h = lambda * 0.5 * dm * (kCSquared - 0.5 * v * v + g * z)
             + species.mass * beta * g * z;
    if (trapped) {
        const double dz = z - zeta;
        h += lambda * 0.25 * species.mass * trap.dgamma2 * dz * dz;
    }
    return h;
}

}  // namespace intphase
