#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intphase/model.hpp"
#include "intphase/trajectory.hpp"

namespace intphase {

enum class GeometryKind {
    clock_static,
    clock_free_fall,
    clock_guided,
    ai_mach_zehnder,
    ai_levitated,
    ai_doubly_differential,
    ai_symmetric_transitions,
    ai_guided,
    custom,
};

std::string to_string(GeometryKind kind);
std::optional<GeometryKind> geometry_kind_from_string(const std::string& name);

// clock_differential: both internal states ride each branch (Ramsey clocks);
// the observable is the upper-minus-lower differential of the internal phase.
// state_differential: each realization runs one internal-state program over
// both branches; the observable differences the two realizations.
enum class MeasurementMode { clock_differential, state_differential };

std::string to_string(MeasurementMode mode);

// Piecewise-constant internal state lambda(t) in {-1 (a), +1 (b)}; a flip at
// time t takes effect at t (left-closed, matching kick conventions).
struct LambdaProgram {
    int lambda0 = -1;
    std::vector<double> flip_times;  // strictly increasing

    int at(double t) const;
    // flip times in [a, b) paired with the lambda jump (new minus old).
    std::vector<std::pair<double, int>> jumps_in(double a, double b) const;
    void validate() const;
};

struct GeometrySpec {
    GeometryKind kind = GeometryKind::custom;
    MeasurementMode mode = MeasurementMode::state_differential;
    bool doubly_differential = false;

    AtomSpecies species;
    ViolationModel violation;
    LabEnvironment env;
    TrapSpec trap;

    BranchProgram upper;
    BranchProgram lower;
    LambdaProgram primary;    // clock mode: fixed +1 (state b)
    LambdaProgram reference;  // clock mode: fixed -1 (state a)

    double t_final = 0.0;
    double window_begin = 0.0;
    double window_end = 0.0;

    // Declared redshift window and its state-inversion multiplicity: the
    // classifier template integrates dz over this window times the multiplier.
    double red_window_begin = 0.0;
    double red_window_end = 0.0;
    double red_multiplier = 1.0;

    double reference_separation = 0.0;     // dz0 or dzeta0 [m]
    std::optional<double> mimic_accel;     // declared mimicked acceleration a
    std::optional<double> flip_t1, flip_t2;  // doubly-differential flip times

    // Builder parameters, ordered, for reports and round-trips.
    std::vector<std::pair<std::string, double>> params;

    void validate() const;
};

struct ClosureReport {
    bool applicable = false;  // interferometer modes only
    bool closed = true;
    double dz_final = 0.0;
    double dv_final = 0.0;
    double scale_z = 0.0;
    double scale_v = 0.0;
    double rel_z = 0.0;
    double rel_v = 0.0;
};

// Branch overlap at t_final relative to the geometry's own kinematic scales.
ClosureReport closure_check(const GeometrySpec& spec, double rel_tol = 1e-9);
ClosureReport closure_check(const GeometrySpec& spec, const PairKinematics& pair,
                            double rel_tol = 1e-9);

// Two clocks held in static traps separated by `separation` for `duration`.
GeometrySpec build_clock_static(const AtomSpecies& species, const ViolationModel& viol,
                                const LabEnvironment& env, const TrapSpec& trap,
                                double separation, double duration);

// Two clocks released from rest with vertical offset `separation`.
GeometrySpec build_clock_free_fall(const AtomSpecies& species, const ViolationModel& viol,
                                   const LabEnvironment& env, double separation,
                                   double duration);

// Two guided clocks ramped apart at +-ramp_velocity for ramp_duration, held,
// and ramped back together.
GeometrySpec build_clock_guided(const AtomSpecies& species, const ViolationModel& viol,
                                const LabEnvironment& env, const TrapSpec& trap,
                                double ramp_velocity, double ramp_duration,
                                double hold_duration);

// Three-pulse light-pulse interferometer: pi/2 - pi - pi/2 with effective
// wavenumber k and pulse separation T.
GeometrySpec build_ai_mach_zehnder(const AtomSpecies& species, const ViolationModel& viol,
                                   const LabEnvironment& env, double wavenumber,
                                   double pulse_interval);

// Mach-Zehnder stretched to relaunch_count periods with common relaunch kicks
// of momentum m*relaunch_accel*T once per period (offset defaults to T, the
// placement with every relaunch on the constant-separation plateau).
GeometrySpec build_ai_levitated(const AtomSpecies& species, const ViolationModel& viol,
                                const LabEnvironment& env, double wavenumber,
                                double pulse_interval, int relaunch_count,
                                double relaunch_accel,
                                std::optional<double> relaunch_offset = std::nullopt,
                                Warnings* warnings = nullptr);

// Ramsey-Borde pair with internal-state flips at t1 (primary) and t2
// (reference) inside the constant-separation window; the headline observable
// is the doubly-differential phase.
GeometrySpec build_ai_doubly_differential(const AtomSpecies& species,
                                          const ViolationModel& viol,
                                          const LabEnvironment& env, double wavenumber,
                                          double pulse_interval, double hold_duration,
                                          double t1, double t2);

// Four-pulse symmetric scheme with state inversions at T and T + hold on both
// realizations; initial_state selects which realization is primary.
GeometrySpec build_ai_symmetric_transitions(const AtomSpecies& species,
                                            const ViolationModel& viol,
                                            const LabEnvironment& env, double wavenumber,
                                            double pulse_interval, double hold_duration,
                                            char initial_state = 'a');

// Guided-clock kinematics interrogated as a state-differential interferometer.
GeometrySpec build_ai_guided(const AtomSpecies& species, const ViolationModel& viol,
                             const LabEnvironment& env, const TrapSpec& trap,
                             double ramp_velocity, double ramp_duration,
                             double hold_duration);

}  // namespace intphase
