#pragma once

#include <optional>

#include "intphase/geometry.hpp"
#include "intphase/model.hpp"
#include "intphase/oracle.hpp"
#include "intphase/trajectory.hpp"

namespace intphase {

enum class QuadMode { closed_form, adaptive };

struct EvalOptions {
    QuadMode quadrature = QuadMode::closed_form;
    double quad_tol = 1e-12;  // adaptive panel tolerance
    double ode_tol = 1e-12;   // oracle tolerance

    std::optional<WavePacketSpec> wavepacket;  // clock-mode wave-packet phase
    bool wavepacket_piecewise = false;         // experimental trap-then-release
};

// One branch (clock mode) or one state realization (interferometer mode).
// The direct decomposition keeps boundary at zero; dyn_internal carries the
// exact internal rest-energy phase -omega*(window) for clock branches.
struct PhaseBreakdown {
    double phi0 = 0.0;
    double dyn_internal = 0.0;
    double dyn_motion = 0.0;
    double boundary = 0.0;
    double wavepacket = 0.0;
    double proper_lab = 0.0;         // [s]
    double proper_correction = 0.0;  // [s]

    double dynamical() const { return dyn_internal + dyn_motion; }
    double total() const { return phi0 + dynamical() + boundary + wavepacket; }
};

struct PartialIntegration {
    double boundary = 0.0;
    double reduced = 0.0;
    double total() const { return boundary + reduced; }
};

struct PhaseResult {
    MeasurementMode mode = MeasurementMode::clock_differential;

    PhaseBreakdown primary;    // clock: upper branch;  AI: primary realization
    PhaseBreakdown reference;  // clock: lower branch;  AI: reference realization

    // Differential phase from the pair-difference density (the dominant
    // common terms never enter, so no catastrophic cancellation).
    double differential = 0.0;

    PartialIntegration partial;     // alternate route for the same differential
    double virial_residual = 0.0;   // |direct - partial.total()|
    double virial_scale = 0.0;

    double phi0 = 0.0;           // interferometer unperturbed phase (common)
    double delta_tau = 0.0;      // clock proper-time correction difference [s]
    double redshift_area = 0.0;  // multiplier * integral of dz over declared window

    ClosureReport closure;
    Warnings warnings;
};

PhaseResult compute_phases(const GeometrySpec& spec, const EvalOptions& opts = {});

// Differential observable with the documented consistency checks: wave-packet
// phases must cancel identically and phi0 must be common; throws otherwise.
double differential_phase(const PhaseResult& result);

// Direct-route differential dynamical phase over the window.
double phase_dynamical_differential(const GeometrySpec& spec, const EvalOptions& opts = {});

// Boundary-plus-reduced-integral decomposition of the same quantity.
PartialIntegration phase_partial_integration(const GeometrySpec& spec,
                                             const EvalOptions& opts = {});

// Unperturbed mean-mass action difference between the branches divided by
// hbar, plus the laser phase ledger (interferometer modes).
double unperturbed_phase(const GeometrySpec& spec, const EvalOptions& opts = {});

enum class ClockWavePacketMode { trapped, released, piecewise };

// Wave-packet evolution phase of a clock branch; identical for both branches
// of a clock pair with shared trap parameters. release_time is used by the
// experimental piecewise mode only.
double wavepacket_phase_clock(const AtomSpecies& species, const TrapSpec& trap,
                              ClockWavePacketMode mode, double duration,
                              const WavePacketSpec& wp, bool allow_piecewise = false,
                              double release_time = 0.0, Warnings* warnings = nullptr);

// Exactly zero for a closed interferometer; throws ValidationError otherwise.
double wavepacket_phase_interferometer(const GeometrySpec& spec);

struct ProperTime {
    double lab = 0.0;         // coordinate duration [s]
    double correction = 0.0;  // integral of (-v^2/2 + g z)/c^2 [s]

    double total() const { return lab + correction; }
};

ProperTime proper_time(const BranchTrajectory& traj, double a, double b, double g,
                       const EvalOptions& opts = {});

// Differential phase recomputed with the independent ODE oracle (numerical
// trajectories and running phase accumulators).
double differential_phase_ode(const GeometrySpec& spec, double rel_tol = 1e-12);

}  // namespace intphase
