#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intphase/phase.hpp"

namespace intphase {

enum class Classification {
    gold_standard_ugr,
    accelerational_redshift,
    uff_null_test,
    insensitive,
    mixed_sensitivity,
};

std::string to_string(Classification c);

struct ClassifierGridPoint {
    double g = 0.0;
    double alpha = 0.0;  // grid alpha (or the raw dbeta when dm == 0)
    double dbeta = 0.0;
    double phi = 0.0;
    double tmpl_gold = 0.0;
    double tmpl_accel = 0.0;
    double resid_gold = 0.0;
    double resid_accel = 0.0;
};

struct ClassificationResult {
    Classification kind = Classification::insensitive;
    bool alpha_parametrized = true;  // false: dm == 0, grid runs over dbeta
    double a_red = 0.0;              // declared-window integral of dz, with multiplier
    double tol = 1e-6;
    double scale = 0.0;  // max |phi|, |template| over the grid
    double floor = 0.0;  // zero threshold derived from scale
    bool gold_fits = false;
    bool accel_fits = false;
    bool null_at_alpha_zero = false;
    bool alpha_sensitive = false;
    std::vector<ClassifierGridPoint> grid;
    std::string note;
};

// Classifies the geometry's redshift sensitivity on a 3x3 (g, alpha) grid.
// Catalog geometries are rebuilt through their builders at each grid gravity
// (sag initial conditions and the relaunch acceleration follow g at fixed
// a/g); custom geometries only get env.g and the violation swapped.
ClassificationResult classify_ugr(const GeometrySpec& spec, const EvalOptions& opts = {},
                                  double rel_tol = 1e-6);

// Rebuild of a catalog geometry at a different gravity/violation, as used by
// the classifier grid. Custom geometries are copied with the fields swapped.
GeometrySpec rebuild_geometry(const GeometrySpec& spec, double g,
                              const ViolationModel& viol);

struct ReferenceValue {
    bool available = false;
    double value = 0.0;
    std::string formula;  // human-readable closed form that produced the value
};

// Closed-form differential phase for catalog geometries; unavailable (with a
// reason in `formula`) for custom timelines.
ReferenceValue closed_form_reference(const GeometrySpec& spec);

// Per-realization closed forms where defined (Mach-Zehnder and the symmetric
// transition scheme); first = primary realization, second = reference.
std::optional<std::pair<ReferenceValue, ReferenceValue>> closed_form_state_references(
    const GeometrySpec& spec);

struct AnalysisOptions {
    EvalOptions eval;
    bool run_oracle = true;
    bool run_classifier = true;
    double classifier_tol = 1e-6;
};

struct GeometryResult {
    GeometrySpec spec;
    PhaseResult phases;
    double differential = 0.0;

    ReferenceValue reference;
    double residual_abs = 0.0;
    double residual_rel = 0.0;  // relative to |reference| when nonzero

    std::optional<std::pair<ReferenceValue, ReferenceValue>> state_references;

    // Named auxiliary observables (e.g. the two single-initialization
    // differentials of the doubly differential scheme).
    std::vector<std::pair<std::string, double>> extras;

    std::optional<double> oracle;
    double oracle_residual = 0.0;

    std::optional<ClassificationResult> classification;
};

GeometryResult evaluate_geometry(const GeometrySpec& spec, const AnalysisOptions& opts = {});

// Exit-port intensity (1 + C cos(phi)) / 2.
double interference_signal(double phi, double contrast);

struct SensitivityInputs {
    double n_atoms = 0.0;   // atoms per shot
    double t_avg = 0.0;     // total averaging time [s]
    double t_cycle = 0.0;   // cycle time [s]
    double t_red = 0.0;     // redshift time [s]
    double dz0 = 0.0;       // branch separation [m]
    double omega = 0.0;     // clock frequency [rad/s]
    double g = 0.0;         // gravitational acceleration [m/s^2]
};

struct SensitivityResult {
    double delta_alpha = 0.0;
    double shots = 0.0;           // t_avg / t_cycle
    double phase_per_alpha = 0.0; // |dPhi/dalpha| = Omega g dz0 t_red / c^2
};

SensitivityResult sensitivity(const SensitivityInputs& in);

}  // namespace intphase
