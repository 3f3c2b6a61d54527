#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intphase/analysis.hpp"
#include "intphase/geometry.hpp"
#include "intphase/phase.hpp"

namespace intphase {

// Instantaneous control event in a custom timeline. kind is one of
// "kick" (momentum transfer), "relaunch" (momentum transfer tagged as
// levitation support), "velocity" (velocity transfer, mass-independent).
struct TimelineEvent {
    double t = 0.0;
    std::string branch = "both";  // "upper" | "lower" | "both"
    std::string kind = "kick";
    double magnitude = 0.0;    // dp [kg m/s] for kick/relaunch, dv [m/s] for velocity
    double laser_phase = 0.0;  // [rad]
};

struct TimelineTrap {
    std::string branch = "both";
    double t_on = 0.0;
    double t_off = 0.0;
    bool center_is_const = true;
    double center_const = 0.0;
    std::vector<std::pair<double, double>> center_knots;  // (t, zeta), linear between
};

struct StateProgramConfig {
    int lambda0 = 1;
    std::vector<double> flips;
};

struct CustomTimeline {
    double t_final = 0.0;
    std::string mode = "clock";  // "clock" | "state"
    double z_upper = 0.0, v_upper = 0.0;
    double z_lower = 0.0, v_lower = 0.0;
    std::vector<TimelineEvent> events;
    std::vector<TimelineTrap> traps;
    std::optional<StateProgramConfig> primary;
    std::optional<StateProgramConfig> reference;
    std::optional<std::array<double, 2>> window;
    std::optional<std::array<double, 2>> red_window;
    double red_multiplier = 1.0;
    double reference_separation = 0.0;
    std::optional<double> mimic_accel;
};

struct GeometryConfig {
    std::string name;  // catalog geometry name or "custom"
    std::vector<std::pair<std::string, double>> params;  // named geometries
    std::optional<char> initial_state;                   // symmetric scheme only
    std::optional<CustomTimeline> timeline;              // custom only
};

struct ViolationConfig {
    std::optional<double> alpha;      // exclusive with beta_a/beta_b
    std::optional<double> beta_mean;  // only alongside alpha
    double beta_a = 0.0;
    double beta_b = 0.0;
};

struct TrapConfig {
    double gamma = 0.0;
    double dgamma2 = 0.0;
};

struct WavePacketConfig {
    std::optional<double> var_z;  // both set: explicit moments; neither: trap ground state
    std::optional<double> var_p;
    bool allow_piecewise = false;
};

struct NumericsConfig {
    QuadMode quadrature = QuadMode::closed_form;
    double quad_tol = 1e-12;
    double ode_tol = 1e-12;
    bool oracle = true;
};

struct OutputConfig {
    std::string report;          // report path; empty = stdout
    std::string trajectory;      // trajectory CSV path; empty = none
    double sample_rate = 1000.0; // trajectory samples per second
};

struct SensitivityConfig {
    double n_atoms = 0.0;
    double t_avg = 0.0;
    double t_cycle = 0.0;
    double t_red = 0.0;
    double dz0 = 0.0;
    std::optional<double> omega;  // default: species transition frequency
    std::optional<double> g;      // default: environment gravity
};

struct ExperimentConfig {
    double mass_kg = 0.0;
    double omega = 0.0;  // transition angular frequency [rad/s]
    std::string label;
    ViolationConfig violation;
    double g = kDefaultGravity;
    std::optional<TrapConfig> trap;
    std::optional<WavePacketConfig> wavepacket;
    GeometryConfig geometry;
    NumericsConfig numerics;
    std::optional<double> contrast;
    std::optional<SensitivityConfig> sensitivity;
    OutputConfig output;
};

// Parses the TOML-subset config grammar (tables, table arrays, strings,
// numbers, booleans, nested arrays). Errors carry source name and line.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name = "config");
ExperimentConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(parse(x))) == parse(x) field for
// field, and serialize(parse(serialize(parse(x)))) is byte-identical.
std::string serialize_config(const ExperimentConfig& cfg);

AtomSpecies config_species(const ExperimentConfig& cfg, Warnings* warnings = nullptr);
ViolationModel config_violation(const ExperimentConfig& cfg, const AtomSpecies& species);

// Assembles the GeometrySpec, via the catalog builders for named geometries
// or from the timeline DSL for "custom".
GeometrySpec make_geometry(const ExperimentConfig& cfg, Warnings* warnings = nullptr);

EvalOptions config_eval_options(const ExperimentConfig& cfg, const AtomSpecies& species);
SensitivityInputs config_sensitivity(const ExperimentConfig& cfg,
                                     const AtomSpecies& species);

// Sets one schema parameter by name (sweep axis): "g", "alpha", "dbeta",
// "beta_a", "beta_b", "gamma", "dgamma2", "mass_kg", "contrast", or a
// geometry parameter of the configured named geometry.
void apply_axis(ExperimentConfig& cfg, const std::string& name, double value);

}  // namespace intphase
