#include "intphase/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "intphase/constants.hpp"

namespace intphase {

std::string to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::clock_static: return "clock_static";
        case GeometryKind::clock_free_fall: return "clock_free_fall";
        case GeometryKind::clock_guided: return "clock_guided";
        case GeometryKind::ai_mach_zehnder: return "ai_mach_zehnder";
        case GeometryKind::ai_levitated: return "ai_levitated";
        case GeometryKind::ai_doubly_differential: return "ai_doubly_differential";
        case GeometryKind::ai_symmetric_transitions: return "ai_symmetric_transitions";
        case GeometryKind::ai_guided: return "ai_guided";
        case GeometryKind::custom: return "custom";
    }
    return "custom";
}

std::optional<GeometryKind> geometry_kind_from_string(const std::string& name) {
    static const std::map<std::string, GeometryKind> kMap = {
        {"clock_static", GeometryKind::clock_static},
        {"clock_free_fall", GeometryKind::clock_free_fall},
        {"clock_guided", GeometryKind::clock_guided},
        {"ai_mach_zehnder", GeometryKind::ai_mach_zehnder},
        {"ai_levitated", GeometryKind::ai_levitated},
        {"ai_doubly_differential", GeometryKind::ai_doubly_differential},
        {"ai_symmetric_transitions", GeometryKind::ai_symmetric_transitions},
        {"ai_guided", GeometryKind::ai_guided},
        {"custom", GeometryKind::custom},
    };
    auto it = kMap.find(name);
    if (it == kMap.end()) return std::nullopt;
    return it->second;
}

std::string to_string(MeasurementMode mode) {
    return mode == MeasurementMode::clock_differential ? "clock_differential"
                                                       : "state_differential";
}

int LambdaProgram::at(double t) const {
    int lam = lambda0;
    for (double tf : flip_times) {
        if (tf <= t) lam = -lam;
        else break;
    }
    return lam;
}

std::vector<std::pair<double, int>> LambdaProgram::jumps_in(double a, double b) const {
    std::vector<std::pair<double, int>> out;
    int lam = lambda0;
    for (double tf : flip_times) {
        const int next = -lam;
        if (tf >= a && tf < b) out.emplace_back(tf, next - lam);
        lam = next;
    }
    return out;
}

void LambdaProgram::validate() const {
    if (lambda0 != 1 && lambda0 != -1)
        throw ValidationError("lambda program: initial state must be +1 or -1");
    for (std::size_t i = 0; i + 1 < flip_times.size(); ++i)
        if (!(flip_times[i] < flip_times[i + 1]))
            throw ValidationError("lambda program: flip times must be strictly increasing");
}

void GeometrySpec::validate() const {
    if (!(species.mass > 0.0)) throw ValidationError("geometry: species not set");
    if (!(t_final > 0.0)) throw ValidationError("geometry: t_final must be positive");
    if (!(window_begin < window_end) || window_begin < 0.0 || window_end > t_final)
        throw ValidationError("geometry: bad integration window");
    if (!(red_window_begin <= red_window_end) || red_window_begin < 0.0 ||
        red_window_end > t_final)
        throw ValidationError("geometry: bad redshift window");
    upper.validate(t_final);
    lower.validate(t_final);
    primary.validate();
    reference.validate();
    if ((!upper.traps.empty() || !lower.traps.empty()) && !trap.active())
        throw ValidationError("geometry: trap windows present but no trap frequency");
    if (doubly_differential && (!flip_t1 || !flip_t2))
        throw ValidationError("geometry: doubly-differential needs flip times");
}

namespace {

constexpr char kInitialStateKey[] = "initial_state_b";

GeometrySpec base_spec(GeometryKind kind, MeasurementMode mode, const AtomSpecies& species,
                       const ViolationModel& viol, const LabEnvironment& env,
                       double t_final) {
    GeometrySpec spec;
    spec.kind = kind;
    spec.mode = mode;
    spec.species = species;
    spec.violation = viol;
    spec.env = env;
    spec.t_final = t_final;
    spec.window_begin = 0.0;
    spec.window_end = t_final;
    spec.red_window_begin = 0.0;
    spec.red_window_end = t_final;
    spec.primary = LambdaProgram{+1, {}};
    spec.reference = LambdaProgram{-1, {}};
    return spec;
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0))
        throw ValidationError(std::string("geometry: ") + what + " must be positive");
}

}  // namespace

GeometrySpec build_clock_static(const AtomSpecies& species, const ViolationModel& viol,
                                const LabEnvironment& env, const TrapSpec& trap,
                                double separation, double duration) {
    require_positive(duration, "duration");
    if (separation == 0.0) throw ValidationError("geometry: separation must be nonzero");
    if (!trap.active()) throw ValidationError("geometry: static clocks need a trap");
    GeometrySpec spec = base_spec(GeometryKind::clock_static,
                                  MeasurementMode::clock_differential, species, viol, env,
                                  duration);
    spec.trap = trap;
    const double sag = env.g / (trap.gamma * trap.gamma);
    spec.upper.z0 = separation - sag;
    spec.upper.traps.push_back(TrapWindow{0.0, duration, pw_constant(separation, 0.0, duration)});
    spec.lower.z0 = -sag;
    spec.lower.traps.push_back(TrapWindow{0.0, duration, pw_constant(0.0, 0.0, duration)});
    spec.reference_separation = separation;
    spec.params = {{"separation", separation}, {"duration", duration}};
    return spec;
}

GeometrySpec build_clock_free_fall(const AtomSpecies& species, const ViolationModel& viol,
                                   const LabEnvironment& env, double separation,
                                   double duration) {
    require_positive(duration, "duration");
    if (separation == 0.0) throw ValidationError("geometry: separation must be nonzero");
    GeometrySpec spec = base_spec(GeometryKind::clock_free_fall,
                                  MeasurementMode::clock_differential, species, viol, env,
                                  duration);
    spec.upper.z0 = separation;
    spec.lower.z0 = 0.0;
    spec.reference_separation = separation;
    spec.params = {{"separation", separation}, {"duration", duration}};
    return spec;
}

namespace {

GeometrySpec build_guided_kinematics(GeometryKind kind, MeasurementMode mode,
                                     const AtomSpecies& species, const ViolationModel& viol,
                                     const LabEnvironment& env, const TrapSpec& trap,
                                     double ramp_velocity, double ramp_duration,
                                     double hold_duration) {
    require_positive(ramp_velocity, "ramp_velocity");
    require_positive(ramp_duration, "ramp_duration");
    require_positive(hold_duration, "hold_duration");
    if (!trap.active()) throw ValidationError("geometry: guided kinematics need a trap");
    const double T = ramp_duration, Th = hold_duration;
    const double t_final = 2.0 * T + Th;
    GeometrySpec spec = base_spec(kind, mode, species, viol, env, t_final);
    spec.trap = trap;
    const double apex = ramp_velocity * T;
    const std::vector<double> knots{0.0, T, T + Th, t_final};
    const double sag = env.g / (trap.gamma * trap.gamma);
    spec.upper.z0 = -sag;
    spec.upper.traps.push_back(
        TrapWindow{0.0, t_final, pw_linear(knots, {0.0, apex, apex, 0.0})});
    spec.lower.z0 = -sag;
    spec.lower.traps.push_back(
        TrapWindow{0.0, t_final, pw_linear(knots, {0.0, -apex, -apex, 0.0})});
    spec.reference_separation = 2.0 * apex;
    spec.params = {{"ramp_velocity", ramp_velocity},
                   {"ramp_duration", ramp_duration},
                   {"hold_duration", hold_duration}};
    return spec;
}

}  // namespace

GeometrySpec build_clock_guided(const AtomSpecies& species, const ViolationModel& viol,
                                const LabEnvironment& env, const TrapSpec& trap,
                                double ramp_velocity, double ramp_duration,
                                double hold_duration) {
    return build_guided_kinematics(GeometryKind::clock_guided,
                                   MeasurementMode::clock_differential, species, viol, env,
                                   trap, ramp_velocity, ramp_duration, hold_duration);
}

GeometrySpec build_ai_guided(const AtomSpecies& species, const ViolationModel& viol,
                             const LabEnvironment& env, const TrapSpec& trap,
                             double ramp_velocity, double ramp_duration,
                             double hold_duration) {
    return build_guided_kinematics(GeometryKind::ai_guided,
                                   MeasurementMode::state_differential, species, viol, env,
                                   trap, ramp_velocity, ramp_duration, hold_duration);
}

GeometrySpec build_ai_mach_zehnder(const AtomSpecies& species, const ViolationModel& viol,
                                   const LabEnvironment& env, double wavenumber,
                                   double pulse_interval) {
    require_positive(wavenumber, "wavenumber");
    require_positive(pulse_interval, "pulse_interval");
    const double T = pulse_interval;
    const double hk = kHbar * wavenumber;
    GeometrySpec spec = base_spec(GeometryKind::ai_mach_zehnder,
                                  MeasurementMode::state_differential, species, viol, env,
                                  2.0 * T);
    spec.upper.kicks = {Kick{0.0, hk}, Kick{T, -hk}};
    spec.lower.kicks = {Kick{T, hk}, Kick{2.0 * T, -hk}};
    spec.reference_separation = hk * T / species.mass;
    spec.params = {{"wavenumber", wavenumber}, {"pulse_interval", pulse_interval}};
    return spec;
}

GeometrySpec build_ai_levitated(const AtomSpecies& species, const ViolationModel& viol,
                                const LabEnvironment& env, double wavenumber,
                                double pulse_interval, int relaunch_count,
                                double relaunch_accel,
                                std::optional<double> relaunch_offset, Warnings* warnings) {
    require_positive(wavenumber, "wavenumber");
    require_positive(pulse_interval, "pulse_interval");
    if (relaunch_count < 1)
        throw ValidationError("geometry: relaunch_count must be >= 1");
    if (relaunch_accel < 0.0)
        throw ValidationError("geometry: relaunch_accel must be non-negative");
    const double T = pulse_interval;
    const int n = relaunch_count;
    const double offset = relaunch_offset.value_or(T);
    if (!(offset > 0.0) || offset > T)
        throw ValidationError("geometry: relaunch_offset must lie in (0, pulse_interval]");
    if (offset != T)
        add_warning(warnings, "relaunch_offset",
                    "relaunches are off the constant-separation plateau; the closed form "
                    "assumes offset = pulse_interval");

    const double t_final = (n + 1) * T;
    const double hk = kHbar * wavenumber;
    const double rp = species.mass * relaunch_accel * T;  // relaunch momentum

    GeometrySpec spec = base_spec(GeometryKind::ai_levitated,
                                  MeasurementMode::state_differential, species, viol, env,
                                  t_final);

    std::map<double, double> dp_u, dp_l;
    dp_u[0.0] += hk;
    dp_u[T] -= hk;
    dp_l[n * T] += hk;
    dp_l[t_final] -= hk;
    if (rp != 0.0) {
        for (int j = 0; j < n; ++j) {
            const double t = offset + j * T;
            dp_u[t] += rp;
            dp_l[t] += rp;
        }
    }
    for (const auto& [t, dp] : dp_u)
        spec.upper.kicks.push_back(Kick{t, dp, 0.0, 0.0, KickTag::relaunch});
    for (const auto& [t, dp] : dp_l)
        spec.lower.kicks.push_back(Kick{t, dp, 0.0, 0.0, KickTag::relaunch});
    spec.upper.kicks.front().tag = KickTag::beam_splitter;
    spec.lower.kicks.back().tag = KickTag::beam_splitter;

    spec.reference_separation = hk * T / species.mass;
    spec.mimic_accel = relaunch_accel;
    spec.params = {{"wavenumber", wavenumber},
                   {"pulse_interval", pulse_interval},
                   {"relaunch_count", static_cast<double>(relaunch_count)},
                   {"relaunch_accel", relaunch_accel},
                   {"relaunch_offset", offset}};
    return spec;
}

GeometrySpec build_ai_doubly_differential(const AtomSpecies& species,
                                          const ViolationModel& viol,
                                          const LabEnvironment& env, double wavenumber,
                                          double pulse_interval, double hold_duration,
                                          double t1, double t2) {
    require_positive(wavenumber, "wavenumber");
    require_positive(pulse_interval, "pulse_interval");
    require_positive(hold_duration, "hold_duration");
    const double T = pulse_interval, Th = hold_duration;
    if (!(T <= t1 && t1 < t2 && t2 <= T + Th))
        throw ValidationError(
            "geometry: flips must satisfy T <= t1 < t2 <= T + hold_duration");
    const double t_final = 2.0 * T + Th;
    const double hk = kHbar * wavenumber;
    GeometrySpec spec = base_spec(GeometryKind::ai_doubly_differential,
                                  MeasurementMode::state_differential, species, viol, env,
                                  t_final);
    spec.doubly_differential = true;
    spec.upper.kicks = {Kick{0.0, hk}, Kick{T, -hk}};
    spec.lower.kicks = {Kick{T + Th, hk}, Kick{t_final, -hk}};
    spec.primary = LambdaProgram{-1, {t1}};
    spec.reference = LambdaProgram{-1, {t2}};
    spec.flip_t1 = t1;
    spec.flip_t2 = t2;
    spec.red_window_begin = t1;
    spec.red_window_end = t2;
    spec.reference_separation = hk * T / species.mass;
    spec.params = {{"wavenumber", wavenumber},
                   {"pulse_interval", pulse_interval},
                   {"hold_duration", hold_duration},
                   {"t1", t1},
                   {"t2", t2}};
    return spec;
}

GeometrySpec build_ai_symmetric_transitions(const AtomSpecies& species,
                                            const ViolationModel& viol,
                                            const LabEnvironment& env, double wavenumber,
                                            double pulse_interval, double hold_duration,
                                            char initial_state) {
    require_positive(wavenumber, "wavenumber");
    require_positive(pulse_interval, "pulse_interval");
    require_positive(hold_duration, "hold_duration");
    if (initial_state != 'a' && initial_state != 'b')
        throw ValidationError("geometry: initial_state must be 'a' or 'b'");
    const double T = pulse_interval, Th = hold_duration;
    const double t_final = 2.0 * T + Th;
    const double hk = kHbar * wavenumber;
    GeometrySpec spec = base_spec(GeometryKind::ai_symmetric_transitions,
                                  MeasurementMode::state_differential, species, viol, env,
                                  t_final);
    spec.upper.kicks = {Kick{0.0, hk}, Kick{T, -hk}, Kick{T + Th, -hk}, Kick{t_final, hk}};
    spec.lower.kicks = {Kick{0.0, -hk}, Kick{T, hk}, Kick{T + Th, hk}, Kick{t_final, -hk}};
    const int lam0 = initial_state == 'a' ? -1 : +1;
    spec.primary = LambdaProgram{lam0, {T, T + Th}};
    spec.reference = LambdaProgram{-lam0, {T, T + Th}};
    spec.red_window_begin = T;
    spec.red_window_end = T + Th;
    spec.red_multiplier = 2.0;
    spec.reference_separation = 2.0 * hk * T / species.mass;
    spec.params = {{"wavenumber", wavenumber},
                   {"pulse_interval", pulse_interval},
                   {"hold_duration", hold_duration},
                   {kInitialStateKey, initial_state == 'b' ? 1.0 : 0.0}};
    return spec;
}

ClosureReport closure_check(const GeometrySpec& spec, const PairKinematics& pair,
                            double rel_tol) {
    ClosureReport rep;
    rep.applicable = spec.mode == MeasurementMode::state_differential;
    if (!rep.applicable) return rep;

    double scale_z = std::abs(spec.reference_separation);
    double scale_v = 0.0;
    for (const auto& s : pair.diff.segments) {
        scale_z = std::max({scale_z, std::abs(s.z(s.t0)), std::abs(s.z(s.t1))});
        scale_v = std::max({scale_v, std::abs(s.v(s.t0)), std::abs(s.v(s.t1))});
    }
    scale_v = std::max(scale_v, std::abs(pair.diff.v_end));
    rep.dz_final = pair.diff.z_end;
    rep.dv_final = pair.diff.v_end;
    rep.scale_z = scale_z;
    rep.scale_v = scale_v;
    rep.rel_z = scale_z > 0.0 ? std::abs(rep.dz_final) / scale_z : 0.0;
    rep.rel_v = scale_v > 0.0 ? std::abs(rep.dv_final) / scale_v : 0.0;
    rep.closed = rep.rel_z <= rel_tol && rep.rel_v <= rel_tol;
    return rep;
}

ClosureReport closure_check(const GeometrySpec& spec, double rel_tol) {
    spec.validate();
    const PairKinematics pair = make_pair_kinematics(
        spec.upper, spec.lower, spec.species.mass, spec.env.g, spec.trap.gamma, spec.t_final);
    return closure_check(spec, pair, rel_tol);
}

}  // namespace intphase
