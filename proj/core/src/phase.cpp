#include "intphase/phase.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "intphase/constants.hpp"
#include "intphase/quadrature.hpp"

namespace intphase {

namespace {

struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

struct Integrator {
    QuadMode mode = QuadMode::closed_form;
    double tol = 1e-12;

    double operator()(const TrigPoly& f, double a, double b) const {
        if (!(a < b)) return 0.0;
        if (mode == QuadMode::closed_form) return f.integrate(a, b);
        return integrate_adaptive([&f](double x) { return f.eval(x); }, a, b, tol,
                                  /*abs_tol=*/0.0, /*max_depth=*/48,
                                  /*throw_on_failure=*/true)
            .value;
    }
};

// Aligned mean/difference forms of one merged segment.
struct SegmentForms {
    double t0 = 0.0, t1 = 0.0;
    bool trapped = false;
    TrigPoly vbar, dv, dz, zbar;
    TrigPoly mean_off, diff_off;  // z - zeta forms, trapped segments only
};

std::vector<SegmentForms> pair_forms(const PairKinematics& pair) {
    if (pair.mean.segments.size() != pair.diff.segments.size())
        throw NumericalError("phase: mean/difference segmentation mismatch");
    std::vector<SegmentForms> forms;
    forms.reserve(pair.mean.segments.size());
    for (std::size_t i = 0; i < pair.mean.segments.size(); ++i) {
        const Segment& m = pair.mean.segments[i];
        const Segment& d = pair.diff.segments[i];
        if (m.t0 != d.t0 || m.t1 != d.t1 || m.trapped != d.trapped)
            throw NumericalError("phase: mean/difference segmentation mismatch");
        SegmentForms f;
        f.t0 = m.t0;
        f.t1 = m.t1;
        f.trapped = m.trapped;
        f.vbar = m.velocity_form();
        f.dv = d.velocity_form();
        f.dz = d.position_form();
        f.zbar = m.position_form();
        if (m.trapped) {
            f.mean_off = m.offset_form();
            f.diff_off = d.offset_form();
        }
        forms.push_back(std::move(f));
    }
    return forms;
}

// Generalized differential density coefficients:
//   c1 (-vbar dv + g dz) + c2 g dz + c3 (zbar-zetabar)(dz-dzeta)
struct Coeffs {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    bool zero() const { return c1 == 0.0 && c2 == 0.0 && c3 == 0.0; }
};

// Weighted combination of internal-state programs: the differential uses
// {primary +1, reference -1}; a single realization uses {program +1}.
struct StateProfile {
    std::vector<std::pair<const LambdaProgram*, double>> terms;
    const AtomSpecies* species = nullptr;
    const ViolationModel* viol = nullptr;
    double dgamma2 = 0.0;

    Coeffs at(double t) const {
        double lam_sum = 0.0, beta_sum = 0.0;
        for (const auto& [prog, wgt] : terms) {
            const int lam = prog->at(t);
            lam_sum += wgt * lam;
            beta_sum += wgt * (lam > 0 ? viol->beta_b : viol->beta_a);
        }
        const double m = species->mass;
        return Coeffs{0.5 * species->mass_defect * lam_sum, m * beta_sum,
                      0.5 * m * dgamma2 * lam_sum};
    }

    std::vector<double> cuts(double a, double b) const {
        std::vector<double> out;
        for (const auto& [prog, wgt] : terms)
            for (double tf : prog->flip_times)
                if (tf > a && tf < b) out.push_back(tf);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

TrigPoly assemble_direct(const SegmentForms& f, const Coeffs& cf, double g) {
    TrigPoly d = TrigPoly::poly({});
    if (cf.c1 != 0.0) d = d + f.vbar.mul(f.dv) * (-cf.c1) + f.dz * (cf.c1 * g);
    if (cf.c2 != 0.0) d = d + f.dz * (cf.c2 * g);
    if (cf.c3 != 0.0 && f.trapped) d = d + f.mean_off.mul(f.diff_off) * cf.c3;
    return d;
}

TrigPoly assemble_reduced(const SegmentForms& f, const Coeffs& cf, double g, double gamma) {
    TrigPoly d = TrigPoly::poly({});
    if (cf.c1 != 0.0 && f.trapped)
        d = d + f.mean_off.mul(f.dz) * (-cf.c1 * gamma * gamma);
    if (cf.c2 != 0.0) d = d + f.dz * (cf.c2 * g);
    if (cf.c3 != 0.0 && f.trapped) d = d + f.mean_off.mul(f.diff_off) * cf.c3;
    return d;
}

using Assembler = TrigPoly (*)(const SegmentForms&, const Coeffs&, double);

double integrate_profile(const std::vector<SegmentForms>& forms, double w0, double w1,
                         const StateProfile& prof, double g, double gamma,
                         const Integrator& integ, bool reduced) {
    NeumaierSum sum;
    for (const auto& f : forms) {
        const double lo = std::max(w0, f.t0), hi = std::min(w1, f.t1);
        if (!(lo < hi)) continue;
        std::vector<double> cuts{lo};
        for (double c : prof.cuts(lo, hi)) cuts.push_back(c);
        cuts.push_back(hi);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const Coeffs cf = prof.at(cuts[i]);
            if (cf.zero()) continue;
            const TrigPoly dens = reduced ? assemble_reduced(f, cf, g, gamma)
                                          : assemble_direct(f, cf, g);
            sum.add(integ(dens, cuts[i] - f.t0, cuts[i + 1] - f.t0));
        }
    }
    return sum.value();
}

// Union of both branches' kicks keyed by exact time.
struct MergedKick {
    double dp_mean = 0.0, dp_diff = 0.0;
    double dv_mean = 0.0, dv_diff = 0.0;
    double laser_diff = 0.0;
};

std::map<double, MergedKick> merged_kicks(const GeometrySpec& spec) {
    std::map<double, MergedKick> out;
    for (const auto& k : spec.upper.kicks) {
        MergedKick& m = out[k.t];
        m.dp_mean += 0.5 * k.dp;
        m.dp_diff += k.dp;
        m.dv_mean += 0.5 * k.dv;
        m.dv_diff += k.dv;
        m.laser_diff += k.laser_phase;
    }
    for (const auto& k : spec.lower.kicks) {
        MergedKick& m = out[k.t];
        m.dp_mean += 0.5 * k.dp;
        m.dp_diff -= k.dp;
        m.dv_mean += 0.5 * k.dv;
        m.dv_diff -= k.dv;
        m.laser_diff -= k.laser_phase;
    }
    return out;
}

// Sum over velocity-transfer events of -c1 (dv_mean dz + dv_diff zbar).
double discrete_dv_terms(const GeometrySpec& spec, const PairKinematics& pair,
                         const StateProfile& prof, double w0, double w1) {
    NeumaierSum sum;
    for (const auto& [t, k] : merged_kicks(spec)) {
        if (k.dv_mean == 0.0 && k.dv_diff == 0.0) continue;
        if (t < w0 || t >= w1) continue;
        const Coeffs cf = prof.at(t);
        if (cf.c1 == 0.0) continue;
        sum.add(-cf.c1 * (k.dv_mean * pair.diff.z(t) + k.dv_diff * pair.mean.z(t)));
    }
    return sum.value();
}

double v_before(const BranchTrajectory& traj, double t) {
    if (t == traj.t_final) return traj.v_pre_final();
    const std::size_t i = traj.segment_index(t);
    if (i > 0 && traj.segments[i].t0 == t) return traj.segments[i - 1].v(t);
    return traj.segments[i].v(t);
}

int lambda_before(const LambdaProgram& prog, double t) {
    int lam = prog.lambda0;
    for (double tf : prog.flip_times)
        if (tf < t) lam = -lam;
    return lam;
}

PartialIntegration partial_route(const GeometrySpec& spec, const PairKinematics& pair,
                                 const std::vector<SegmentForms>& forms,
                                 const StateProfile& prof, const Integrator& integ) {
    const double w0 = spec.window_begin, w1 = spec.window_end;
    const double m = spec.species.mass;
    const double half_dm = 0.5 * spec.species.mass_defect;

    PartialIntegration out;

    double lam_w0 = 0.0, lam_w1 = 0.0;
    for (const auto& [prog, wgt] : prof.terms) {
        lam_w0 += wgt * prog->at(w0);
        lam_w1 += wgt * lambda_before(*prog, w1);
    }
    NeumaierSum bnd;
    bnd.add((half_dm / kHbar) * lam_w1 * v_before(pair.mean, w1) * pair.diff.z(w1));
    bnd.add(-(half_dm / kHbar) * lam_w0 * pair.mean.v(w0) * pair.diff.z(w0));
    for (const auto& [prog, wgt] : prof.terms)
        for (const auto& [tf, jump] : prog->jumps_in(w0, w1))
            bnd.add(-(half_dm / kHbar) * wgt * jump * pair.mean.v(tf) * pair.diff.z(tf));
    out.boundary = bnd.value();

    NeumaierSum red;
    for (const auto& [t, k] : merged_kicks(spec)) {
        if (t < w0 || t >= w1) continue;
        const Coeffs cf = prof.at(t);
        if (cf.c1 == 0.0) continue;
        if (k.dp_mean != 0.0) red.add(cf.c1 * (k.dp_mean / m) * pair.diff.z(t));
        if (k.dv_diff != 0.0) red.add(-cf.c1 * k.dv_diff * pair.mean.z(t));
    }
    red.add(integrate_profile(forms, w0, w1, prof, spec.env.g, spec.trap.gamma, integ,
                              /*reduced=*/true));
    out.reduced = -red.value() / kHbar;
    return out;
}

double direct_differential(const GeometrySpec& spec, const PairKinematics& pair,
                           const std::vector<SegmentForms>& forms, const StateProfile& prof,
                           const Integrator& integ) {
    const double integral = integrate_profile(forms, spec.window_begin, spec.window_end,
                                              prof, spec.env.g, spec.trap.gamma, integ,
                                              /*reduced=*/false);
    const double discrete =
        discrete_dv_terms(spec, pair, prof, spec.window_begin, spec.window_end);
    return -(integral + discrete) / kHbar;
}

StateProfile differential_profile(const GeometrySpec& spec) {
    return StateProfile{{{&spec.primary, +1.0}, {&spec.reference, -1.0}},
                        &spec.species,
                        &spec.violation,
                        spec.trap.dgamma2};
}

StateProfile single_profile(const GeometrySpec& spec, const LambdaProgram& prog) {
    return StateProfile{{{&prog, +1.0}}, &spec.species, &spec.violation, spec.trap.dgamma2};
}

// Motion part of one clock branch: the internal-state difference of H along
// this branch, without the rest-energy term.
double clock_branch_motion(const GeometrySpec& spec, const BranchProgram& program,
                           const BranchTrajectory& traj, const Integrator& integ) {
    const double dm = spec.species.mass_defect;
    const double m = spec.species.mass;
    const double g = spec.env.g;
    const double w0 = spec.window_begin, w1 = spec.window_end;

    NeumaierSum sum;
    for (const auto& s : traj.segments) {
        const double lo = std::max(w0, s.t0), hi = std::min(w1, s.t1);
        if (!(lo < hi)) continue;
        const TrigPoly vel = s.velocity_form();
        TrigPoly dens = vel.mul(vel) * (-0.5 * dm) +
                        s.position_form() * ((dm + m * spec.violation.dbeta()) * g);
        if (s.trapped && spec.trap.dgamma2 != 0.0) {
            const TrigPoly off = s.offset_form();
            dens = dens + off.mul(off) * (0.5 * m * spec.trap.dgamma2);
        }
        sum.add(integ(dens, lo - s.t0, hi - s.t0));
    }
    for (const auto& k : program.kicks)
        if (k.dv != 0.0 && k.t >= w0 && k.t < w1) sum.add(-dm * k.dv * traj.z(k.t));
    return -sum.value() / kHbar;
}

double clock_delta_tau(const GeometrySpec& spec, const std::vector<SegmentForms>& forms,
                       const Integrator& integ) {
    NeumaierSum sum;
    for (const auto& f : forms) {
        const double lo = std::max(spec.window_begin, f.t0);
        const double hi = std::min(spec.window_end, f.t1);
        if (!(lo < hi)) continue;
        const TrigPoly dens =
            f.vbar.mul(f.dv) * (-1.0 / kCSquared) + f.dz * (spec.env.g / kCSquared);
        sum.add(integ(dens, lo - f.t0, hi - f.t0));
    }
    return sum.value();
}

double action_phase(const GeometrySpec& spec, const PairKinematics& pair,
                    const std::vector<SegmentForms>& forms, const Integrator& integ) {
    const double m = spec.species.mass;
    const double gamma = spec.trap.gamma;
    NeumaierSum sum;
    for (const auto& f : forms) {
        TrigPoly lag = f.vbar.mul(f.dv) * m + f.dz * (-m * spec.env.g);
        if (f.trapped) lag = lag + f.mean_off.mul(f.diff_off) * (-m * gamma * gamma);
        sum.add(integ(lag, 0.0, f.t1 - f.t0));
    }
    NeumaierSum laser;
    for (const auto& [t, k] : merged_kicks(spec)) {
        const double dz = pair.diff.z(t), zbar = pair.mean.z(t);
        sum.add(k.dp_mean * dz + k.dp_diff * zbar);
        sum.add(m * (k.dv_mean * dz + k.dv_diff * zbar));
        laser.add(k.laser_diff);
    }
    return sum.value() / kHbar + laser.value();
}

ClockWavePacketMode branch_wp_mode(const GeometrySpec& spec, const BranchProgram& program,
                                   double* release_time) {
    const double w0 = spec.window_begin, w1 = spec.window_end;
    if (program.traps.empty()) return ClockWavePacketMode::released;
    if (program.traps.size() == 1) {
        const auto& tw = program.traps.front();
        if (tw.t_on <= w0 && tw.t_off >= w1) return ClockWavePacketMode::trapped;
        if (tw.t_on <= w0 && tw.t_off < w1) {
            *release_time = tw.t_off;
            return ClockWavePacketMode::piecewise;
        }
    }
    throw ValidationError("wavepacket: unsupported confinement pattern for clock branch");
}

}  // namespace

double wavepacket_phase_clock(const AtomSpecies& species, const TrapSpec& trap,
                              ClockWavePacketMode mode, double duration,
                              const WavePacketSpec& wp, bool allow_piecewise,
                              double release_time, Warnings* warnings) {
    if (!(duration > 0.0)) throw ValidationError("wavepacket: duration must be positive");
    if (!(wp.var_z > 0.0) || !(wp.var_p > 0.0))
        throw ValidationError("wavepacket: moments not set");
    const double m = species.mass;
    const double ratio = species.defect_ratio();

    switch (mode) {
        case ClockWavePacketMode::released:
            return ratio * wp.var_p * duration / (2.0 * kHbar * m);
        case ClockWavePacketMode::trapped: {
            if (!trap.active())
                throw ValidationError("wavepacket: trapped mode needs gamma > 0");
            if (std::sqrt(std::abs(trap.dgamma2)) >= std::sqrt(trap.gamma / duration))
                add_warning(warnings, "wavepacket_validity",
                            "state-dependent trap frequency shift too large for the "
                            "perturbative wave-packet phase: sqrt(|dgamma2|) >= "
                            "sqrt(gamma/duration)");
            const double x = trap.gamma * duration;
            const double s2 = std::sin(2.0 * x);
            const double rel = trap.dgamma2 / (trap.gamma * trap.gamma);
            const double phi_zz = ratio * (0.25 * x - s2 / 8.0) - rel * (0.25 * x + s2 / 8.0);
            const double phi_pp = ratio * (0.25 * x + s2 / 8.0) - rel * (0.25 * x - s2 / 8.0);
            return (m * trap.gamma * wp.var_z / kHbar) * phi_zz +
                   (wp.var_p / (kHbar * m * trap.gamma)) * phi_pp;
        }
        case ClockWavePacketMode::piecewise: {
            if (!allow_piecewise)
                throw ValidationError(
                    "wavepacket: piecewise trap-then-release composition is experimental; "
                    "enable it explicitly");
            if (!(release_time > 0.0) || !(release_time < duration))
                throw ValidationError("wavepacket: release time outside (0, duration)");
            add_warning(warnings, "wavepacket_piecewise",
                        "piecewise wave-packet composition freezes the moments at the "
                        "release; exact only for stationary in-trap states");
            const double trapped_part = wavepacket_phase_clock(
                species, trap, ClockWavePacketMode::trapped, release_time, wp, false, 0.0,
                warnings);
            const double released_part = wavepacket_phase_clock(
                species, trap, ClockWavePacketMode::released, duration - release_time, wp,
                false, 0.0, warnings);
            return trapped_part + released_part;
        }
    }
    throw ValidationError("wavepacket: unknown mode");
}

double wavepacket_phase_interferometer(const GeometrySpec& spec) {
    if (spec.mode != MeasurementMode::state_differential)
        throw ValidationError("wavepacket: interferometer phase needs state mode");
    const ClosureReport rep = closure_check(spec);
    if (!rep.closed)
        throw ValidationError(
            "wavepacket: interferometer does not close; wave-packet phase undefined");
    return 0.0;
}

ProperTime proper_time(const BranchTrajectory& traj, double a, double b, double g,
                       const EvalOptions& opts) {
    if (!(a <= b)) throw ValidationError("proper_time: window reversed");
    const Integrator integ{opts.quadrature, opts.quad_tol};
    ProperTime pt;
    pt.lab = b - a;
    NeumaierSum sum;
    for (const auto& s : traj.segments) {
        const double lo = std::max(a, s.t0), hi = std::min(b, s.t1);
        if (!(lo < hi)) continue;
        const TrigPoly vel = s.velocity_form();
        const TrigPoly dens =
            vel.mul(vel) * (-0.5 / kCSquared) + s.position_form() * (g / kCSquared);
        sum.add(integ(dens, lo - s.t0, hi - s.t0));
    }
    pt.correction = sum.value();
    return pt;
}

double phase_dynamical_differential(const GeometrySpec& spec, const EvalOptions& opts) {
    spec.validate();
    const PairKinematics pair = make_pair_kinematics(
        spec.upper, spec.lower, spec.species.mass, spec.env.g, spec.trap.gamma, spec.t_final);
    const auto forms = pair_forms(pair);
    const Integrator integ{opts.quadrature, opts.quad_tol};
    const StateProfile prof = differential_profile(spec);
    return direct_differential(spec, pair, forms, prof, integ);
}

PartialIntegration phase_partial_integration(const GeometrySpec& spec,
                                             const EvalOptions& opts) {
    spec.validate();
    const PairKinematics pair = make_pair_kinematics(
        spec.upper, spec.lower, spec.species.mass, spec.env.g, spec.trap.gamma, spec.t_final);
    const auto forms = pair_forms(pair);
    const Integrator integ{opts.quadrature, opts.quad_tol};
    const StateProfile prof = differential_profile(spec);
    return partial_route(spec, pair, forms, prof, integ);
}

double unperturbed_phase(const GeometrySpec& spec, const EvalOptions& opts) {
    spec.validate();
    if (spec.mode != MeasurementMode::state_differential)
        throw ValidationError("phi0: defined for interferometer modes");
    const PairKinematics pair = make_pair_kinematics(
        spec.upper, spec.lower, spec.species.mass, spec.env.g, spec.trap.gamma, spec.t_final);
    const auto forms = pair_forms(pair);
    const Integrator integ{opts.quadrature, opts.quad_tol};
    return action_phase(spec, pair, forms, integ);
}

PhaseResult compute_phases(const GeometrySpec& spec, const EvalOptions& opts) {
    spec.validate();
    PhaseResult res;
    res.mode = spec.mode;

    const PairKinematics pair = make_pair_kinematics(
        spec.upper, spec.lower, spec.species.mass, spec.env.g, spec.trap.gamma, spec.t_final);
    const auto forms = pair_forms(pair);
    const Integrator integ{opts.quadrature, opts.quad_tol};
    const StateProfile dprof = differential_profile(spec);

    res.differential = direct_differential(spec, pair, forms, dprof, integ);
    res.partial = partial_route(spec, pair, forms, dprof, integ);
    res.virial_residual = std::abs(res.differential - res.partial.total());
    res.virial_scale = std::max({std::abs(res.differential), std::abs(res.partial.boundary),
                                 std::abs(res.partial.reduced)});
    res.redshift_area =
        spec.red_multiplier *
        integrate_position(pair.diff, spec.red_window_begin, spec.red_window_end);
    res.closure = closure_check(spec, pair);

    const double duration = spec.window_end - spec.window_begin;

    if (spec.mode == MeasurementMode::clock_differential) {
        const double omega = spec.species.omega();
        for (int side = 0; side < 2; ++side) {
            PhaseBreakdown& bd = side == 0 ? res.primary : res.reference;
            const BranchProgram& prog = side == 0 ? spec.upper : spec.lower;
            const BranchTrajectory& traj = side == 0 ? pair.upper : pair.lower;
            bd.dyn_internal = -omega * duration;
            bd.dyn_motion = clock_branch_motion(spec, prog, traj, integ);
            const ProperTime pt =
                proper_time(traj, spec.window_begin, spec.window_end, spec.env.g, opts);
            bd.proper_lab = pt.lab;
            bd.proper_correction = pt.correction;
            if (opts.wavepacket) {
                double release = 0.0;
                const ClockWavePacketMode mode = branch_wp_mode(spec, prog, &release);
                bd.wavepacket = wavepacket_phase_clock(
                    spec.species, spec.trap, mode, duration, *opts.wavepacket,
                    opts.wavepacket_piecewise, release, &res.warnings);
            }
        }
        res.delta_tau = clock_delta_tau(spec, forms, integ);
    } else {
        res.phi0 = action_phase(spec, pair, forms, integ);
        for (int side = 0; side < 2; ++side) {
            PhaseBreakdown& bd = side == 0 ? res.primary : res.reference;
            const LambdaProgram& prog = side == 0 ? spec.primary : spec.reference;
            const StateProfile sprof = single_profile(spec, prog);
            const double integral =
                integrate_profile(forms, spec.window_begin, spec.window_end, sprof,
                                  spec.env.g, spec.trap.gamma, integ, /*reduced=*/false);
            const double discrete = discrete_dv_terms(spec, pair, sprof, spec.window_begin,
                                                      spec.window_end);
            bd.phi0 = res.phi0;
            bd.dyn_motion = -(integral + discrete) / kHbar;
            bd.proper_lab = duration;
        }
        if (!res.closure.closed)
            add_warning(&res.warnings, "open_interferometer",
                        "branches do not overlap at t_final; contrast and wave-packet "
                        "phase are undefined");
    }
    return res;
}

double differential_phase(const PhaseResult& result) {
    if (result.primary.wavepacket != result.reference.wavepacket)
        throw ValidationError(
            "differential: wave-packet phases do not cancel between the two sides");
    if (result.primary.phi0 != result.reference.phi0)
        throw ValidationError("differential: phi0 does not cancel between the two sides");
    const double by_components =
        (result.primary.dyn_internal - result.reference.dyn_internal) +
        (result.primary.dyn_motion - result.reference.dyn_motion);
    const double scale =
        std::max({std::abs(result.primary.dyn_motion), std::abs(result.reference.dyn_motion),
                  std::abs(result.differential)});
    if (std::abs(by_components - result.differential) > 1e-6 * scale + 1e-300)
        throw NumericalError("differential: side breakdowns disagree with the pair route");
    return result.differential;
}

double differential_phase_ode(const GeometrySpec& spec, double rel_tol) {
    spec.validate();
    const double m = spec.species.mass;
    const double g = spec.env.g;
    const double gamma = spec.trap.gamma;
    const StateProfile prof = differential_profile(spec);

    auto center_at = [](const BranchProgram& p, double t, bool* inside) -> double {
        for (const auto& w : p.traps)
            if (t >= w.t_on && t < w.t_off) {
                *inside = true;
                return w.center.eval(t);
            }
        *inside = false;
        return 0.0;
    };

    const PairDensity rate = [&spec, &prof, g, &center_at](double t, double zu, double vu,
                                                           double zl, double vl) {
        const Coeffs cf = prof.at(t);
        const double zbar = 0.5 * (zu + zl), dz = zu - zl;
        const double vbar = 0.5 * (vu + vl), dv = vu - vl;
        double d = cf.c1 * (-vbar * dv + g * dz) + cf.c2 * g * dz;
        if (cf.c3 != 0.0) {
            bool in_u = false, in_l = false;
            const double cu = center_at(spec.upper, t, &in_u);
            const double cl = center_at(spec.lower, t, &in_l);
            if (in_u && in_l) {
                const double cbar = 0.5 * (cu + cl), dc = cu - cl;
                d += cf.c3 * (zbar - cbar) * (dz - dc);
            }
        }
        return -d / kHbar;
    };

    OdeOptions oopts;
    oopts.rel_tol = rel_tol;
    oopts.abs_tol = rel_tol * 1e-2;
    const std::vector<double> vals = integrate_pair_density_ode(
        spec.upper, spec.lower, m, g, gamma, spec.t_final, spec.window_begin,
        spec.window_end, {rate}, oopts);
    double phi = vals.front();

    for (const auto& [t, k] : merged_kicks(spec)) {
        if ((k.dv_mean == 0.0 && k.dv_diff == 0.0) || t < spec.window_begin ||
            t >= spec.window_end)
            continue;
        const Coeffs cf = prof.at(t);
        if (cf.c1 == 0.0) continue;
        const auto su = sample_branch_ode(spec.upper, m, g, gamma, spec.t_final, {t}, oopts);
        const auto sl = sample_branch_ode(spec.lower, m, g, gamma, spec.t_final, {t}, oopts);
        const double dz = su.front().z - sl.front().z;
        const double zbar = 0.5 * (su.front().z + sl.front().z);
        phi += cf.c1 * (k.dv_mean * dz + k.dv_diff * zbar) / kHbar;
    }
    return phi;
}

}  // namespace intphase
