#include "intphase/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace intphase {

namespace {

// Polynomial particular solution of z'' + w^2 z = -g + w^2 zeta(tau) for a
// polynomial center piece, solved top-down in the coefficients.
Poly trap_particular(const Poly& center, double g, double w) {
    const double inv_w2 = 1.0 / (w * w);
    Poly d;
    for (int n = Poly::kMaxDeg; n >= 0; --n) {
        double dn = center.c[n];
        if (n == 0) dn -= g * inv_w2;
        if (n + 2 <= Poly::kMaxDeg)
            dn -= (n + 1.0) * (n + 2.0) * d.c[n + 2] * inv_w2;
        d.c[n] = dn;
    }
    return d;
}

Segment make_ballistic_segment(double t0, double t1, double z, double v, double g) {
    Segment s;
    s.t0 = t0;
    s.t1 = t1;
    s.pos = Poly{z, v, -0.5 * g};
    return s;
}

Segment make_trap_segment(double t0, double t1, double z, double v, double g, double w,
                          const Poly& center_local) {
    Segment s;
    s.t0 = t0;
    s.t1 = t1;
    s.w = w;
    s.trapped = true;
    s.center = center_local;
    s.pos = trap_particular(center_local, g, w);
    s.A = z - s.pos.eval(0.0);
    s.B = (v - s.pos.derivative().eval(0.0)) / w;
    return s;
}

std::vector<Kick> coalesced_kicks(const std::vector<Kick>& kicks, bool allow) {
    std::vector<Kick> sorted = kicks;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Kick& a, const Kick& b) { return a.t < b.t; });
    std::vector<Kick> out;
    for (const auto& k : sorted) {
        if (!out.empty() && out.back().t == k.t) {
            if (!allow)
                throw ValidationError("trajectory: simultaneous kicks at t = " +
                                      std::to_string(k.t) +
                                      " (set coalesce_kicks to merge)");
            out.back().dp += k.dp;
            out.back().dv += k.dv;
            out.back().laser_phase += k.laser_phase;
        } else {
            out.push_back(k);
        }
    }
    return out;
}

}  // namespace

void BranchProgram::validate(double t_final) const {
    if (!(t_final > 0.0))
        throw ValidationError("trajectory: t_final must be positive");
    for (const auto& k : kicks)
        if (k.t < 0.0 || k.t > t_final)
            throw ValidationError("trajectory: kick outside [0, t_final]");
    double prev_off = 0.0;
    bool first = true;
    for (const auto& w : traps) {
        if (!(w.t_on < w.t_off))
            throw ValidationError("trajectory: trap window must have t_on < t_off");
        if (w.t_on < 0.0 || w.t_off > t_final)
            throw ValidationError("trajectory: trap window outside [0, t_final]");
        if (!first && w.t_on < prev_off)
            throw ValidationError("trajectory: overlapping trap windows");
        w.center.validate();
        if (w.center.t_begin() > w.t_on || w.center.t_end() < w.t_off)
            throw ValidationError("trajectory: trap center does not cover its window");
        prev_off = w.t_off;
        first = false;
    }
    coalesced_kicks(kicks, coalesce_kicks);
}

double Segment::z(double t) const {
    const double tau = t - t0;
    double r = pos.eval(tau);
    if (trapped) r += A * std::cos(w * tau) + B * std::sin(w * tau);
    return r;
}

double Segment::v(double t) const {
    const double tau = t - t0;
    double r = pos.derivative().eval(tau);
    if (trapped) r += w * (-A * std::sin(w * tau) + B * std::cos(w * tau));
    return r;
}

TrigPoly Segment::position_form() const {
    if (!trapped) return TrigPoly::poly(pos);
    return TrigPoly::harmonic(w, pos, Poly::constant(A), Poly::constant(B));
}

TrigPoly Segment::velocity_form() const {
    if (!trapped) return TrigPoly::poly(pos.derivative());
    return TrigPoly::harmonic(w, pos.derivative(), Poly::constant(B * w),
                              Poly::constant(-A * w));
}

TrigPoly Segment::offset_form() const {
    if (!trapped)
        throw ValidationError("trajectory: offset form on a ballistic segment");
    return TrigPoly::harmonic(w, pos - center, Poly::constant(A), Poly::constant(B));
}

TrigPoly Segment::center_form() const {
    if (!trapped)
        throw ValidationError("trajectory: center form on a ballistic segment");
    return TrigPoly::poly(center);
}

std::size_t BranchTrajectory::segment_index(double t) const {
    if (segments.empty()) throw ValidationError("trajectory: empty");
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double x, const Segment& s) { return x < s.t0; });
    std::size_t i = (it == segments.begin()) ? 0
                                             : static_cast<std::size_t>(it - segments.begin()) - 1;
    return i;
}

double BranchTrajectory::z(double t) const { return segments[segment_index(t)].z(t); }

double BranchTrajectory::v(double t) const {
    if (t == t_final) return v_end;
    return segments[segment_index(t)].v(t);
}

double BranchTrajectory::v_pre_final() const { return segments.back().v(t_final); }

BranchTrajectory propagate_branch(const BranchProgram& program, double mass, double g,
                                  double gamma, double t_final) {
    if (!(mass > 0.0)) throw ValidationError("trajectory: mass must be positive");
    program.validate(t_final);
    if (!program.traps.empty() && !(gamma > 0.0))
        throw ValidationError("trajectory: trap windows need gamma > 0");

    const std::vector<Kick> kicks = coalesced_kicks(program.kicks, program.coalesce_kicks);

    std::vector<double> bounds{0.0, t_final};
    for (const auto& k : kicks)
        if (k.t > 0.0 && k.t < t_final) bounds.push_back(k.t);
    for (const auto& w : program.traps) {
        if (w.t_on > 0.0 && w.t_on < t_final) bounds.push_back(w.t_on);
        if (w.t_off > 0.0 && w.t_off < t_final) bounds.push_back(w.t_off);
        for (double kn : w.center.knots)
            if (kn > w.t_on && kn < w.t_off) bounds.push_back(kn);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    BranchTrajectory traj;
    traj.t_final = t_final;
    traj.segments.reserve(bounds.size());

    double z = program.z0;
    double v = program.v0;
    std::size_t ik = 0;
    while (ik < kicks.size() && kicks[ik].t == 0.0) {
        v += kicks[ik].dp / mass + kicks[ik].dv;
        ++ik;
    }

    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        const double ta = bounds[i], tb = bounds[i + 1];
        const TrapWindow* win = nullptr;
        for (const auto& w : program.traps)
            if (w.t_on <= ta && tb <= w.t_off) {
                win = &w;
                break;
            }
        Segment seg;
        if (win) {
            const std::size_t ci = win->center.piece_index(ta);
            const Poly local = win->center.pieces[ci].shifted(ta - win->center.knots[ci]);
            seg = make_trap_segment(ta, tb, z, v, g, gamma, local);
        } else {
            seg = make_ballistic_segment(ta, tb, z, v, g);
        }
        z = seg.z(tb);
        v = seg.v(tb);
        traj.segments.push_back(seg);
        while (ik < kicks.size() && kicks[ik].t == tb) {
            v += kicks[ik].dp / mass + kicks[ik].dv;
            ++ik;
        }
    }
    traj.z_end = z;
    traj.v_end = v;
    return traj;
}

BranchTrajectory solve_ballistic(double z0, double v0, const std::vector<Kick>& kicks,
                                 double mass, double g, double t_final) {
    BranchProgram p;
    p.z0 = z0;
    p.v0 = v0;
    p.kicks = kicks;
    return propagate_branch(p, mass, g, 0.0, t_final);
}

BranchTrajectory solve_trap_exact(double z0, double v0, const PiecewisePoly& center,
                                  double gamma, double g, double t_final) {
    BranchProgram p;
    p.z0 = z0;
    p.v0 = v0;
    p.traps.push_back(TrapWindow{0.0, t_final, center});
    return propagate_branch(p, 1.0, g, gamma, t_final);
}

BranchTrajectory solve_trap_expansion(const PiecewisePoly& center, double gamma, double g,
                                      double t_final, int order) {
    if (order < 0 || order > 3)
        throw ValidationError("trajectory: unsupported expansion order " +
                              std::to_string(order) + " (max 3)");
    if (!(gamma > 0.0)) throw ValidationError("trajectory: expansion needs gamma > 0");
    center.validate();
    if (center.t_begin() > 0.0 || center.t_end() < t_final)
        throw ValidationError("trajectory: trap center does not cover [0, t_final]");

    const double inv_g2 = 1.0 / (gamma * gamma);
    const Poly first = center.pieces.front();
    const double acc0 = first.derivative().derivative().eval(0.0);
    const double jerk0 = first.derivative().derivative().derivative().eval(0.0);
    const double P = order >= 2 ? acc0 * inv_g2 : 0.0;
    const double Q = order >= 3 ? jerk0 * inv_g2 / gamma : 0.0;

    BranchTrajectory traj;
    traj.t_final = t_final;
    for (std::size_t i = 0; i + 1 < center.knots.size(); ++i) {
        const double ta = std::max(center.knots[i], 0.0);
        const double tb = std::min(center.knots[i + 1], t_final);
        if (!(ta < tb)) continue;
        const Poly local = center.pieces[i].shifted(ta - center.knots[i]);
        Segment s;
        s.t0 = ta;
        s.t1 = tb;
        s.w = gamma;
        s.trapped = true;
        s.center = local;
        s.pos = local;
        if (order >= 2)
            s.pos = local - (local.derivative().derivative() + Poly::constant(g)) * inv_g2;
        const double cw = std::cos(gamma * ta), sw = std::sin(gamma * ta);
        s.A = P * cw + Q * sw;
        s.B = -P * sw + Q * cw;
        traj.segments.push_back(s);
    }
    traj.z_end = traj.segments.back().z(t_final);
    traj.v_end = traj.segments.back().v(t_final);
    return traj;
}

namespace {

struct MergedKick {
    double dp_u = 0.0, dp_l = 0.0, dv_u = 0.0, dv_l = 0.0;
};

std::map<double, MergedKick> merge_kicks(const BranchProgram& u, const BranchProgram& l) {
    std::map<double, MergedKick> merged;
    for (const auto& k : coalesced_kicks(u.kicks, u.coalesce_kicks)) {
        merged[k.t].dp_u += k.dp;
        merged[k.t].dv_u += k.dv;
    }
    for (const auto& k : coalesced_kicks(l.kicks, l.coalesce_kicks)) {
        merged[k.t].dp_l += k.dp;
        merged[k.t].dv_l += k.dv;
    }
    return merged;
}

}  // namespace

PairKinematics make_pair_kinematics(const BranchProgram& upper, const BranchProgram& lower,
                                    double mass, double g, double gamma, double t_final) {
    if (upper.traps.size() != lower.traps.size())
        throw ValidationError("trajectory: pair kinematics needs matching trap windows");
    for (std::size_t i = 0; i < upper.traps.size(); ++i)
        if (upper.traps[i].t_on != lower.traps[i].t_on ||
            upper.traps[i].t_off != lower.traps[i].t_off)
            throw ValidationError("trajectory: pair kinematics needs matching trap windows");

    BranchProgram mean, diff;
    mean.coalesce_kicks = diff.coalesce_kicks = true;
    mean.z0 = 0.5 * (upper.z0 + lower.z0);
    mean.v0 = 0.5 * (upper.v0 + lower.v0);
    diff.z0 = upper.z0 - lower.z0;
    diff.v0 = upper.v0 - lower.v0;
    for (const auto& [t, k] : merge_kicks(upper, lower)) {
        mean.kicks.push_back(Kick{t, 0.5 * (k.dp_u + k.dp_l), 0.5 * (k.dv_u + k.dv_l), 0.0,
                                  KickTag::beam_splitter});
        diff.kicks.push_back(
            Kick{t, k.dp_u - k.dp_l, k.dv_u - k.dv_l, 0.0, KickTag::beam_splitter});
    }
    for (std::size_t i = 0; i < upper.traps.size(); ++i) {
        const auto& wu = upper.traps[i];
        const auto& wl = lower.traps[i];
        mean.traps.push_back(
            TrapWindow{wu.t_on, wu.t_off, pw_scale(pw_add(wu.center, wl.center), 0.5)});
        diff.traps.push_back(TrapWindow{wu.t_on, wu.t_off, pw_sub(wu.center, wl.center)});
    }

    PairKinematics pair;
    pair.mean = propagate_branch(mean, mass, g, gamma, t_final);
    pair.diff = propagate_branch(diff, mass, 0.0, gamma, t_final);
    pair.upper = propagate_branch(upper, mass, g, gamma, t_final);
    pair.lower = propagate_branch(lower, mass, g, gamma, t_final);
    return pair;
}

double integrate_position(const BranchTrajectory& traj, double a, double b) {
    if (!(a <= b)) throw ValidationError("trajectory: integration window reversed");
    double sum = 0.0, comp = 0.0;
    for (const auto& s : traj.segments) {
        const double lo = std::max(a, s.t0), hi = std::min(b, s.t1);
        if (!(lo < hi)) continue;
        const double part = s.position_form().integrate(lo - s.t0, hi - s.t0);
        const double y = part - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace intphase
