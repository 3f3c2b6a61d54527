#include "intphase/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace intphase {

namespace {

// Cash-Karp tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 3.0 / 10.0, kA42 = -9.0 / 10.0, kA43 = 6.0 / 5.0;
constexpr double kA51 = -11.0 / 54.0, kA52 = 5.0 / 2.0, kA53 = -70.0 / 27.0,
                 kA54 = 35.0 / 27.0;
constexpr double kA61 = 1631.0 / 55296.0, kA62 = 175.0 / 512.0, kA63 = 575.0 / 13824.0,
                 kA64 = 44275.0 / 110592.0, kA65 = 253.0 / 4096.0;
constexpr double kB1 = 37.0 / 378.0, kB3 = 250.0 / 621.0, kB4 = 125.0 / 594.0,
                 kB6 = 512.0 / 1771.0;
constexpr double kE1 = 37.0 / 378.0 - 2825.0 / 27648.0;
constexpr double kE3 = 250.0 / 621.0 - 18575.0 / 48384.0;
constexpr double kE4 = 125.0 / 594.0 - 13525.0 / 55296.0;
constexpr double kE5 = -277.0 / 14336.0;
constexpr double kE6 = 512.0 / 1771.0 - 1.0 / 4.0;

using Rhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

// Integrates y' = f(t, y) from ta to tb with no discontinuities inside.
void rk45_span(const Rhs& f, double ta, double tb, std::vector<double>& y,
               const OdeOptions& opts, long& steps) {
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), yt(n), y5(n);
    double t = ta;
    double h = (tb - ta) / 64.0;
    while (t < tb) {
        if (t + h > tb) h = tb - t;
        if (++steps > opts.max_steps)
            throw NumericalError("ode oracle: step budget exhausted");
        f(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * kA21 * k1[i];
        f(t + h / 5.0, yt, k2);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
        f(t + 3.0 * h / 10.0, yt, k3);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
        f(t + 3.0 * h / 5.0, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
        f(t + h, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] +
                                kA65 * k5[i]);
        f(t + 7.0 * h / 8.0, yt, k6);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y5[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB6 * k6[i]);
            const double ei = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                                   kE6 * k6[i]);
            const double sc = opts.abs_tol +
                              opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
        }
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (!(h > 0.0) || t + h == t)
            throw NumericalError("ode oracle: step size underflow");
    }
}

struct ProgramForce {
    const BranchProgram* program;
    double g = 0.0;
    double gamma = 0.0;

    double accel(double t, double z) const {
        double a = -g;
        for (const auto& w : program->traps) {
            if (t >= w.t_on && t < w.t_off) {
                a -= gamma * gamma * (z - w.center.eval(t));
                break;
            }
        }
        return a;
    }
};

std::vector<double> event_times(const BranchProgram& p, double t_final) {
    std::vector<double> ts{0.0, t_final};
    for (const auto& k : p.kicks)
        if (k.t > 0.0 && k.t < t_final) ts.push_back(k.t);
    for (const auto& w : p.traps) {
        if (w.t_on > 0.0 && w.t_on < t_final) ts.push_back(w.t_on);
        if (w.t_off > 0.0 && w.t_off < t_final) ts.push_back(w.t_off);
        for (double kn : w.center.knots)
            if (kn > w.t_on && kn < w.t_off) ts.push_back(kn);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

void apply_kicks_at(const BranchProgram& p, double mass, double t, double& v) {
    for (const auto& k : p.kicks)
        if (k.t == t) v += k.dp / mass + k.dv;
}

}  // namespace

OdeState integrate_branch_ode(const BranchProgram& program, double mass, double g,
                              double gamma, double t_final, const OdeOptions& opts) {
    const auto states = sample_branch_ode(program, mass, g, gamma, t_final, {t_final}, opts);
    return states.front();
}

std::vector<OdeState> sample_branch_ode(const BranchProgram& program, double mass, double g,
                                        double gamma, double t_final,
                                        const std::vector<double>& times,
                                        const OdeOptions& opts) {
    program.validate(t_final);
    ProgramForce force{&program, g, gamma};

    std::vector<double> stops = event_times(program, t_final);
    for (double t : times) {
        if (t < 0.0 || t > t_final)
            throw ValidationError("ode oracle: sample time outside [0, t_final]");
        if (t > 0.0 && t < t_final) stops.push_back(t);
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    const Rhs rhs = [&force](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[1];
        dy[1] = force.accel(t, y[0]);
    };

    std::vector<double> y{program.z0, program.v0};
    apply_kicks_at(program, mass, 0.0, y[1]);

    std::vector<OdeState> out(times.size());
    long steps = 0;
    auto record = [&](double t) {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] == t) out[i] = OdeState{y[0], y[1]};
    };
    record(0.0);
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        rk45_span(rhs, stops[i], stops[i + 1], y, opts, steps);
        apply_kicks_at(program, mass, stops[i + 1], y[1]);
        record(stops[i + 1]);
    }
    return out;
}

std::vector<double> integrate_pair_density_ode(const BranchProgram& upper,
                                               const BranchProgram& lower, double mass,
                                               double g, double gamma, double t_final,
                                               double a, double b,
                                               const std::vector<PairDensity>& densities,
                                               const OdeOptions& opts) {
    upper.validate(t_final);
    lower.validate(t_final);
    if (!(0.0 <= a && a <= b && b <= t_final))
        throw ValidationError("ode oracle: integration window outside [0, t_final]");

    ProgramForce fu{&upper, g, gamma};
    ProgramForce fl{&lower, g, gamma};
    const std::size_t nd = densities.size();

    std::vector<double> stops;
    for (double t : event_times(upper, t_final)) stops.push_back(t);
    for (double t : event_times(lower, t_final)) stops.push_back(t);
    stops.push_back(a);
    stops.push_back(b);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    const Rhs rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[1];
        dy[1] = fu.accel(t, y[0]);
        dy[2] = y[3];
        dy[3] = fl.accel(t, y[2]);
        const bool inside = t >= a && t <= b;
        for (std::size_t k = 0; k < nd; ++k)
            dy[4 + k] = inside ? densities[k](t, y[0], y[1], y[2], y[3]) : 0.0;
    };

    std::vector<double> y(4 + nd, 0.0);
    y[0] = upper.z0;
    y[1] = upper.v0;
    y[2] = lower.z0;
    y[3] = lower.v0;
    apply_kicks_at(upper, mass, 0.0, y[1]);
    apply_kicks_at(lower, mass, 0.0, y[3]);

    long steps = 0;
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        rk45_span(rhs, stops[i], stops[i + 1], y, opts, steps);
        apply_kicks_at(upper, mass, stops[i + 1], y[1]);
        apply_kicks_at(lower, mass, stops[i + 1], y[3]);
    }
    return std::vector<double>(y.begin() + 4, y.end());
}

}  // namespace intphase
