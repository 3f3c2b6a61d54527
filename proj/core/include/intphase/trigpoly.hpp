#pragma once

#include "intphase/piecewise.hpp"

namespace intphase {

// Closed-form integrable function of local time tau:
//   f(tau) = p0 + pc cos(w tau) + ps sin(w tau) + pc2 cos(2w tau) + ps2 sin(2w tau)
// with polynomial envelopes. Trajectories live in the first-harmonic subspace;
// quadratic phase densities populate the second harmonic. All integrals are
// evaluated with exact antiderivatives.
struct TrigPoly {
    double w = 0.0;  // base angular frequency; 0 means pure polynomial
    Poly p0, pc, ps, pc2, ps2;

    static TrigPoly poly(const Poly& p) { return TrigPoly{0.0, p, {}, {}, {}, {}}; }
    static TrigPoly harmonic(double w, const Poly& p0, const Poly& pc, const Poly& ps) {
        return TrigPoly{w, p0, pc, ps, {}, {}};
    }

    bool pure_poly() const {
        return pc.is_zero() && ps.is_zero() && pc2.is_zero() && ps2.is_zero();
    }
    bool first_order() const { return pc2.is_zero() && ps2.is_zero(); }

    double eval(double tau) const;

    TrigPoly operator+(const TrigPoly& o) const;
    TrigPoly operator-(const TrigPoly& o) const;
    TrigPoly operator*(double s) const;

    // Product of two first-harmonic forms (asserts both have empty second
    // harmonics and compatible frequencies).
    TrigPoly mul(const TrigPoly& o) const;

    // Exact integral over local time [a, b].
    double integrate(double a, double b) const;
};

// Exact integrals of p(tau) cos(w tau) and p(tau) sin(w tau) over [a, b], w != 0.
double integrate_poly_cos(const Poly& p, double w, double a, double b);
double integrate_poly_sin(const Poly& p, double w, double a, double b);

}  // namespace intphase
