#include "intphase/trigpoly.hpp"

#include <cmath>

namespace intphase {

namespace {

// Envelope pair for the antiderivatives
//   int p cos(w t) dt = S(t) sin(w t) + C(t) cos(w t)
//   int p sin(w t) dt = C(t) sin(w t) - S(t) cos(w t)
// with S = p/w - p''/w^3 + p''''/w^5 - ..., C = p'/w^2 - p'''/w^4 + ...
struct Envelopes {
    Poly s, c;
};

Envelopes envelopes(const Poly& p, double w) {
    Envelopes e;
    Poly d = p;
    double inv = 1.0 / w;
    double sign = 1.0;
    for (int k = 0; k <= Poly::kMaxDeg + 1; ++k) {
        if (d.is_zero()) break;
        if (k % 2 == 0)
            e.s = e.s + d * (sign * inv);
        else {
            e.c = e.c + d * (sign * inv);
            sign = -sign;
        }
        d = d.derivative();
        inv /= w;
    }
    return e;
}

double check_freq(double wa, double wb) {
    if (wa == 0.0) return wb;
    if (wb == 0.0 || wa == wb) return wa;
    throw ValidationError("trigpoly: mixing incompatible frequencies");
}

}  // namespace

double integrate_poly_cos(const Poly& p, double w, double a, double b) {
    const Envelopes e = envelopes(p, w);
    const double fb = e.s.eval(b) * std::sin(w * b) + e.c.eval(b) * std::cos(w * b);
    const double fa = e.s.eval(a) * std::sin(w * a) + e.c.eval(a) * std::cos(w * a);
    return fb - fa;
}

double integrate_poly_sin(const Poly& p, double w, double a, double b) {
    const Envelopes e = envelopes(p, w);
    const double fb = e.c.eval(b) * std::sin(w * b) - e.s.eval(b) * std::cos(w * b);
    const double fa = e.c.eval(a) * std::sin(w * a) - e.s.eval(a) * std::cos(w * a);
    return fb - fa;
}

double TrigPoly::eval(double tau) const {
    double r = p0.eval(tau);
    if (w != 0.0) {
        const double cw = std::cos(w * tau), sw = std::sin(w * tau);
        r += pc.eval(tau) * cw + ps.eval(tau) * sw;
        if (!pc2.is_zero() || !ps2.is_zero()) {
            const double c2 = std::cos(2.0 * w * tau), s2 = std::sin(2.0 * w * tau);
            r += pc2.eval(tau) * c2 + ps2.eval(tau) * s2;
        }
    }
    return r;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    TrigPoly r;
    r.w = check_freq(w, o.w);
    r.p0 = p0 + o.p0;
    r.pc = pc + o.pc;
    r.ps = ps + o.ps;
    r.pc2 = pc2 + o.pc2;
    r.ps2 = ps2 + o.ps2;
    return r;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
    return *this + o * -1.0;
}

TrigPoly TrigPoly::operator*(double s) const {
    TrigPoly r = *this;
    r.p0 = r.p0 * s;
    r.pc = r.pc * s;
    r.ps = r.ps * s;
    r.pc2 = r.pc2 * s;
    r.ps2 = r.ps2 * s;
    return r;
}

TrigPoly TrigPoly::mul(const TrigPoly& o) const {
    if (!first_order() || !o.first_order())
        throw ValidationError("trigpoly: product of second-harmonic forms unsupported");
    TrigPoly r;
    r.w = check_freq(w, o.w);
    r.p0 = p0 * o.p0 + (pc * o.pc + ps * o.ps) * 0.5;
    r.pc = p0 * o.pc + o.p0 * pc;
    r.ps = p0 * o.ps + o.p0 * ps;
    r.pc2 = (pc * o.pc - ps * o.ps) * 0.5;
    r.ps2 = (pc * o.ps + ps * o.pc) * 0.5;
    return r;
}

double TrigPoly::integrate(double a, double b) const {
    const Poly ip = p0.antiderivative();
    double r = ip.eval(b) - ip.eval(a);
    if (w != 0.0) {
        if (!pc.is_zero()) r += integrate_poly_cos(pc, w, a, b);
        if (!ps.is_zero()) r += integrate_poly_sin(ps, w, a, b);
        if (!pc2.is_zero()) r += integrate_poly_cos(pc2, 2.0 * w, a, b);
        if (!ps2.is_zero()) r += integrate_poly_sin(ps2, 2.0 * w, a, b);
    } else if (!pure_poly()) {
        throw ValidationError("trigpoly: harmonic envelopes with zero frequency");
    }
    return r;
}

}  // namespace intphase
