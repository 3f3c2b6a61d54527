#include "intphase/piecewise.hpp"

#include <algorithm>
#include <cmath>

namespace intphase {

Poly Poly::antiderivative() const {
    if (c[kMaxDeg] != 0.0)
        throw ValidationError("poly: antiderivative would exceed capacity");
    Poly r;
    for (int i = 0; i < kMaxDeg; ++i) r.c[i + 1] = c[i] / (i + 1);
    return r;
}

Poly Poly::shifted(double dt) const {
    // p(s + dt) via Horner in s with polynomial coefficients.
    Poly r;
    for (int i = kMaxDeg; i >= 0; --i) {
        for (int j = kMaxDeg; j > 0; --j) r.c[j] = r.c[j] * dt + r.c[j - 1];
        r.c[0] = r.c[0] * dt + c[i];
    }
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    const int da = degree(), db = o.degree();
    if (da + db > kMaxDeg && !(is_zero() || o.is_zero()))
        throw ValidationError("poly: product exceeds capacity");
    Poly r;
    for (int i = 0; i <= da; ++i) {
        if (c[i] == 0.0) continue;
        for (int j = 0; j <= db; ++j) r.c[i + j] += c[i] * o.c[j];
    }
    return r;
}

std::size_t PiecewisePoly::piece_index(double t) const {
    if (empty()) throw ValidationError("piecewise: empty profile");
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    std::size_t i = (it == knots.begin()) ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
    if (i >= pieces.size()) i = pieces.size() - 1;
    return i;
}

double PiecewisePoly::eval(double t) const {
    const std::size_t i = piece_index(t);
    return pieces[i].eval(t - knots[i]);
}

double PiecewisePoly::deriv(double t) const {
    const std::size_t i = piece_index(t);
    return pieces[i].derivative().eval(t - knots[i]);
}

double PiecewisePoly::deriv2(double t) const {
    const std::size_t i = piece_index(t);
    return pieces[i].derivative().derivative().eval(t - knots[i]);
}

PiecewisePoly PiecewisePoly::derivative() const {
    PiecewisePoly d{knots, {}};
    d.pieces.reserve(pieces.size());
    for (const auto& p : pieces) d.pieces.push_back(p.derivative());
    return d;
}

void PiecewisePoly::validate() const {
    if (knots.size() != pieces.size() + 1 || pieces.empty())
        throw ValidationError("piecewise: knot/piece count mismatch");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw ValidationError("piecewise: knots must be strictly increasing");
}

PiecewisePoly pw_constant(double value, double t0, double t1) {
    if (!(t0 < t1)) throw ValidationError("piecewise: empty span");
    return PiecewisePoly{{t0, t1}, {Poly::constant(value)}};
}

PiecewisePoly pw_linear(const std::vector<double>& t, const std::vector<double>& value) {
    if (t.size() < 2 || t.size() != value.size())
        throw ValidationError("piecewise: need matching t/value lists with >= 2 points");
    PiecewisePoly p;
    p.knots = t;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double dt = t[i + 1] - t[i];
        if (!(dt > 0.0)) throw ValidationError("piecewise: knots must be strictly increasing");
        p.pieces.push_back(Poly{value[i], (value[i + 1] - value[i]) / dt});
    }
    return p;
}

namespace {

PiecewisePoly pw_combine(const PiecewisePoly& a, const PiecewisePoly& b, double sb) {
    a.validate();
    b.validate();
    if (a.t_begin() != b.t_begin() || a.t_end() != b.t_end())
        throw ValidationError("piecewise: combining profiles with different spans");
    std::vector<double> knots;
    knots.reserve(a.knots.size() + b.knots.size());
    std::merge(a.knots.begin(), a.knots.end(), b.knots.begin(), b.knots.end(),
               std::back_inserter(knots));
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    PiecewisePoly r;
    r.knots = knots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double t0 = knots[i];
        const std::size_t ia = a.piece_index(t0), ib = b.piece_index(t0);
        const Poly pa = a.pieces[ia].shifted(t0 - a.knots[ia]);
        const Poly pb = b.pieces[ib].shifted(t0 - b.knots[ib]);
        r.pieces.push_back(pa + pb * sb);
    }
    return r;
}

}  // namespace

PiecewisePoly pw_add(const PiecewisePoly& a, const PiecewisePoly& b) {
    return pw_combine(a, b, 1.0);
}

PiecewisePoly pw_sub(const PiecewisePoly& a, const PiecewisePoly& b) {
    return pw_combine(a, b, -1.0);
}

PiecewisePoly pw_scale(const PiecewisePoly& a, double s) {
    PiecewisePoly r = a;
    for (auto& p : r.pieces) p = p * s;
    return r;
}

}  // namespace intphase
