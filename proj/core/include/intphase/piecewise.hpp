#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "intphase/errors.hpp"

namespace intphase {

// Dense polynomial in a local time variable, fixed capacity. Degree 9 covers
// every product and antiderivative the phase engine forms (position forms are
// cubic at most).
struct Poly {
    static constexpr int kMaxDeg = 9;
    std::array<double, kMaxDeg + 1> c{};

    Poly() = default;
    Poly(std::initializer_list<double> coeffs) {
        int i = 0;
        for (double x : coeffs) {
            if (i > kMaxDeg) throw ValidationError("poly: too many coefficients");
            c[i++] = x;
        }
    }

    static Poly constant(double a) { return Poly{a}; }

    int degree() const {
        for (int i = kMaxDeg; i > 0; --i)
            if (c[i] != 0.0) return i;
        return 0;
    }

    bool is_zero() const {
        for (double x : c)
            if (x != 0.0) return false;
        return true;
    }

    double eval(double tau) const {
        double r = 0.0;
        for (int i = kMaxDeg; i >= 0; --i) r = r * tau + c[i];
        return r;
    }

    Poly derivative() const {
        Poly d;
        for (int i = 1; i <= kMaxDeg; ++i) d.c[i - 1] = c[i] * i;
        return d;
    }

    // Antiderivative with zero constant term.
    Poly antiderivative() const;

    // Same polynomial expressed in s = tau - dt, i.e. p(s + dt).
    Poly shifted(double dt) const;

    Poly operator+(const Poly& o) const {
        Poly r;
        for (int i = 0; i <= kMaxDeg; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    Poly operator-(const Poly& o) const {
        Poly r;
        for (int i = 0; i <= kMaxDeg; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    Poly operator*(double s) const {
        Poly r;
        for (int i = 0; i <= kMaxDeg; ++i) r.c[i] = c[i] * s;
        return r;
    }
    Poly operator*(const Poly& o) const;
    Poly operator-() const { return *this * -1.0; }
};

// Piecewise polynomial over global time. Piece i covers [knot[i], knot[i+1])
// in local time tau = t - knot[i]; the last piece is closed on the right.
struct PiecewisePoly {
    std::vector<double> knots;
    std::vector<Poly> pieces;

    bool empty() const { return pieces.empty(); }
    double t_begin() const { return knots.front(); }
    double t_end() const { return knots.back(); }

    std::size_t piece_index(double t) const;
    double eval(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;

    PiecewisePoly derivative() const;

    void validate() const;
};

// Constant profile over [t0, t1].
PiecewisePoly pw_constant(double value, double t0, double t1);

// Piecewise-linear interpolation through (t, value) points.
PiecewisePoly pw_linear(const std::vector<double>& t, const std::vector<double>& value);

// a + b with knots merged; both must cover the same span.
PiecewisePoly pw_add(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly pw_sub(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly pw_scale(const PiecewisePoly& a, double s);

}  // namespace intphase
