#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace evonf {

enum class MfShape { Bell, Gaussian };

/*
 * A parameterized fuzzy set on one variable.
 *
 * Both shapes live in the same three parameter slots so a genome can flip the
 * shape without re-dimensioning:
 *
 *   Bell:      degree(x) = 1 / (1 + |(x - r) / p|^(2q))   (p width, q slope, r center)
 *   Gaussian:  degree(x) = exp(-(x - mu)^2 / (2 sigma^2)) with mu = r slot, sigma = p slot
 *              (q slot carried but unused)
 *
 * p, q, sigma are clamped to kParamFloor at construction and after every
 * mutation/gradient step, so evaluation is total.
 */
struct MembershipFunction {
    static constexpr double kParamFloor = 1e-3;

    MfShape shape = MfShape::Bell;
    double p = 1.0; /* width (Bell) or sigma (Gaussian) */
    double q = 2.0; /* slope exponent (Bell); unused for Gaussian */
    double r = 0.0; /* center (Bell) or mu (Gaussian) */

    static MembershipFunction bell(double p, double q, double r) {
        MembershipFunction m;
        m.shape = MfShape::Bell;
        m.p = p;
        m.q = q;
        m.r = r;
        m.clamp_floors();
        return m;
    }

    static MembershipFunction gaussian(double mu, double sigma) {
        MembershipFunction m;
        m.shape = MfShape::Gaussian;
        m.p = sigma;
        m.r = mu;
        m.q = 0.0;
        m.clamp_floors();
        return m;
    }

    double center() const { return r; }
    double sigma() const { return p; }
    double mu() const { return r; }

    /* Restore positivity invariants (idempotent). */
    void clamp_floors() {
        if (p < kParamFloor) p = kParamFloor;
        if (shape == MfShape::Bell && q < kParamFloor) q = kParamFloor;
    }
};

/* Membership degree in [0, 1]. */
inline double mf_eval(const MembershipFunction& mf, double x) {
    if (mf.shape == MfShape::Bell) {
        const double u = std::fabs((x - mf.r) / mf.p);
        const double z = std::pow(u, 2.0 * mf.q);
        return 1.0 / (1.0 + z); /* z may overflow to inf -> degree 0 */
    }
    const double t = (x - mf.r) / mf.p;
    return std::exp(-0.5 * t * t);
}

/* Partial derivatives of the degree with respect to the parameter slots
 * (dp, dq, dr).  Conventions at non-smooth points:
 *   - Bell at x == r: all partials 0 (analytic limit for q > 1/2; the q
 *     partial's ln|u| term is likewise assigned its limit 0).
 *   - Saturated tails (degree underflow): 0.
 * Gaussian uses dp = d(degree)/d(sigma), dr = d(degree)/d(mu), dq = 0. */
struct MfGrad {
    double dp = 0.0, dq = 0.0, dr = 0.0;
};

inline MfGrad mf_grad(const MembershipFunction& mf, double x) {
    MfGrad g;
    if (mf.shape == MfShape::Bell) {
        const double d = x - mf.r;
        if (d == 0.0) return g;
        const double u = std::fabs(d / mf.p);
        const double z = std::pow(u, 2.0 * mf.q);
        if (!(z < 1e300)) return g; /* tail flat to double precision */
        const double deg = 1.0 / (1.0 + z);
        const double k = deg * deg; /* d(degree)/dz = -deg^2 */
        g.dp = k * 2.0 * mf.q * z / mf.p;   /* dz/dp = -2qz/p */
        g.dr = k * 2.0 * mf.q * z / d;      /* dz/dr = -2qz/(x-r) */
        if (z > 0.0) g.dq = -k * 2.0 * std::log(u) * z;
        return g;
    }
    const double c = mf.r, s = mf.p;
    const double deg = mf_eval(mf, x);
    g.dr = deg * (x - c) / (s * s);
    g.dp = deg * (x - c) * (x - c) / (s * s * s);
    return g;
}

} // namespace evonf
