#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace evonf {

/* Admissible range for evolved operator-parameter genes.  The free functions
 * below accept any p > 0 (the t-norm limit checks probe p = 100); the gene
 * range just keeps a^(-p) comfortably inside double range during evolution. */
inline constexpr double kOpPMin = 1e-3;
inline constexpr double kOpPMax = 50.0;

/*
 * Fuzzy conjunction/disjunction parameters of one inference system.
 * fixed_min bypasses the parameterized family in favor of min/max.
 */
struct OperatorParams {
    double tnorm_p = 1.0;
    double tconorm_p = 1.0;
    bool fixed_min = false;

    void clamp() {
        tnorm_p = std::clamp(tnorm_p, kOpPMin, kOpPMax);
        tconorm_p = std::clamp(tconorm_p, kOpPMin, kOpPMax);
    }
};

/*
 * Schweizer-Sklar t-norm, positive-p branch:
 *
 *   T(a, b, p) = [max{0, a^(-p) + b^(-p) - 1}]^(-1/p)
 *
 * Limits: p -> 0 gives a*b, p -> inf gives min(a, b).  a or b exactly 0 would
 * need 0^(-p); the continuity limit 0 is returned instead.  1 is the identity
 * element and is returned exactly.
 */
inline double ss_tnorm(double a, double b, double p) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    if (a >= 1.0) return b;
    if (b >= 1.0) return a;
    const double s = std::pow(a, -p) + std::pow(b, -p) - 1.0;
    if (s <= 0.0) return 0.0; /* unreachable for p > 0 on [0,1]; kept for the max{0,.} contract */
    return std::pow(s, -1.0 / p);
}

/* De Morgan dual of ss_tnorm: S(a, b, p) = 1 - T(1-a, 1-b, p). */
inline double ss_tconorm(double a, double b, double p) {
    return 1.0 - ss_tnorm(1.0 - a, 1.0 - b, p);
}

/*
 * n-ary t-norm through the additive generator:
 *
 *   T(d_1, ..., d_n) = [sum_j d_j^(-p) - (n - 1)]^(-1/p)
 *
 * which is what iterating the binary form yields in exact arithmetic; doing
 * it in one shot costs one pow per element instead of two per fold step.
 * Degrees of exactly 0 shortcut to 0; a lone element is returned unchanged.
 */
inline double ss_tnorm_fold(const double* d, std::size_t n, double p) {
    if (n == 0) return 1.0;
    if (n == 1) return std::clamp(d[0], 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] <= 0.0) return 0.0;
        acc += d[i] >= 1.0 ? 1.0 : std::pow(d[i], -p);
    }
    const double s = acc - static_cast<double>(n - 1);
    if (s <= 0.0) return 0.0;
    return std::pow(s, -1.0 / p);
}

/* n-ary De Morgan dual (buffer-free: complements on the fly). */
inline double ss_tconorm_fold(const double* d, std::size_t n, double p) {
    if (n == 0) return 0.0;
    if (n == 1) return std::clamp(d[0], 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 1.0 - d[i];
        if (c <= 0.0) return 1.0;
        acc += c >= 1.0 ? 1.0 : std::pow(c, -p);
    }
    const double s = acc - static_cast<double>(n - 1);
    if (s <= 0.0) return 1.0;
    return 1.0 - std::pow(s, -1.0 / p);
}

/* Pairwise operators under a parameter set (min/max when fixed_min). */
inline double tnorm(double a, double b, const OperatorParams& op) {
    return op.fixed_min ? std::min(a, b) : ss_tnorm(a, b, op.tnorm_p);
}

inline double tconorm(double a, double b, const OperatorParams& op) {
    return op.fixed_min ? std::max(a, b) : ss_tconorm(a, b, op.tconorm_p);
}

} // namespace evonf
