#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fis.hpp"
#include "membership.hpp"
#include "operators.hpp"
#include "rng.hpp"

namespace evonf {

/*
 * Five-layer fixed-length chromosome <-> FuzzyInferenceSystem.
 *
 * Gene order (also the serialization order):
 *   [0]                 per input: membership-function count gene (2..4)
 *   [n]                 per input: shape gene (index into shape_choices)
 *   [2n]                per input: max_mf slots of 3 reals (p, q, r); a
 *                       Gaussian reuses p as sigma and r as mu, q is carried
 *                       but unused; slots at index >= the count gene are
 *                       carried but ignored
 *   [2n + 3n*max_mf]    per rule slot: n+1 consequent angles in degrees,
 *                       intercept first (coefficients are tan(angle))
 *   [.. + R*(n+1)]      per rule slot: rule-selection bit
 *   [.. + R]            per rule slot, per input, per label: mask bit
 *   [.. + R*n*max_mf]   t-norm parameter, t-conorm parameter, learning rate,
 *                       FIS-kind gene (carried, pinned to Takagi-Sugeno)
 *
 * where n = n_inputs and R = max_mf^n_inputs rule slots.  The total length
 * depends only on the EncodingSpec, which keeps every genetic operator
 * positionwise; structure changes (fewer MFs, fewer rules) happen by genes
 * being ignored at decode time, not by resizing.
 */

using Genome = std::vector<double>;

enum class GeneKind { Real, Bit, Categorical };

struct GeneInfo {
    GeneKind kind = GeneKind::Real;
    double lo = 0.0, hi = 1.0; /* Categorical: integer values lo..hi */
    bool frozen = false;
};

inline std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

/* Per-gene metadata plus the index arithmetic of the layout above. */
struct GeneLayout {
    std::size_t n_inputs = 0, max_mf = 0, max_rules = 0; /* 0 dims = generic layout */
    std::vector<GeneInfo> genes;

    std::size_t size() const { return genes.size(); }

    std::size_t count_idx(std::size_t v) const { return v; }
    std::size_t shape_idx(std::size_t v) const { return n_inputs + v; }
    std::size_t mf_idx(std::size_t v, std::size_t slot, std::size_t param) const {
        return 2 * n_inputs + (v * max_mf + slot) * 3 + param;
    }
    std::size_t angles_base() const { return 2 * n_inputs + 3 * n_inputs * max_mf; }
    std::size_t angle_idx(std::size_t rule, std::size_t j) const {
        return angles_base() + rule * (n_inputs + 1) + j;
    }
    std::size_t bits_base() const { return angles_base() + max_rules * (n_inputs + 1); }
    std::size_t rule_bit_idx(std::size_t rule) const { return bits_base() + rule; }
    std::size_t masks_base() const { return bits_base() + max_rules; }
    std::size_t mask_idx(std::size_t rule, std::size_t v, std::size_t label) const {
        return masks_base() + (rule * n_inputs + v) * max_mf + label;
    }
    std::size_t tnorm_idx() const { return masks_base() + max_rules * n_inputs * max_mf; }
    std::size_t tconorm_idx() const { return tnorm_idx() + 1; }
    std::size_t lr_idx() const { return tnorm_idx() + 2; }
    std::size_t kind_idx() const { return tnorm_idx() + 3; }

    /* Generic all-real layout (custom fitness landscapes, EA tests). */
    static GeneLayout uniform_real(std::size_t n, double lo, double hi) {
        GeneLayout L;
        L.genes.assign(n, GeneInfo{GeneKind::Real, lo, hi, false});
        return L;
    }
};

/* Bounds and options from which the chromosome layout is derived. */
struct EncodingSpec {
    std::size_t n_inputs = 0;
    std::vector<std::pair<double, double>> universes;
    std::size_t max_mf = 4;
    std::size_t count_min = 2, count_max = 4;
    std::vector<MfShape> shape_choices = {MfShape::Bell, MfShape::Gaussian};
    double angle_min = -89.9, angle_max = 89.9; /* degrees; tan stays finite */
    double op_min = kOpPMin, op_max = kOpPMax;
    double lr_min = 0.05, lr_max = 0.20;
    /* width gene bounds as fractions of the universe span */
    double width_frac_min = 0.02, width_frac_max = 1.0;
    double slope_min = 0.5, slope_max = 8.0;
    bool fixed_min_operators = false; /* Type 3: operator genes frozen+ignored */
    bool evolve_label_masks = true;   /* false: masks frozen at the grid pattern */
    bool repair_empty = true;         /* decode repairs an all-inactive rule base */

    void validate() const {
        if (n_inputs == 0 || universes.size() != n_inputs)
            throw InvalidArgument("encoding: need one universe per input");
        for (const auto& u : universes)
            if (!(u.first < u.second)) throw InvalidArgument("encoding: universe lo < hi");
        if (count_min < 2 || count_max > max_mf || count_min > count_max || max_mf > 4)
            throw InvalidArgument("encoding: need 2 <= count_min <= count_max <= max_mf <= 4");
        if (shape_choices.empty()) throw InvalidArgument("encoding: no shape choices");
        if (!(angle_min < angle_max && angle_min > -90.0 && angle_max < 90.0))
            throw InvalidArgument("encoding: angle range must be inside (-90, 90)");
        if (!(op_min > 0.0 && op_min < op_max)) throw InvalidArgument("encoding: operator range");
        if (!(lr_min <= lr_max)) throw InvalidArgument("encoding: learning-rate range");
    }

    std::size_t max_rules() const { return ipow(max_mf, n_inputs); }

    GeneLayout layout() const {
        validate();
        GeneLayout L;
        L.n_inputs = n_inputs;
        L.max_mf = max_mf;
        L.max_rules = max_rules();
        const std::size_t R = L.max_rules;
        L.genes.reserve(2 * n_inputs + 3 * n_inputs * max_mf + R * (n_inputs + 2) +
                        R * n_inputs * max_mf + 4);
        for (std::size_t v = 0; v < n_inputs; ++v)
            L.genes.push_back({GeneKind::Categorical, static_cast<double>(count_min),
                               static_cast<double>(count_max), false});
        for (std::size_t v = 0; v < n_inputs; ++v)
            L.genes.push_back({GeneKind::Categorical, 0.0,
                               static_cast<double>(shape_choices.size() - 1),
                               shape_choices.size() == 1});
        for (std::size_t v = 0; v < n_inputs; ++v) {
            const double range = universes[v].second - universes[v].first;
            for (std::size_t slot = 0; slot < max_mf; ++slot) {
                L.genes.push_back({GeneKind::Real, width_frac_min * range,
                                   width_frac_max * range, false}); /* p / sigma */
                L.genes.push_back({GeneKind::Real, slope_min, slope_max, false}); /* q */
                L.genes.push_back({GeneKind::Real, universes[v].first, universes[v].second,
                                   false}); /* r / mu */
            }
        }
        for (std::size_t i = 0; i < R * (n_inputs + 1); ++i)
            L.genes.push_back({GeneKind::Real, angle_min, angle_max, false});
        for (std::size_t i = 0; i < R; ++i)
            L.genes.push_back({GeneKind::Bit, 0.0, 1.0, false});
        for (std::size_t i = 0; i < R * n_inputs * max_mf; ++i)
            L.genes.push_back({GeneKind::Bit, 0.0, 1.0, !evolve_label_masks});
        L.genes.push_back({GeneKind::Real, op_min, op_max, fixed_min_operators});
        L.genes.push_back({GeneKind::Real, op_min, op_max, fixed_min_operators});
        L.genes.push_back({GeneKind::Real, lr_min, lr_max, false});
        L.genes.push_back({GeneKind::Categorical, 0.0, 0.0, true}); /* FIS kind, pinned */
        return L;
    }
};

/* Decoded genotype: the system plus the Layer-4 learning rate. */
struct Phenotype {
    FuzzyInferenceSystem fis;
    double learning_rate = 0.1;
};

/* ------------------------------------------------------------------ */
/* Angular consequent coding                                           */
/* ------------------------------------------------------------------ */

inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

/* Coefficient from its angle gene: p = tan(alpha), alpha strictly inside
 * (-90, 90) degrees. */
inline double angle_to_coeff(double alpha_deg) {
    if (!(alpha_deg > -90.0 && alpha_deg < 90.0))
        throw AngleOutOfRange("angle_to_coeff: " + std::to_string(alpha_deg) +
                              " deg not strictly inside (-90, 90)");
    return std::tan(alpha_deg * kDegToRad);
}

inline double coeff_to_angle(double coeff) { return std::atan(coeff) / kDegToRad; }

/* ------------------------------------------------------------------ */
/* decode / encode                                                     */
/* ------------------------------------------------------------------ */

namespace detail {

/* Label of variable v in grid rule slot `slot` (last variable fastest,
 * matching grid_partition's lexicographic order). */
inline std::size_t grid_digit(std::size_t slot, std::size_t v, std::size_t n_inputs,
                              std::size_t max_mf) {
    std::size_t rem = slot;
    for (std::size_t k = n_inputs; k-- > v + 1;) rem /= max_mf;
    return rem % max_mf;
}

inline std::size_t expected_genome_size(const EncodingSpec& spec) {
    const std::size_t n = spec.n_inputs, R = spec.max_rules();
    return 2 * n + 3 * n * spec.max_mf + R * (n + 1) + R + R * n * spec.max_mf + 4;
}

} // namespace detail

/*
 * Genotype -> phenotype.  Total on bound-respecting genomes when
 * spec.repair_empty holds: rule slots whose mask selects a label at or
 * beyond a variable's decoded MF count are discarded, as are slots with
 * all-zero masks; if nothing survives, the lexicographically first grid
 * rule is forced back on (NoActiveRules if repair is disabled).
 */
inline Phenotype decode(const Genome& g, const EncodingSpec& spec) {
    spec.validate();
    GeneLayout L; /* dims only; bounds not needed here */
    L.n_inputs = spec.n_inputs;
    L.max_mf = spec.max_mf;
    L.max_rules = spec.max_rules();
    if (g.size() != detail::expected_genome_size(spec))
        throw SpecMismatch("decode: genome has " + std::to_string(g.size()) +
                           " genes, spec expects " +
                           std::to_string(detail::expected_genome_size(spec)));

    Phenotype ph;
    FuzzyInferenceSystem& fis = ph.fis;
    const std::size_t n = spec.n_inputs;
    std::vector<std::size_t> counts(n);
    for (std::size_t v = 0; v < n; ++v) {
        long m = std::lround(g[L.count_idx(v)]);
        m = std::max<long>(static_cast<long>(spec.count_min),
                           std::min<long>(static_cast<long>(spec.count_max), m));
        counts[v] = static_cast<std::size_t>(m);
        long si = std::lround(g[L.shape_idx(v)]);
        si = std::max<long>(0, std::min<long>(static_cast<long>(spec.shape_choices.size()) - 1, si));
        const MfShape shape = spec.shape_choices[static_cast<std::size_t>(si)];

        FuzzyVariable var;
        var.name = "x" + std::to_string(v);
        var.lo = spec.universes[v].first;
        var.hi = spec.universes[v].second;
        for (std::size_t slot = 0; slot < counts[v]; ++slot) {
            const double p = g[L.mf_idx(v, slot, 0)];
            const double q = g[L.mf_idx(v, slot, 1)];
            double r = g[L.mf_idx(v, slot, 2)];
            r = std::clamp(r, var.lo, var.hi);
            var.partitions.push_back(shape == MfShape::Bell
                                         ? MembershipFunction::bell(p, q, r)
                                         : MembershipFunction::gaussian(r, p));
        }
        fis.inputs.push_back(std::move(var));
    }

    const std::size_t R = L.max_rules;
    for (std::size_t i = 0; i < R; ++i) {
        if (g[L.rule_bit_idx(i)] < 0.5) continue;
        FuzzyRule rule;
        rule.masks.assign(n, 0);
        bool valid = true, any = false;
        for (std::size_t v = 0; v < n && valid; ++v) {
            std::uint8_t m = 0;
            for (std::size_t l = 0; l < spec.max_mf; ++l) {
                if (g[L.mask_idx(i, v, l)] < 0.5) continue;
                if (l >= counts[v]) { /* references a label this genome doesn't have */
                    valid = false;
                    break;
                }
                m |= static_cast<std::uint8_t>(1u << l);
            }
            rule.masks[v] = m;
            any = any || m != 0;
        }
        if (!valid || !any) continue;
        rule.consequent.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            const double a = std::clamp(g[L.angle_idx(i, j)], spec.angle_min, spec.angle_max);
            rule.consequent[j] = angle_to_coeff(a);
        }
        rule.active = true;
        fis.rules.push_back(std::move(rule));
    }

    if (fis.rules.empty()) {
        if (!spec.repair_empty) throw NoActiveRules("decode: no rule survived decoding");
        FuzzyRule rule; /* first grid rule: label 0 of every variable */
        rule.masks.assign(n, 1);
        rule.consequent.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            const double a = std::clamp(g[L.angle_idx(0, j)], spec.angle_min, spec.angle_max);
            rule.consequent[j] = angle_to_coeff(a);
        }
        rule.active = true;
        fis.rules.push_back(std::move(rule));
    }

    if (spec.fixed_min_operators) {
        fis.operators = OperatorParams{1.0, 1.0, true};
    } else {
        fis.operators.tnorm_p = std::clamp(g[L.tnorm_idx()], spec.op_min, spec.op_max);
        fis.operators.tconorm_p = std::clamp(g[L.tconorm_idx()], spec.op_min, spec.op_max);
        fis.operators.fixed_min = false;
    }
    fis.kind = FisKind::TakagiSugeno; /* Layer-5 gene carried but pinned */
    ph.learning_rate = std::clamp(g[L.lr_idx()], spec.lr_min, spec.lr_max);
    return ph;
}

/*
 * Phenotype -> genotype (inverse of decode on the representable subset).
 * Grid rule bases (every rule selects exactly one label per variable, in
 * lexicographic order) are placed at their canonical grid slots so the seeded
 * genome's rule geometry matches the initial-population convention; any other
 * rule base is placed in sequential slots.  Unused slots get canonical filler
 * (bit off, grid-pattern masks, zero angles, mid-range MF parameters).
 */
inline Genome encode(const FuzzyInferenceSystem& fis, const EncodingSpec& spec,
                     double learning_rate = -1.0) {
    spec.validate();
    fis.validate();
    if (learning_rate < 0.0) learning_rate = 0.5 * (spec.lr_min + spec.lr_max);
    if (learning_rate < spec.lr_min || learning_rate > spec.lr_max)
        throw InvalidArgument("encode: learning rate outside the gene range");
    if (fis.kind != FisKind::TakagiSugeno)
        throw NotRepresentable("encode: only takagi-sugeno systems are representable");
    if (fis.inputs.size() != spec.n_inputs)
        throw NotRepresentable("encode: input count differs from spec");
    if (fis.operators.fixed_min != spec.fixed_min_operators)
        throw NotRepresentable("encode: operator mode (fixed-min vs parameterized) differs from spec");

    const GeneLayout L = spec.layout();
    const std::size_t n = spec.n_inputs, R = L.max_rules;
    Genome g(L.size(), 0.0);

    /* Layer 1: counts, shapes, MF parameter slots */
    for (std::size_t v = 0; v < n; ++v) {
        const FuzzyVariable& var = fis.inputs[v];
        const auto [ulo, uhi] = spec.universes[v];
        if (std::fabs(var.lo - ulo) > 1e-12 || std::fabs(var.hi - uhi) > 1e-12)
            throw NotRepresentable("encode: universe of '" + var.name + "' differs from spec");
        const std::size_t m = var.partitions.size();
        if (m < spec.count_min || m > spec.count_max)
            throw NotRepresentable("encode: MF count of '" + var.name + "' outside gene range");
        const MfShape shape = var.partitions[0].shape;
        std::size_t shape_index = spec.shape_choices.size();
        for (std::size_t s = 0; s < spec.shape_choices.size(); ++s)
            if (spec.shape_choices[s] == shape) shape_index = s;
        if (shape_index == spec.shape_choices.size())
            throw NotRepresentable("encode: shape of '" + var.name + "' not among the choices");
        for (const auto& mf : var.partitions)
            if (mf.shape != shape)
                throw NotRepresentable("encode: mixed shapes within '" + var.name +
                                       "' (one shape gene per variable)");

        g[L.count_idx(v)] = static_cast<double>(m);
        g[L.shape_idx(v)] = static_cast<double>(shape_index);
        const double range = uhi - ulo;
        const double plo = spec.width_frac_min * range, phi = spec.width_frac_max * range;
        for (std::size_t slot = 0; slot < spec.max_mf; ++slot) {
            if (slot < m) {
                const MembershipFunction& mf = var.partitions[slot];
                if (mf.p < plo - 1e-12 || mf.p > phi + 1e-12)
                    throw NotRepresentable("encode: width/sigma of '" + var.name +
                                           "' outside gene bounds");
                const double qv = shape == MfShape::Bell ? mf.q : 2.0;
                if (shape == MfShape::Bell && (qv < spec.slope_min || qv > spec.slope_max))
                    throw NotRepresentable("encode: slope of '" + var.name +
                                           "' outside gene bounds");
                if (mf.r < ulo || mf.r > uhi)
                    throw NotRepresentable("encode: center of '" + var.name +
                                           "' outside the universe");
                g[L.mf_idx(v, slot, 0)] = std::clamp(mf.p, plo, phi);
                g[L.mf_idx(v, slot, 1)] = qv;
                g[L.mf_idx(v, slot, 2)] = mf.r;
            } else { /* inactive slot: canonical mid-range filler */
                g[L.mf_idx(v, slot, 0)] = 0.5 * (plo + phi);
                g[L.mf_idx(v, slot, 1)] = 2.0;
                g[L.mf_idx(v, slot, 2)] = 0.5 * (ulo + uhi);
            }
        }
    }

    /* Collect active rules and decide placement. */
    std::vector<const FuzzyRule*> act;
    for (const auto& r : fis.rules)
        if (r.active) act.push_back(&r);
    if (act.size() > R) throw NotRepresentable("encode: more active rules than rule slots");

    bool grid_mode = true;
    std::vector<std::size_t> slots(act.size());
    std::size_t prev_slot = 0;
    for (std::size_t j = 0; j < act.size() && grid_mode; ++j) {
        std::size_t slot = 0;
        for (std::size_t v = 0; v < n; ++v) {
            const std::uint8_t m = act[j]->masks[v];
            if (m == 0 || (m & (m - 1)) != 0) { /* don't-care or multi-label */
                grid_mode = false;
                break;
            }
            std::size_t label = 0;
            while (!(m & (1u << label))) ++label;
            slot = slot * spec.max_mf + label;
        }
        if (!grid_mode) break;
        if (j > 0 && slot <= prev_slot) grid_mode = false; /* not in lexicographic order */
        slots[j] = slot;
        prev_slot = slot;
    }
    if (!grid_mode)
        for (std::size_t j = 0; j < act.size(); ++j) slots[j] = j;

    /* Canonical filler first: bits off, grid-pattern masks, zero angles. */
    for (std::size_t i = 0; i < R; ++i) {
        g[L.rule_bit_idx(i)] = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t digit = detail::grid_digit(i, v, n, spec.max_mf);
            for (std::size_t l = 0; l < spec.max_mf; ++l)
                g[L.mask_idx(i, v, l)] = l == digit ? 1.0 : 0.0;
        }
        for (std::size_t j = 0; j <= n; ++j) g[L.angle_idx(i, j)] = 0.0;
    }

    for (std::size_t j = 0; j < act.size(); ++j) {
        const FuzzyRule& r = *act[j];
        const std::size_t i = slots[j];
        g[L.rule_bit_idx(i)] = 1.0;
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t m_v = fis.inputs[v].partitions.size();
            for (std::size_t l = 0; l < spec.max_mf; ++l) {
                const bool bit = l < m_v && (r.masks[v] & (1u << l));
                g[L.mask_idx(i, v, l)] = bit ? 1.0 : 0.0;
            }
        }
        if (r.consequent.size() != n + 1)
            throw NotRepresentable("encode: consequent length != n_inputs + 1");
        for (std::size_t c = 0; c <= n; ++c) {
            const double a = coeff_to_angle(r.consequent[c]);
            if (a < spec.angle_min || a > spec.angle_max)
                throw NotRepresentable("encode: consequent coefficient needs an angle outside " +
                                       std::to_string(spec.angle_min) + ".." +
                                       std::to_string(spec.angle_max) + " deg");
            g[L.angle_idx(i, c)] = a;
        }
    }

    /* Layers 3-5 */
    if (spec.fixed_min_operators) {
        g[L.tnorm_idx()] = 0.5 * (spec.op_min + spec.op_max);
        g[L.tconorm_idx()] = 0.5 * (spec.op_min + spec.op_max);
    } else {
        if (fis.operators.tnorm_p < spec.op_min || fis.operators.tnorm_p > spec.op_max ||
            fis.operators.tconorm_p < spec.op_min || fis.operators.tconorm_p > spec.op_max)
            throw NotRepresentable("encode: operator parameter outside gene range");
        g[L.tnorm_idx()] = fis.operators.tnorm_p;
        g[L.tconorm_idx()] = fis.operators.tconorm_p;
    }
    g[L.lr_idx()] = learning_rate;
    g[L.kind_idx()] = 0.0;
    return g;
}

/* ------------------------------------------------------------------ */
/* Random genomes                                                      */
/* ------------------------------------------------------------------ */

/* Stamp the grid-partition mask pattern (one label per variable per rule
 * slot) over the mask genes. */
inline void stamp_grid_masks(Genome& g, const GeneLayout& L) {
    for (std::size_t i = 0; i < L.max_rules; ++i)
        for (std::size_t v = 0; v < L.n_inputs; ++v) {
            const std::size_t digit = detail::grid_digit(i, v, L.n_inputs, L.max_mf);
            for (std::size_t l = 0; l < L.max_mf; ++l)
                g[L.mask_idx(i, v, l)] = l == digit ? 1.0 : 0.0;
        }
}

/*
 * Uniform random genome: every gene uniform within its bounds, then the rule
 * layer is stamped to the full grid (all rule bits on, grid-pattern masks),
 * i.e. the initial rule base is a complete grid over however many MFs the
 * count genes drew.  Frozen operator genes are pinned mid-range.
 */
inline Genome random_genome(const EncodingSpec& spec, Rng& rng) {
    const GeneLayout L = spec.layout();
    Genome g(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) {
        const GeneInfo& gi = L.genes[i];
        switch (gi.kind) {
            case GeneKind::Real: g[i] = rng.uniform(gi.lo, gi.hi); break;
            case GeneKind::Bit: g[i] = static_cast<double>(rng.below(2)); break;
            case GeneKind::Categorical:
                g[i] = gi.lo + static_cast<double>(
                                   rng.below(static_cast<std::uint64_t>(gi.hi - gi.lo) + 1));
                break;
        }
    }
    for (std::size_t i = 0; i < L.max_rules; ++i) g[L.rule_bit_idx(i)] = 1.0;
    stamp_grid_masks(g, L);
    if (spec.fixed_min_operators) {
        g[L.tnorm_idx()] = 0.5 * (spec.op_min + spec.op_max);
        g[L.tconorm_idx()] = 0.5 * (spec.op_min + spec.op_max);
    }
    g[L.kind_idx()] = 0.0;
    return g;
}

/* Bounds check used by tests and the evolution loop's debug assertions. */
inline bool genome_in_bounds(const Genome& g, const GeneLayout& L) {
    if (g.size() != L.size()) return false;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] < L.genes[i].lo - 1e-12 || g[i] > L.genes[i].hi + 1e-12) return false;
    return true;
}

/* ------------------------------------------------------------------ */
/* Serialization (flat numeric array, one document per genome)         */
/* ------------------------------------------------------------------ */

inline std::string genome_to_text(const Genome& g) {
    std::string out = "evonf-genome v1\ngenes " + std::to_string(g.size()) + "\n";
    char buf[40];
    for (double v : g) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out += buf;
    }
    return out;
}

inline Genome genome_from_text(std::istream& in) {
    std::string magic, version, key;
    std::size_t n = 0;
    in >> magic >> version >> key >> n;
    if (!in || magic != "evonf-genome" || version != "v1" || key != "genes")
        throw ParseError("genome document: bad header");
    Genome g(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> g[i]))
            throw ParseError("genome document: expected " + std::to_string(n) +
                             " genes, failed at " + std::to_string(i));
    return g;
}

inline void save_genome(const std::string& path, const Genome& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << genome_to_text(g);
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline Genome load_genome(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return genome_from_text(in);
}

} // namespace evonf
