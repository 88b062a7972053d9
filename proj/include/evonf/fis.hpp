#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "membership.hpp"
#include "operators.hpp"

namespace evonf {

/*
 * The phenotype: a Takagi-Sugeno fuzzy inference system with parameterized
 * membership functions, a bitmask rule base, and parameterized operators.
 * Everything here is immutable-after-build and evaluated purely, so systems
 * can be shared across threads freely.
 */

struct FuzzyVariable {
    std::string name;
    double lo = 0.0, hi = 1.0;
    std::vector<MembershipFunction> partitions; /* 2..4 fuzzy sets */
};

/* Linear consequent y = c[0] + sum_j c[j+1] * x[j]; length n_inputs + 1. */
using TSConsequent = std::vector<double>;

struct FuzzyRule {
    /* Per input variable, bit l selects fuzzy set l of that variable's
     * partition.  All-zero mask = variable absent from the rule (don't-care);
     * several bits = disjunction of labels, aggregated by the t-conorm. */
    std::vector<std::uint8_t> masks;
    TSConsequent consequent;
    bool active = true;
};

enum class FisKind { TakagiSugeno, Mamdani, Tsukamoto };

inline const char* fis_kind_name(FisKind k) {
    switch (k) {
        case FisKind::TakagiSugeno: return "takagi-sugeno";
        case FisKind::Mamdani: return "mamdani";
        default: return "tsukamoto";
    }
}

struct FuzzyInferenceSystem {
    std::vector<FuzzyVariable> inputs;
    std::vector<FuzzyRule> rules;
    OperatorParams operators;
    FisKind kind = FisKind::TakagiSugeno;

    std::size_t n_inputs() const { return inputs.size(); }

    std::size_t active_rule_count() const {
        std::size_t n = 0;
        for (const auto& r : rules) n += r.active ? 1 : 0;
        return n;
    }

    /* Structural invariants; throws on violation. */
    void validate() const {
        if (inputs.empty()) throw InvalidArgument("fis: no input variables");
        for (const auto& v : inputs) {
            if (!(v.lo < v.hi)) throw InvalidArgument("fis: variable '" + v.name + "' universe");
            if (v.partitions.size() < 2 || v.partitions.size() > 4)
                throw InvalidArgument("fis: variable '" + v.name + "' needs 2-4 fuzzy sets");
            for (const auto& mf : v.partitions)
                if (mf.center() < v.lo || mf.center() > v.hi)
                    throw InvalidArgument("fis: MF center outside universe of '" + v.name + "'");
        }
        if (active_rule_count() == 0) throw NoActiveRules("fis: no active rule");
        for (const auto& r : rules) {
            if (r.masks.size() != inputs.size())
                throw InvalidArgument("fis: rule mask count != input count");
            if (r.consequent.size() != inputs.size() + 1)
                throw InvalidArgument("fis: consequent length != n_inputs + 1");
            bool any = false;
            for (std::size_t v = 0; v < inputs.size(); ++v) {
                const std::uint8_t width_mask =
                    static_cast<std::uint8_t>((1u << inputs[v].partitions.size()) - 1u);
                if (r.masks[v] & ~width_mask)
                    throw InvalidArgument("fis: rule mask selects a label beyond the partition");
                any = any || r.masks[v] != 0;
            }
            if (r.active && !any)
                throw MalformedRule("fis: active rule with all-zero masks");
        }
    }
};

/*
 * Firing strength of one rule: per variable with a non-zero mask the selected
 * labels' degrees are aggregated with the t-conorm (disjunction); per-variable
 * degrees are then combined across variables with the t-norm.  Variables with
 * all-zero masks are skipped.
 */
inline double firing_strength(const FuzzyRule& rule, const double* x,
                              const FuzzyInferenceSystem& fis) {
    double degs[8]; /* masks are 8-bit, so at most 8 selected labels */
    const bool fixed_min = fis.operators.fixed_min;
    const double pt = fis.operators.tnorm_p;
    double minacc = 1.0; /* min over per-variable degrees (fixed_min mode) */
    double powacc = 0.0; /* sum of dv^(-p) (generator form of the t-norm fold) */
    double last_dv = 0.0;
    bool dead = false;
    std::size_t k = 0;
    for (std::size_t v = 0; v < fis.inputs.size(); ++v) {
        const std::uint8_t m = rule.masks[v];
        if (m == 0) continue; /* don't-care variable */
        const auto& parts = fis.inputs[v].partitions;
        std::size_t nd = 0;
        for (std::size_t l = 0; l < parts.size() && l < 8; ++l)
            if (m & (1u << l)) degs[nd++] = mf_eval(parts[l], x[v]);
        double dv;
        if (fixed_min) {
            dv = degs[0];
            for (std::size_t i = 1; i < nd; ++i) dv = std::max(dv, degs[i]);
            minacc = std::min(minacc, dv);
        } else {
            dv = ss_tconorm_fold(degs, nd, fis.operators.tconorm_p);
            if (dv <= 0.0)
                dead = true; /* a zero conjunct kills the rule */
            else
                powacc += dv >= 1.0 ? 1.0 : std::pow(dv, -pt);
        }
        ++k;
        last_dv = dv;
    }
    if (k == 0) throw MalformedRule("firing_strength: rule has all-zero masks");
    if (fixed_min) return minacc;
    if (dead) return 0.0;
    if (k == 1) return last_dv;
    const double s = powacc - static_cast<double>(k - 1);
    if (s <= 0.0) return 0.0;
    return std::pow(s, -1.0 / pt);
}

inline double firing_strength(const FuzzyRule& rule, const std::vector<double>& x,
                              const FuzzyInferenceSystem& fis) {
    return firing_strength(rule, x.data(), fis);
}

inline constexpr double kEpsFire = 1e-12;

/*
 * Takagi-Sugeno inference: sum_i w_i f_i(x) / sum_i w_i over active rules.
 * When total firing drops below kEpsFire the unweighted mean of the
 * consequent values is returned so that fitness stays defined everywhere.
 */
inline double ts_evaluate(const FuzzyInferenceSystem& fis, const double* x) {
    if (fis.kind != FisKind::TakagiSugeno)
        throw UnsupportedFisKind(std::string("ts_evaluate: only takagi-sugeno is executable, got ") +
                                 fis_kind_name(fis.kind));
    double wsum = 0.0, wf = 0.0, fsum = 0.0;
    std::size_t n_active = 0;
    for (const auto& rule : fis.rules) {
        if (!rule.active) continue;
        const double w = firing_strength(rule, x, fis);
        double f = rule.consequent[0];
        for (std::size_t j = 0; j < fis.inputs.size(); ++j) f += rule.consequent[j + 1] * x[j];
        wsum += w;
        wf += w * f;
        fsum += f;
        ++n_active;
    }
    if (n_active == 0) throw NoActiveRules("ts_evaluate: no active rule");
    if (wsum < kEpsFire) return fsum / static_cast<double>(n_active);
    return wf / wsum;
}

inline double ts_evaluate(const FuzzyInferenceSystem& fis, const std::vector<double>& x) {
    return ts_evaluate(fis, x.data());
}

/* Root mean squared prediction error over a dataset. */
inline double rmse(const FuzzyInferenceSystem& fis, const WindowedDataset& data) {
    if (data.size() == 0) throw EmptyDataset("rmse: empty dataset");
    double acc = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const double e = ts_evaluate(fis, data.row(s)) - data.target(s);
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(data.size()));
}

} // namespace evonf
