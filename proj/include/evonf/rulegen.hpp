#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fis.hpp"
#include "membership.hpp"

namespace evonf {

/*
 * Initial system construction: evenly spaced default partitions and a full
 * grid rule base (one rule per combination of one label from each variable).
 */

/*
 * m membership functions with centers evenly spaced at lo + k*(hi-lo)/(m-1).
 * Widths are chosen so adjacent fuzzy sets cross at degree 0.5:
 *   Bell:     p = 0.5*(hi-lo)/(m-1), q = 2   (degree at the midpoint is
 *             1/(1+1) = 0.5 for any q, since |midpoint - r| = p)
 *   Gaussian: sigma = (hi-lo)/(2(m-1)) / sqrt(2 ln 2)
 */
inline std::vector<MembershipFunction> default_partition(double lo, double hi, std::size_t m,
                                                         MfShape shape) {
    if (m < 2 || m > 4) throw InvalidCount("default_partition: need 2-4 fuzzy sets, got " +
                                           std::to_string(m));
    if (!(lo < hi)) throw InvalidArgument("default_partition: need lo < hi");
    const double step = (hi - lo) / static_cast<double>(m - 1);
    std::vector<MembershipFunction> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double center = lo + static_cast<double>(k) * step;
        if (shape == MfShape::Bell)
            out.push_back(MembershipFunction::bell(0.5 * step, 2.0, center));
        else
            out.push_back(MembershipFunction::gaussian(center, 0.5 * step / std::sqrt(2.0 * std::log(2.0))));
    }
    return out;
}

/*
 * One rule per element of the Cartesian product of labels, ordered
 * lexicographically by label indices (first variable most significant).
 * Each rule selects exactly one fuzzy set per variable; all rules start
 * active with the given consequent (zero by default).
 */
inline std::vector<FuzzyRule> grid_partition(const std::vector<FuzzyVariable>& variables,
                                             const TSConsequent& consequent_init) {
    if (variables.empty()) throw InvalidArgument("grid_partition: no variables");
    TSConsequent cons = consequent_init;
    if (cons.empty()) cons.assign(variables.size() + 1, 0.0);
    if (cons.size() != variables.size() + 1)
        throw InvalidArgument("grid_partition: consequent template length != n_inputs + 1");

    std::size_t count = 1;
    for (const auto& v : variables) {
        if (v.partitions.empty()) throw InvalidArgument("grid_partition: variable without partition");
        count *= v.partitions.size();
    }

    std::vector<FuzzyRule> rules;
    rules.reserve(count);
    std::vector<std::size_t> label(variables.size(), 0);
    for (std::size_t i = 0; i < count; ++i) {
        FuzzyRule r;
        r.masks.resize(variables.size());
        for (std::size_t v = 0; v < variables.size(); ++v)
            r.masks[v] = static_cast<std::uint8_t>(1u << label[v]);
        r.consequent = cons;
        r.active = true;
        rules.push_back(std::move(r));
        /* lexicographic increment, last variable fastest */
        for (std::size_t v = variables.size(); v-- > 0;) {
            if (++label[v] < variables[v].partitions.size()) break;
            label[v] = 0;
        }
    }
    return rules;
}

/* Assemble a complete grid FIS over given universes. */
inline FuzzyInferenceSystem make_grid_fis(const std::vector<std::pair<double, double>>& universes,
                                          const std::vector<std::size_t>& counts, MfShape shape,
                                          OperatorParams ops = {}) {
    if (universes.size() != counts.size() || universes.empty())
        throw InvalidArgument("make_grid_fis: universe/count size mismatch");
    FuzzyInferenceSystem fis;
    for (std::size_t v = 0; v < universes.size(); ++v) {
        FuzzyVariable var;
        var.name = "x" + std::to_string(v);
        var.lo = universes[v].first;
        var.hi = universes[v].second;
        var.partitions = default_partition(var.lo, var.hi, counts[v], shape);
        fis.inputs.push_back(std::move(var));
    }
    fis.rules = grid_partition(fis.inputs, {});
    fis.operators = ops;
    fis.kind = FisKind::TakagiSugeno;
    return fis;
}

} // namespace evonf
