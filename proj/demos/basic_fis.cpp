/*
 * Minimal tour of the inference core: build a two-input Takagi-Sugeno system
 * by hand, look at memberships and firing strengths, evaluate it, and watch
 * the operator parameter morph the conjunction from product-like to min-like.
 */

#include <cstdio>

#include <evonf/evonf.hpp>

using namespace evonf;

int main() {
    /* A 3x3 grid system on [0,1]^2 via the partition helpers... */
    FuzzyInferenceSystem fis =
        make_grid_fis({{0.0, 1.0}, {0.0, 1.0}}, {3, 3}, MfShape::Bell, {});

    /* ...with rule-local planes y = c0 + x0 + x1, where c0 is the sum of the
     * rule's fuzzy-set centers (so each rule pulls toward its own corner). */
    for (auto& rule : fis.rules) {
        double c0 = 0.0;
        for (std::size_t v = 0; v < fis.n_inputs(); ++v)
            for (std::size_t l = 0; l < fis.inputs[v].partitions.size(); ++l)
                if (rule.masks[v] & (1u << l)) c0 += fis.inputs[v].partitions[l].center();
        rule.consequent = {c0, 1.0, 1.0};
    }
    fis.validate();

    std::printf("system: %zu inputs, %zu rules\n", fis.n_inputs(), fis.rules.size());

    const double x[2] = {0.3, 0.8};
    std::printf("\nmembership degrees at (%.1f, %.1f):\n", x[0], x[1]);
    for (std::size_t v = 0; v < fis.n_inputs(); ++v) {
        std::printf("  %s:", fis.inputs[v].name.c_str());
        for (const auto& mf : fis.inputs[v].partitions)
            std::printf("  %.4f", mf_eval(mf, x[v]));
        std::printf("\n");
    }

    std::printf("\nfiring strengths:\n");
    for (std::size_t r = 0; r < fis.rules.size(); ++r)
        std::printf("  rule %zu: %.5f\n", r, firing_strength(fis.rules[r], x, fis));

    std::printf("\noutput as the conjunction morphs from product-like to min-like:\n");
    for (double p : {0.001, 1.0, 5.0, 50.0}) {
        fis.operators.tnorm_p = p;
        fis.operators.tconorm_p = p;
        std::printf("  operator p = %6.3f  ->  y = %.5f\n", p, ts_evaluate(fis, x));
    }
    fis.operators.fixed_min = true;
    std::printf("  min/max           ->  y = %.5f\n", ts_evaluate(fis, x));
    return 0;
}
