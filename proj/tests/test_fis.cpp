#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "builders.hpp"
#include "evonf/fis.hpp"
#include "evonf/rulegen.hpp"
#include "oracles.hpp"

using evonf::FuzzyInferenceSystem;
using evonf::FuzzyRule;
using evonf::FuzzyVariable;
using evonf::MembershipFunction;

namespace {

/* One-variable system with two bell sets and explicit consequents. */
FuzzyInferenceSystem one_var_system() {
    FuzzyInferenceSystem fis;
    FuzzyVariable v;
    v.name = "x";
    v.lo = 0.0;
    v.hi = 1.0;
    v.partitions = {MembershipFunction::bell(0.5, 2.0, 0.0),
                    MembershipFunction::bell(0.5, 2.0, 1.0)};
    fis.inputs.push_back(v);
    return fis;
}

} // namespace

TEST(FiringStrength, SingleVariableSingleLabelPassesThrough) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x1};
    rule.consequent = {0.0, 0.0};
    const double x = 0.37;
    const double deg = evonf::mf_eval(fis.inputs[0].partitions[0], x);
    EXPECT_DOUBLE_EQ(evonf::firing_strength(rule, &x, fis), deg);
}

TEST(FiringStrength, IdentityConjunctAnyP) {
    /* degrees 1.0 and 0.6: T(1, 0.6) = 0.6 for every p in the family */
    FuzzyInferenceSystem fis;
    for (int v = 0; v < 2; ++v) {
        FuzzyVariable var;
        var.name = "x" + std::to_string(v);
        var.lo = -1.0;
        var.hi = 3.0;
        var.partitions = {MembershipFunction::bell(1.0, 1.0, 0.0),
                          MembershipFunction::bell(1.0, 1.0, 2.0)};
        fis.inputs.push_back(var);
    }
    FuzzyRule rule;
    rule.masks = {0x1, 0x2};
    rule.consequent = {0.0, 0.0, 0.0};
    /* x0 = 0 hits the first center exactly (degree 1); x1 = 1 is at unit
     * distance from center 2 with p=q=1, degree 1/(1+1) = 0.6 -> use 0.5. */
    const double x[2] = {0.0, 1.0};
    for (double p : {1e-3, 0.1, 1.0, 7.0, 50.0}) {
        fis.operators.tnorm_p = p;
        EXPECT_NEAR(evonf::firing_strength(rule, x, fis), 0.5, 1e-12) << "p=" << p;
    }
}

TEST(FiringStrength, WorkedTwoConjunctValue) {
    /* T(0.5, 0.5, p=1) = (2 + 2 - 1)^-1 = 1/3 */
    FuzzyInferenceSystem fis;
    for (int v = 0; v < 2; ++v) {
        FuzzyVariable var;
        var.name = "x" + std::to_string(v);
        var.lo = -2.0;
        var.hi = 2.0;
        var.partitions = {MembershipFunction::bell(1.0, 1.0, 0.0),
                          MembershipFunction::bell(1.0, 1.0, 1.0)};
        fis.inputs.push_back(var);
    }
    fis.operators.tnorm_p = 1.0;
    FuzzyRule rule;
    rule.masks = {0x1, 0x1};
    rule.consequent = {0.0, 0.0, 0.0};
    const double x[2] = {1.0, -1.0}; /* both degrees 1/(1+1) = 0.5 */
    EXPECT_NEAR(evonf::firing_strength(rule, x, fis), 1.0 / 3.0, 1e-15);
}

TEST(FiringStrength, AllZeroMaskThrows) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x0};
    rule.consequent = {0.0, 0.0};
    const double x = 0.5;
    EXPECT_THROW(evonf::firing_strength(rule, &x, fis), evonf::MalformedRule);
}

TEST(FiringStrength, DontCareVariableSkipped) {
    FuzzyInferenceSystem fis;
    for (int v = 0; v < 2; ++v) {
        FuzzyVariable var;
        var.name = "x" + std::to_string(v);
        var.lo = 0.0;
        var.hi = 1.0;
        var.partitions = {MembershipFunction::bell(0.5, 2.0, 0.0),
                          MembershipFunction::bell(0.5, 2.0, 1.0)};
        fis.inputs.push_back(var);
    }
    FuzzyRule rule;
    rule.masks = {0x2, 0x0}; /* second variable absent */
    rule.consequent = {0.0, 0.0, 0.0};
    const double x[2] = {0.3, 0.9};
    EXPECT_DOUBLE_EQ(evonf::firing_strength(rule, x, fis),
                     evonf::mf_eval(fis.inputs[0].partitions[1], 0.3));
}

TEST(FiringStrength, MultiLabelDisjunction) {
    FuzzyInferenceSystem fis = one_var_system();
    fis.operators.tconorm_p = 2.5;
    FuzzyRule rule;
    rule.masks = {0x3}; /* label 0 OR label 1 */
    rule.consequent = {0.0, 0.0};
    const double x = 0.42;
    const double d0 = evonf::mf_eval(fis.inputs[0].partitions[0], x);
    const double d1 = evonf::mf_eval(fis.inputs[0].partitions[1], x);
    EXPECT_NEAR(evonf::firing_strength(rule, &x, fis),
                static_cast<double>(oracle::ss_s2(d0, d1, 2.5)), 1e-12);
}

TEST(FiringStrength, FixedMinUsesMinAndMax) {
    FuzzyInferenceSystem fis;
    for (int v = 0; v < 2; ++v) {
        FuzzyVariable var;
        var.name = "x" + std::to_string(v);
        var.lo = 0.0;
        var.hi = 1.0;
        var.partitions = {MembershipFunction::bell(0.3, 2.0, 0.0),
                          MembershipFunction::bell(0.3, 2.0, 1.0)};
        fis.inputs.push_back(var);
    }
    fis.operators = {1.0, 1.0, true};
    FuzzyRule rule;
    rule.masks = {0x3, 0x1};
    rule.consequent = {0.0, 0.0, 0.0};
    const double x[2] = {0.35, 0.6};
    const double d00 = evonf::mf_eval(fis.inputs[0].partitions[0], 0.35);
    const double d01 = evonf::mf_eval(fis.inputs[0].partitions[1], 0.35);
    const double d10 = evonf::mf_eval(fis.inputs[1].partitions[0], 0.6);
    EXPECT_DOUBLE_EQ(evonf::firing_strength(rule, x, fis),
                     std::min(std::max(d00, d01), d10));
}

TEST(TsEvaluate, SingleRuleReturnsItsConsequent) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x1};
    rule.consequent = {0.25, 1.5};
    fis.rules.push_back(rule);
    for (double x : {0.0, 0.2, 0.77}) {
        EXPECT_NEAR(evonf::ts_evaluate(fis, &x), 0.25 + 1.5 * x, 1e-15);
    }
}

TEST(TsEvaluate, EqualFiringAverages) {
    /* Symmetric sets around x = 0.5 fire equally; consequents 0.2 and 0.8
     * average to 0.5. */
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule r1, r2;
    r1.masks = {0x1};
    r1.consequent = {0.2, 0.0};
    r2.masks = {0x2};
    r2.consequent = {0.8, 0.0};
    fis.rules = {r1, r2};
    const double x = 0.5;
    EXPECT_NEAR(evonf::ts_evaluate(fis, &x), 0.5, 1e-12);
}

TEST(TsEvaluate, MatchesBruteOracleOnRandomSystems) {
    evonf::Rng rng(21);
    double worst = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + rng.below(3);
        auto fis = builders::random_system(rng, n, 4, 12);
        std::vector<double> x(n);
        for (int pt = 0; pt < 20; ++pt) {
            for (auto& xi : x) xi = rng.uniform(-0.2, 1.2);
            const double got = evonf::ts_evaluate(fis, x);
            const double want = oracle::brute_ts(fis, x.data());
            worst = std::max(worst, std::fabs(got - want));
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(TsEvaluate, DuplicateRuleInvariance) {
    /* Duplicating every rule scales numerator and denominator equally. */
    evonf::Rng rng(22);
    auto fis = builders::random_system(rng, 2, 3, 6);
    FuzzyInferenceSystem doubled = fis;
    for (const auto& r : fis.rules) doubled.rules.push_back(r);
    for (int pt = 0; pt < 50; ++pt) {
        const double x[2] = {rng.uniform(), rng.uniform()};
        EXPECT_NEAR(evonf::ts_evaluate(fis, x), evonf::ts_evaluate(doubled, x), 1e-12);
    }
}

TEST(TsEvaluate, InactiveRulesIgnored) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule r1, r2;
    r1.masks = {0x1};
    r1.consequent = {0.3, 0.0};
    r2.masks = {0x2};
    r2.consequent = {100.0, 0.0};
    r2.active = false;
    fis.rules = {r1, r2};
    const double x = 0.5;
    EXPECT_NEAR(evonf::ts_evaluate(fis, &x), 0.3, 1e-15);
}

TEST(TsEvaluate, UnsupportedKindsThrow) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x1};
    rule.consequent = {0.0, 0.0};
    fis.rules.push_back(rule);
    const double x = 0.5;
    fis.kind = evonf::FisKind::Mamdani;
    EXPECT_THROW(evonf::ts_evaluate(fis, &x), evonf::UnsupportedFisKind);
    fis.kind = evonf::FisKind::Tsukamoto;
    EXPECT_THROW(evonf::ts_evaluate(fis, &x), evonf::UnsupportedFisKind);
}

TEST(TsEvaluate, NoActiveRulesThrows) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x1};
    rule.consequent = {0.0, 0.0};
    rule.active = false;
    fis.rules.push_back(rule);
    const double x = 0.5;
    EXPECT_THROW(evonf::ts_evaluate(fis, &x), evonf::NoActiveRules);
}

TEST(TsEvaluate, DeadFiringFallsBackToConsequentMean) {
    /* Gaussian with floor sigma underflows to exactly zero away from its
     * center, so every rule is dead and the unweighted mean is returned. */
    FuzzyInferenceSystem fis;
    FuzzyVariable v;
    v.name = "x";
    v.lo = 0.0;
    v.hi = 1.0;
    v.partitions = {MembershipFunction::gaussian(0.0, 1e-3),
                    MembershipFunction::gaussian(1.0, 1e-3)};
    fis.inputs.push_back(v);
    FuzzyRule r1, r2;
    r1.masks = {0x1};
    r1.consequent = {1.0, 0.0};
    r2.masks = {0x2};
    r2.consequent = {3.0, 0.0};
    fis.rules = {r1, r2};
    const double x = 0.5; /* 500 sigma from both centers: degrees underflow to 0 */
    EXPECT_DOUBLE_EQ(evonf::mf_eval(v.partitions[0], x), 0.0);
    EXPECT_DOUBLE_EQ(evonf::ts_evaluate(fis, &x), 2.0);
}

TEST(Rmse, WorkedValues) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x3};
    rule.consequent = {0.0, 0.0}; /* constant zero prediction */
    fis.rules.push_back(rule);
    evonf::WindowedDataset d;
    d.n_inputs = 1;
    double x = 0.2;
    d.add_row(&x, 1.0);
    x = 0.8;
    d.add_row(&x, -1.0);
    EXPECT_DOUBLE_EQ(evonf::rmse(fis, d), 1.0); /* errors {1, -1} */
}

TEST(Rmse, ZeroOnExactFit) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x3};
    rule.consequent = {0.5, 2.0};
    fis.rules.push_back(rule);
    evonf::WindowedDataset d;
    d.n_inputs = 1;
    for (double x : {0.1, 0.4, 0.9}) d.add_row(&x, evonf::ts_evaluate(fis, &x));
    EXPECT_DOUBLE_EQ(evonf::rmse(fis, d), 0.0);
}

TEST(Rmse, MatchesReaccumulationOracle) {
    evonf::Rng rng(23);
    auto fis = builders::random_system(rng, 3, 3, 8);
    auto data = builders::random_dataset(rng, 3, 200);
    EXPECT_NEAR(evonf::rmse(fis, data), oracle::rmse_oracle(fis, data), 1e-12);
}

TEST(Rmse, EmptyDatasetThrows) {
    FuzzyInferenceSystem fis = one_var_system();
    FuzzyRule rule;
    rule.masks = {0x1};
    rule.consequent = {0.0, 0.0};
    fis.rules.push_back(rule);
    evonf::WindowedDataset d;
    d.n_inputs = 1;
    EXPECT_THROW(evonf::rmse(fis, d), evonf::EmptyDataset);
}

TEST(Validate, CatchesStructuralErrors) {
    /* valid base */
    auto good = builders::grid_fis({2, 2}, evonf::MfShape::Bell);
    EXPECT_NO_THROW(good.validate());

    auto no_inputs = good;
    no_inputs.inputs.clear();
    EXPECT_THROW(no_inputs.validate(), evonf::InvalidArgument);

    auto bad_universe = good;
    bad_universe.inputs[0].lo = 2.0;
    bad_universe.inputs[0].hi = 1.0;
    EXPECT_THROW(bad_universe.validate(), evonf::InvalidArgument);

    auto one_set = good;
    one_set.inputs[0].partitions.resize(1);
    EXPECT_THROW(one_set.validate(), evonf::InvalidArgument);

    auto center_out = good;
    center_out.inputs[0].partitions[0].r = 5.0;
    EXPECT_THROW(center_out.validate(), evonf::InvalidArgument);

    auto all_inactive = good;
    for (auto& r : all_inactive.rules) r.active = false;
    EXPECT_THROW(all_inactive.validate(), evonf::NoActiveRules);

    auto wide_mask = good;
    wide_mask.rules[0].masks[0] = 0x4; /* label 2 of a 2-set partition */
    EXPECT_THROW(wide_mask.validate(), evonf::InvalidArgument);

    auto zero_mask = good;
    zero_mask.rules[0].masks = {0, 0};
    EXPECT_THROW(zero_mask.validate(), evonf::MalformedRule);

    auto short_consequent = good;
    short_consequent.rules[0].consequent.resize(2);
    EXPECT_THROW(short_consequent.validate(), evonf::InvalidArgument);
}
