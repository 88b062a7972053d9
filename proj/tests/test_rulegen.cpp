#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evonf/rulegen.hpp"

using evonf::default_partition;
using evonf::grid_partition;
using evonf::make_grid_fis;
using evonf::MfShape;

TEST(DefaultPartition, CentersEvenlySpaced) {
    const auto g2 = default_partition(0.0, 1.0, 2, MfShape::Gaussian);
    ASSERT_EQ(g2.size(), 2u);
    EXPECT_DOUBLE_EQ(g2[0].center(), 0.0);
    EXPECT_DOUBLE_EQ(g2[1].center(), 1.0);

    const auto b3 = default_partition(0.0, 1.0, 3, MfShape::Bell);
    ASSERT_EQ(b3.size(), 3u);
    EXPECT_DOUBLE_EQ(b3[0].center(), 0.0);
    EXPECT_DOUBLE_EQ(b3[1].center(), 0.5);
    EXPECT_DOUBLE_EQ(b3[2].center(), 1.0);

    const auto b4 = default_partition(-2.0, 4.0, 4, MfShape::Bell);
    ASSERT_EQ(b4.size(), 4u);
    EXPECT_DOUBLE_EQ(b4[0].center(), -2.0);
    EXPECT_DOUBLE_EQ(b4[3].center(), 4.0);
    EXPECT_NEAR(b4[1].center(), 0.0, 1e-12);
    EXPECT_NEAR(b4[2].center(), 2.0, 1e-12);
}

TEST(DefaultPartition, NeighborsCrossAtHalf) {
    /* Adjacent sets meet at degree 0.5 halfway between their centers, for
     * both shapes and all partition sizes. */
    for (MfShape shape : {MfShape::Bell, MfShape::Gaussian}) {
        for (std::size_t m = 2; m <= 4; ++m) {
            const auto parts = default_partition(0.0, 1.0, m, shape);
            for (std::size_t l = 0; l + 1 < m; ++l) {
                const double mid = 0.5 * (parts[l].center() + parts[l + 1].center());
                EXPECT_NEAR(evonf::mf_eval(parts[l], mid), 0.5, 1e-9)
                    << "shape " << static_cast<int>(shape) << " m " << m << " l " << l;
                EXPECT_NEAR(evonf::mf_eval(parts[l + 1], mid), 0.5, 1e-9);
            }
        }
    }
}

TEST(DefaultPartition, RejectsBadCounts) {
    EXPECT_THROW(default_partition(0.0, 1.0, 1, MfShape::Bell), evonf::InvalidCount);
    EXPECT_THROW(default_partition(0.0, 1.0, 5, MfShape::Bell), evonf::InvalidCount);
    EXPECT_THROW(default_partition(0.0, 1.0, 0, MfShape::Bell), evonf::InvalidCount);
}

TEST(GridPartition, TableCounts) {
    const auto f4 = make_grid_fis({{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {4, 4, 4, 4}, MfShape::Bell);
    EXPECT_EQ(f4.rules.size(), 256u);
    EXPECT_EQ(f4.active_rule_count(), 256u);

    const auto f3 = make_grid_fis({{0, 1}, {0, 1}}, {3, 3}, MfShape::Bell);
    EXPECT_EQ(f3.rules.size(), 9u);

    const auto f2 = make_grid_fis({{0, 1}, {0, 1}}, {2, 2}, MfShape::Gaussian);
    EXPECT_EQ(f2.rules.size(), 4u);
}

TEST(GridPartition, CountIsProductOfPartitionSizes) {
    for (std::size_t a = 2; a <= 4; ++a)
        for (std::size_t b = 2; b <= 4; ++b)
            for (std::size_t c = 2; c <= 4; ++c) {
                const auto fis =
                    make_grid_fis({{0, 1}, {0, 1}, {0, 1}}, {a, b, c}, MfShape::Bell);
                EXPECT_EQ(fis.rules.size(), a * b * c);
            }
}

TEST(GridPartition, LexicographicSingleLabelRules) {
    const auto fis = make_grid_fis({{0, 1}, {0, 1}}, {2, 3}, MfShape::Bell);
    ASSERT_EQ(fis.rules.size(), 6u);
    /* last variable fastest: (0,0) (0,1) (0,2) (1,0) (1,1) (1,2) */
    const std::uint8_t expect[6][2] = {{1, 1}, {1, 2}, {1, 4}, {2, 1}, {2, 2}, {2, 4}};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(fis.rules[i].masks[0], expect[i][0]) << "rule " << i;
        EXPECT_EQ(fis.rules[i].masks[1], expect[i][1]) << "rule " << i;
    }
}

TEST(GridPartition, EveryCombinationOnceAndValid) {
    const auto fis = make_grid_fis({{0, 1}, {0, 1}, {0, 1}}, {3, 2, 4}, MfShape::Bell);
    EXPECT_NO_THROW(fis.validate());
    std::vector<int> seen(3 * 2 * 4, 0);
    for (const auto& rule : fis.rules) {
        std::size_t idx = 0;
        for (std::size_t v = 0; v < 3; ++v) {
            int label = -1, bits = 0;
            for (int l = 0; l < 4; ++l)
                if (rule.masks[v] & (1 << l)) {
                    label = l;
                    ++bits;
                }
            ASSERT_EQ(bits, 1); /* grid rules select exactly one label per variable */
            idx = idx * fis.inputs[v].partitions.size() + static_cast<std::size_t>(label);
        }
        ++seen[idx];
    }
    for (int count : seen) EXPECT_EQ(count, 1);
}

TEST(GridPartition, ZeroConsequentsAndDefaultNames) {
    const auto fis = make_grid_fis({{-1, 1}, {0, 2}}, {2, 2}, MfShape::Bell);
    EXPECT_EQ(fis.inputs[0].name, "x0");
    EXPECT_EQ(fis.inputs[1].name, "x1");
    for (const auto& rule : fis.rules) {
        ASSERT_EQ(rule.consequent.size(), 3u);
        for (double c : rule.consequent) EXPECT_DOUBLE_EQ(c, 0.0);
        EXPECT_TRUE(rule.active);
    }
}

TEST(GridPartition, HonorsOperatorParams) {
    evonf::OperatorParams ops{2.5, 3.5, false};
    const auto fis = make_grid_fis({{0, 1}}, {2}, MfShape::Bell, ops);
    EXPECT_DOUBLE_EQ(fis.operators.tnorm_p, 2.5);
    EXPECT_DOUBLE_EQ(fis.operators.tconorm_p, 3.5);
    EXPECT_FALSE(fis.operators.fixed_min);
}
