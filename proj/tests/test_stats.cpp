#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <swarmbo/config.hpp>
#include <swarmbo/stats.hpp>

#include "rank_sum_oracle.hpp"

using namespace swarmbo;

TEST(Summary, MeanSdMedian)
{
    const std::vector<double> v{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(mean(v), 2.5);
    EXPECT_DOUBLE_EQ(median(v), 2.5);
    EXPECT_NEAR(stddev(v), std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_DOUBLE_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
    EXPECT_THROW(mean(std::vector<double>{}), ContractViolation);
}

TEST(RankSum, SmallReference)
{
    const auto r = wilcoxon_rank_sum(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.w, 6.0);
    EXPECT_NEAR(r.p, 0.1, 1e-15);
}

TEST(RankSum, IdenticalSamples)
{
    const std::vector<double> a{1, 2, 3, 4, 5};
    EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(a, a).p, 1.0);
    const std::vector<double> big(30, 2.0);
    EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(big, big).p, 1.0);
}

TEST(RankSum, ExactMatchesPermutationOracle)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> value(0, 6);
    for (std::size_t nx = 1; nx <= 6; ++nx)
        for (std::size_t ny = 1; ny <= 6; ++ny)
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> x(nx), y(ny);
                for (auto& v : x)
                    v = value(rng);
                for (auto& v : y)
                    v = value(rng);
                const auto r = wilcoxon_rank_sum(x, y);
                EXPECT_TRUE(r.exact);
                EXPECT_EQ(r.p, test::permutation_p(x, y));
            }
}

TEST(RankSum, NormalApproximationLargeSamples)
{
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(i);
        y.push_back(i + 10);
    }
    const auto r = wilcoxon_rank_sum(x, y);
    EXPECT_FALSE(r.exact);
    // W = sum of ranks of x: 1..10 then 10 ties with y at midranks.
    const double n = 40, nx = 20, ny = 20;
    const double tie = 10 * (8 - 2);
    const double var = nx * ny / 12 * ((n + 1) - tie / (n * (n - 1)));
    const double z = (r.w - nx * (n + 1) / 2) / std::sqrt(var);
    EXPECT_NEAR(r.p, std::erfc(std::abs(z) / std::sqrt(2.0)), 1e-15);
    EXPECT_LT(r.p, 0.01);
}
