#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <swarmbo/map_prior.hpp>

#include "gp_oracle.hpp"
#include "support.hpp"

using namespace swarmbo;

namespace {

Gp::Vector vec(std::initializer_list<double> v)
{
    Gp::Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double e : v)
        x[i++] = e;
    return x;
}

KernelConfig<double> kernel(double rho, double noise, double alpha = 0.9)
{
    KernelConfig<double> k;
    k.rho = rho;
    k.noise_var = noise;
    k.alpha = alpha;
    return k;
}

} // namespace

TEST(Kernel, Values)
{
    EXPECT_EQ(matern52(vec({0.3, 0.4}), vec({0.3, 0.4}), 0.1), 1.0);
    const long double r = std::sqrt(5.0L);
    const long double expected = (1.0L + r + 5.0L / 3.0L) * std::exp(-r);
    EXPECT_NEAR(matern52_distance(1.0, 1.0), static_cast<double>(expected), 1e-15);
    // Frozen from the long-double evaluation above.
    EXPECT_NEAR(matern52_distance(1.0, 1.0), 0.5239941088318203, 1e-12);
    double last = 1.0;
    for (double d = 0.01; d < 5.0; d += 0.01) {
        const double k = matern52_distance(d, 0.3);
        EXPECT_LT(k, last);
        last = k;
    }
    EXPECT_LT(matern52_distance(50.0, 0.3), 1e-100);
}

TEST(Kernel, GramSymmetricAndPsd)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 20; ++rep) {
        Gp::Matrix x(30, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x.data()[i] = u(rng);
        const Gp::Matrix k = matern52_gram(x, 0.2);
        EXPECT_EQ(k, k.transpose());
        EXPECT_TRUE((k.diagonal().array() == 1.0).all());
        Eigen::SelfAdjointEigenSolver<Gp::Matrix> eig(k);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
    }
}

TEST(Posterior, EmptyModelReturnsPrior)
{
    const Gp gp(kernel(0.1, 0.01), [](const Gp::Vector& x) { return 3.0 * x[0]; });
    const auto p = gp.posterior(vec({0.5}));
    EXPECT_EQ(p.mean, 1.5);
    EXPECT_EQ(p.variance, 1.01);
}

TEST(Posterior, NoiselessInterpolation)
{
    Gp gp(kernel(0.1, 0.0), uniform_prior(0.7));
    gp.add_sample(vec({0.2, 0.3}), 4.0);
    const auto p = gp.posterior(vec({0.2, 0.3}));
    EXPECT_NEAR(p.mean, 4.0, 1e-9);
    EXPECT_NEAR(p.variance, 0.0, 1e-9);
}

TEST(Posterior, SingleNoisyObservation)
{
    const double prior = 1.2, f = 3.0, noise = 0.25;
    Gp gp(kernel(0.1, noise), uniform_prior(prior));
    gp.add_sample(vec({0.4}), f);
    const auto p = gp.posterior(vec({0.4}));
    EXPECT_NEAR(p.mean, prior + (f - prior) / (1.0 + noise), 1e-12);
    EXPECT_NEAR(p.variance, 1.0 - 1.0 / (1.0 + noise), 1e-12);
}

TEST(Posterior, MatchesHighPrecisionOracle)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t t = 1 + rng() % 40;
        const double rho = 0.05 + 0.5 * u(rng);
        const double noise_var = 1e-3 + 0.1 * u(rng);
        const double a = 4 * u(rng), b = u(rng);
        auto prior = [a, b](const Gp::Vector& x) { return a * x[0] - b * x[1] * x[2]; };
        Gp gp(kernel(rho, noise_var), prior);
        std::vector<test::Point> xs;
        std::vector<test::Real> fs, ps, ns;
        for (std::size_t i = 0; i < t; ++i) {
            const Gp::Vector x = vec({u(rng), u(rng), u(rng)});
            const double f = 5 * u(rng), n = 1e-3 + 0.2 * u(rng);
            gp.add_sample(x, f, n);
            xs.push_back({x[0], x[1], x[2]});
            fs.push_back(f);
            ps.push_back(prior(x));
            ns.push_back(n);
        }
        for (int q = 0; q < 5; ++q) {
            const Gp::Vector x = vec({u(rng), u(rng), u(rng)});
            const auto o = test::oracle_posterior(xs, fs, ps, ns, rho, {x[0], x[1], x[2]}, prior(x), noise_var);
            const auto p = gp.posterior(x);
            EXPECT_NEAR(p.mean, static_cast<double>(o.mean), 1e-8);
            EXPECT_NEAR(p.variance, static_cast<double>(o.variance), 1e-8);
        }
    }
}

TEST(Posterior, JitterRescuesDuplicates)
{
    Gp gp(kernel(0.1, 0.0), uniform_prior(0.0));
    gp.add_sample(vec({0.5}), 1.0);
    gp.add_sample(vec({0.5}), 1.0);
    EXPECT_GT(gp.jitter(), 0.0);
    EXPECT_NEAR(gp.posterior(vec({0.5})).mean, 1.0, 1e-3);
}

TEST(Posterior, IndefiniteMatrixReported)
{
    Gp gp(kernel(0.1, 0.0), uniform_prior(0.0));
    gp.add_sample(vec({0.5}), 1.0);
    EXPECT_THROW(gp.add_sample(vec({0.6}), 1.0, -5.0), NumericalFailure);
}

TEST(Posterior, ObservationsAtPriorLeaveMeanFlat)
{
    const BehaviourPerformanceMap map = test::line_map({0.5, 2.0, 1.0, 3.0, 0.2, 1.7, 2.2, 0.9});
    Gp gp(kernel(0.1, 0.01), map_prior(map));
    for (std::size_t bin : {1u, 3u, 6u})
        gp.add_sample(map.at(bin).descriptor, map.at(bin).fitness);
    for (const auto& [bin, e] : map.elites())
        EXPECT_LT(std::abs(gp.posterior(e.descriptor).mean - e.fitness), 1e-10);
}

TEST(Ucb, SelectionRules)
{
    Posterior<double> a{1.0, 0.01}, b{1.0, 0.25};
    EXPECT_NEAR(ucb(a, 1.0), 1.1, 1e-15);
    EXPECT_NEAR(ucb(b, 1.0), 1.5, 1e-15);
    const std::vector<std::size_t> ids{4, 9};
    EXPECT_EQ(*argmax_lowest_id(ids, std::vector<double>{ucb(a, 1.0), ucb(b, 1.0)}), 1u);
    EXPECT_EQ(*argmax_lowest_id(ids, std::vector<double>{ucb(a, 0.0), ucb(b, 0.0)}), 0u);
    EXPECT_EQ(*argmax_lowest_id(std::vector<std::size_t>{7, 3}, std::vector<double>{2.0, 2.0}), 1u);
    EXPECT_FALSE(argmax_lowest_id(std::vector<std::size_t>{}, std::vector<double>{}));
}

TEST(Penalty, BasicValues)
{
    const Posterior<double> p{1.0, 0.04};
    PenalisationState<double> state;
    EXPECT_EQ(local_penalty(state, p, vec({0.5})), 1.0);
    // z = 0 when L*d = M - mean
    EXPECT_NEAR(penalty_factor(0.5, p, 2.0, 2.0), 0.5, 1e-12);
    EXPECT_NEAR(penalty_factor(1e6, p, 2.0, 2.0), 1.0, 1e-12);
    const double tiny = penalty_factor(0.0, Posterior<double>{-1e6, 1e-6}, 1.0, 10.0);
    EXPECT_GT(tiny, 0.0);
    EXPECT_LE(tiny, 1.0);
    const double z = (2.0 * 0.1 - 2.0 + 1.0) / (std::sqrt(2.0) * 0.2);
    EXPECT_NEAR(penalty_factor(0.1, p, 2.0, 2.0), 0.5 * std::erfc(-z), 1e-15);
}

TEST(Penalty, MultiplierInUnitInterval)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 2000; ++rep) {
        PenalisationState<double> state;
        state.lipschitz = 10 * u(rng);
        state.max_value = 5 * u(rng);
        for (int k = 0; k < 4; ++k)
            state.busy.push_back(vec({u(rng), u(rng)}));
        const Posterior<double> p{5 * u(rng) - 2, u(rng) * u(rng)};
        const double m = local_penalty(state, p, vec({u(rng), u(rng)}));
        EXPECT_GT(m, 0.0);
        EXPECT_LE(m, 1.0);
    }
}

TEST(Lipschitz, Estimates)
{
    EXPECT_EQ(estimate_lipschitz(test::line_map({2, 2, 2, 2})), 1e-6);
    EXPECT_NEAR(estimate_lipschitz(test::line_map({0, 1})), 2.0, 1e-12);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 5);
    std::vector<double> f(20);
    for (auto& v : f)
        v = u(rng);
    const auto map = test::line_map(f);
    const double l = estimate_lipschitz(map);
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        EXPECT_GE(l + 1e-12, std::abs(f[i + 1] - f[i]) / 0.05);
}

TEST(Prior, MapPriorReadsBins)
{
    const auto map = test::line_map({0.5, 2.0, 1.0});
    const auto prior = map_prior(map);
    EXPECT_EQ(prior(vec({0.1})), 0.5);
    EXPECT_EQ(prior(vec({0.5})), 2.0);
    EXPECT_EQ(prior(vec({0.99})), 1.0);
    EXPECT_EQ(best_bin(map), 1u);
    EXPECT_DOUBLE_EQ(mean_fitness(map), 3.5 / 3);
}
