#include <sstream>

#include <gtest/gtest.h>

#include <swarmbo/map_elites.hpp>

#include "support.hpp"

using namespace swarmbo;

namespace {

Descriptor d3(double a, double b, double c)
{
    return Eigen::Vector3d(a, b, c);
}

EvolutionConfig tiny_config()
{
    EvolutionConfig c;
    c.generations = 3;
    c.batch_size = 6;
    c.initial_population = 6;
    c.trials_per_evaluation = 1;
    c.arena = test::short_arena(10.0);
    c.seed = 17;
    return c;
}

} // namespace

TEST(Archive, ReplacementRule)
{
    BehaviourPerformanceMap map({10, 10, 10}, "hbd");
    const Descriptor d = d3(0.15, 0.25, 0.35);
    Genotype a = empty_genotype(), b = empty_genotype(), c = empty_genotype();
    a.lineage = 1;
    b.lineage = 2;
    c.lineage = 3;
    EXPECT_TRUE(map.insert(a, d, 2.0));
    EXPECT_FALSE(map.insert(b, d, 2.0));
    EXPECT_EQ(map.at(map.bin_index(d)).genotype.lineage, 1u);
    EXPECT_FALSE(map.insert(b, d, 1.0));
    EXPECT_TRUE(map.insert(c, d, 2.5));
    EXPECT_EQ(map.at(map.bin_index(d)).genotype.lineage, 3u);
    EXPECT_EQ(map.at(map.bin_index(d)).fitness, 2.5);
    EXPECT_EQ(map.coverage(), 1u);
}

TEST(Archive, BinIndex)
{
    BehaviourPerformanceMap map({10, 10, 10}, "hbd");
    EXPECT_EQ(map.bin_index(d3(0.0, 0.0, 0.0)), 0u);
    EXPECT_EQ(map.bin_index(d3(0.15, 0.25, 0.35)), 123u);
    EXPECT_EQ(map.bin_index(d3(1.0, 1.0, 1.0)), 999u);
    EXPECT_EQ(map.bin_coords(123), (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(map.flat_index({1, 2, 3}), 123u);
    EXPECT_THROW(map.bin_index(d3(1.2, 0.0, 0.0)), ContractViolation);
    EXPECT_THROW(map.bin_index(Eigen::Vector2d(0.1, 0.1)), ContractViolation);
}

TEST(Archive, Neighbours)
{
    const BehaviourPerformanceMap map = test::line_map({1, 2, 3, 4, 5});
    EXPECT_EQ(map.occupied_neighbours(0), (std::vector<std::size_t>{1}));
    EXPECT_EQ(map.occupied_neighbours(2), (std::vector<std::size_t>{1, 3}));
}

TEST(Archive, Metrics)
{
    BehaviourPerformanceMap empty({10}, "x");
    const MapMetrics e = map_metrics(empty);
    EXPECT_EQ(e.global_performance, 0.0);
    EXPECT_EQ(e.coverage, 0u);
    EXPECT_EQ(e.average_performance, 0.0);

    const MapMetrics one = map_metrics(test::line_map({5}));
    EXPECT_EQ(one.global_performance, 5.0);
    EXPECT_EQ(one.coverage, 1u);
    EXPECT_EQ(one.average_performance, 5.0);

    const MapMetrics three = map_metrics(test::line_map({1, 2, 3}));
    EXPECT_EQ(three.global_performance, 3.0);
    EXPECT_EQ(three.coverage, 3u);
    EXPECT_EQ(three.average_performance, 2.0);
}

TEST(Archive, SaveLoadRoundTrip)
{
    const BehaviourPerformanceMap map = evolve(tiny_config());
    std::ostringstream a;
    save_map(a, map);
    std::istringstream in(a.str());
    const BehaviourPerformanceMap back = load_map(in);
    std::ostringstream b;
    save_map(b, back);
    EXPECT_EQ(a.str(), b.str());
    ASSERT_EQ(back.coverage(), map.coverage());
    for (const auto& [bin, e] : map.elites()) {
        EXPECT_EQ(back.at(bin).fitness, e.fitness);
        EXPECT_EQ(back.at(bin).descriptor, e.descriptor);
        EXPECT_EQ(back.at(bin).genotype, e.genotype);
    }
    EXPECT_EQ(back.config_hash(), config_hash(tiny_config()));
}

TEST(Archive, LoadRejectsMalformed)
{
    std::istringstream bad("swarmbo-map 1\ndims 3\ngrid 10 10\n");
    EXPECT_THROW(load_map(bad), ContractViolation);
    std::istringstream wrong("not a map\n");
    EXPECT_THROW(load_map(wrong), ContractViolation);
}

TEST(Evolution, ZeroGenerationsIsInitialPopulation)
{
    EvolutionConfig c = tiny_config();
    c.generations = 0;
    const BehaviourPerformanceMap map = evolve(c);
    BehaviourPerformanceMap expected({10, 10, 10}, "hbd");
    for (std::size_t i = 0; i < c.initial_population; ++i) {
        Rng rng = make_rng(c.seed, {stream::evolution, 0, i});
        Genotype g = random_genotype(rng);
        g.lineage = derive_seed(c.seed, {stream::evaluation, 0, i});
        const Evaluation ev =
            evaluate_homogeneous(g, c.arena, c.descriptor, c.trials_per_evaluation, g.lineage);
        expected.insert(g, ev.descriptor, ev.fitness);
    }
    ASSERT_EQ(map.coverage(), expected.coverage());
    for (const auto& [bin, e] : expected.elites())
        EXPECT_EQ(map.at(bin).fitness, e.fitness);
}

TEST(Evolution, DeterministicAndMonotone)
{
    const EvolutionConfig c = tiny_config();
    std::vector<BehaviourPerformanceMap> snapshots;
    const BehaviourPerformanceMap a = evolve(c, [&](std::size_t, const BehaviourPerformanceMap& m) {
        snapshots.push_back(m);
    });
    const BehaviourPerformanceMap b = evolve(c);
    std::ostringstream sa, sb;
    save_map(sa, a);
    save_map(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    ASSERT_EQ(snapshots.size(), c.generations + 1);
    for (std::size_t g = 1; g < snapshots.size(); ++g) {
        EXPECT_GE(snapshots[g].coverage(), snapshots[g - 1].coverage());
        for (const auto& [bin, e] : snapshots[g - 1].elites())
            EXPECT_GE(snapshots[g].at(bin).fitness, e.fitness);
    }
}

TEST(Evolution, StoredFitnessIsReproducible)
{
    const EvolutionConfig c = tiny_config();
    const BehaviourPerformanceMap map = evolve(c);
    for (const auto& [bin, e] : map.elites()) {
        const Evaluation ev = evaluate_homogeneous(e.genotype, c.arena, c.descriptor, c.trials_per_evaluation,
                                                   e.genotype.lineage);
        EXPECT_EQ(ev.fitness, e.fitness);
        EXPECT_EQ(map.bin_index(ev.descriptor), bin);
    }
}

TEST(Evolution, ConfigHashTracksConfig)
{
    EvolutionConfig a = tiny_config(), b = tiny_config();
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 18;
    EXPECT_NE(config_hash(a), config_hash(b));
    b = a;
    b.arena.food_sources.pop_back();
    EXPECT_NE(config_hash(a), config_hash(b));
}
