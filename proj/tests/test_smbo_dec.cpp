#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include <swarmbo/smbo_dec.hpp>

#include "support.hpp"

using namespace swarmbo;

namespace {

/// 1-D map of ten bins with only the listed bins occupied.
BehaviourPerformanceMap sparse_map(const std::vector<std::pair<int, double>>& cells)
{
    BehaviourPerformanceMap map({10}, "test");
    for (const auto& [bin, f] : cells) {
        Genotype g = empty_genotype();
        g.lineage = static_cast<std::uint64_t>(bin);
        map.insert(g, Descriptor::Constant(1, (bin + 0.5) / 10.0), f);
    }
    return map;
}

SwarmEvaluator table_evaluator(std::vector<double> values)
{
    return [values = std::move(values)](const std::vector<std::size_t>& bins, std::size_t) {
        std::vector<double> out;
        for (std::size_t b : bins)
            out.push_back(values.at(b));
        return out;
    };
}

std::vector<std::optional<std::string>> labels(std::initializer_list<const char*> names)
{
    std::vector<std::optional<std::string>> out;
    for (const char* n : names)
        out.emplace_back(n ? std::optional<std::string>(n) : std::nullopt);
    return out;
}

} // namespace

TEST(StandardError, Values)
{
    EXPECT_DOUBLE_EQ(standard_error_noise({3.0}), 9.0);
    EXPECT_DOUBLE_EQ(standard_error_noise({2.0, 4.0}), 1.0);
    EXPECT_DOUBLE_EQ(standard_error_noise({1.0, 1.0, 1.0}), 0.0);
    EXPECT_THROW(standard_error_noise({}), ContractViolation);
}

TEST(Variant, Names)
{
    for (DecVariant v : {DecVariant::Full, DecVariant::Naive, DecVariant::NoSharing, DecVariant::RandomNoSharing})
        EXPECT_EQ(dec_variant_from_string(to_string(v)), v);
    EXPECT_EQ(dec_variant_from_string("naive"), DecVariant::Naive);
    EXPECT_THROW(dec_variant_from_string("greedy"), ContractViolation);
}

TEST(Groups, FormedByLabel)
{
    const auto map = test::line_map({1, 2, 3, 4});
    DecentralisedOptimizer full(map, labels({"a", "b", "a", nullptr}), {}, 1);
    ASSERT_EQ(full.groups().size(), 2u);
    EXPECT_EQ(full.groups()[0].members, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(full.groups()[1].members, (std::vector<std::size_t>{1}));
    EXPECT_FALSE(full.is_worker(3));
    EXPECT_THROW(full.propose_sample(3), ContractViolation);

    DecConfig solo;
    solo.variant = DecVariant::NoSharing;
    DecentralisedOptimizer alone(map, labels({"a", "a", "a"}), solo, 1);
    EXPECT_EQ(alone.groups().size(), 3u);
}

TEST(Naive, SkipsBusyBinsInRankOrder)
{
    const auto map = sparse_map({{0, 1.0}, {3, 3.0}, {5, 2.0}, {9, 5.0}, {7, 4.0}});
    DecConfig c;
    c.variant = DecVariant::Naive;
    DecentralisedOptimizer opt(map, labels({"a", "a", "a"}), c, 1);
    EXPECT_EQ(opt.propose_sample(0), 9u);
    EXPECT_EQ(opt.propose_sample(1), 7u);
    EXPECT_EQ(opt.propose_sample(2), 3u);
    EXPECT_THROW(opt.propose_sample(0), ContractViolation);
}

TEST(Full, PenalisesNeighbourOfBusySample)
{
    // Bins 4 and 5 set a steep Lipschitz estimate; bin 1 ranks second on
    // UCB alone but sits next to the sample robot 0 is evaluating.
    const auto map = sparse_map({{0, 3.0}, {1, 2.9}, {4, 0.1}, {5, 1.1}, {9, 2.5}});
    DecConfig c;
    DecentralisedOptimizer opt(map, labels({"a", "a"}), c, 1);
    EXPECT_EQ(opt.propose_sample(0), 0u);

    const double lipschitz = 10.0;
    const double m = 3.0;
    const double sd = std::sqrt(1.0 + c.kernel.noise_var);
    auto score = [&](double prior, double distance) {
        const double z = (lipschitz * distance - m + prior) / (std::sqrt(2.0) * sd);
        return (prior + c.kernel.alpha * sd) * 0.5 * std::erfc(-z);
    };
    EXPECT_GT(score(2.5, 0.9), score(2.9, 0.1));
    EXPECT_EQ(opt.propose_sample(1), 9u);

    c.variant = DecVariant::Naive;
    DecentralisedOptimizer naive(map, labels({"a", "a"}), c, 1);
    naive.propose_sample(0);
    EXPECT_EQ(naive.propose_sample(1), 1u);
}

TEST(Full, NoDuplicateConcurrentSamples)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 2);
    std::vector<double> prior(60), truth(60);
    for (std::size_t i = 0; i < 60; ++i) {
        prior[i] = u(gen);
        truth[i] = u(gen);
    }
    const auto map = test::line_map(prior);
    for (DecVariant v : {DecVariant::Full, DecVariant::Naive}) {
        DecConfig c;
        c.variant = v;
        c.max_sim_time = 1000.0;
        DecentralisedOptimizer opt(map, labels({"a", "a", "a", "a", "b", "b"}), c, 4);
        std::size_t checked = 0;
        opt.run([&](const std::vector<std::size_t>& bins, std::size_t round) {
            for (const auto& g : opt.groups()) {
                std::set<std::size_t> busy;
                for (const auto& [robot, bin] : g.busy) {
                    EXPECT_TRUE(busy.insert(bin).second) << to_string(v) << " round " << round;
                    EXPECT_EQ(bins[robot], bin);
                }
                ++checked;
            }
            return table_evaluator(truth)(bins, round);
        });
        EXPECT_EQ(checked, 20u);
    }
}

TEST(Full, SingleRobotMatchesCentralisedSmbo)
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0, 2);
    std::vector<double> prior(80), truth(80);
    for (std::size_t i = 0; i < 80; ++i) {
        prior[i] = u(gen);
        truth[i] = 0.6 * prior[i] + 0.4 * u(gen);
    }
    const auto map = test::line_map(prior);
    DecConfig c;
    c.trials_per_controller = 1;
    c.noise = NoiseRule::Fixed;
    DecentralisedOptimizer opt(map, labels({"a"}), c, 1);
    const auto dec = opt.run(table_evaluator(truth));

    const EvaluationHarness h{[&](std::size_t b) { return truth[b]; }, 100.0};
    const auto central = run_smbo(map, h, {}, c.kernel);
    ASSERT_EQ(dec.per_robot[0].records.size(), central.records.size());
    for (std::size_t i = 0; i < central.records.size(); ++i) {
        EXPECT_EQ(dec.per_robot[0].records[i].bin, central.records[i].bin) << "eval " << i;
        EXPECT_DOUBLE_EQ(dec.per_robot[0].records[i].best_so_far, central.records[i].best_so_far);
    }
}

TEST(Sharing, GroupMembersHoldIdenticalModels)
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 2);
    std::vector<double> prior(40), truth(40);
    for (std::size_t i = 0; i < 40; ++i) {
        prior[i] = u(gen);
        truth[i] = u(gen);
    }
    const auto map = test::line_map(prior);
    DecConfig c;
    c.max_sim_time = 900.0;
    DecentralisedOptimizer opt(map, labels({"a", "b", "a", "a", "b"}), c, 2);
    opt.run(table_evaluator(truth));

    for (std::size_t r : {2u, 3u})
        EXPECT_EQ(opt.known(r).size(), opt.known(0).size());
    for (const auto& [bin, e] : map.elites()) {
        const auto p0 = opt.model(0).posterior(e.descriptor);
        for (std::size_t r : {2u, 3u}) {
            const auto p = opt.model(r).posterior(e.descriptor);
            EXPECT_DOUBLE_EQ(p.mean, p0.mean);
            EXPECT_DOUBLE_EQ(p.variance, p0.variance);
        }
    }
    // Nothing crosses between groups.
    for (std::size_t r : {1u, 4u})
        for (const auto& [bin, msg] : opt.known(r))
            EXPECT_TRUE(msg.sender == 1 || msg.sender == 4);
    for (const auto& d : opt.deliveries())
        for (std::size_t to : d.recipients)
            EXPECT_EQ(opt.group_of(to), opt.group_of(d.message.sender));
}

TEST(Sharing, MergeKeepsLatestObservation)
{
    const auto map = test::line_map({1, 2, 3});
    DecConfig c;
    c.trials_per_controller = 2;
    DecentralisedOptimizer opt(map, labels({"a", "a"}), c, 1);
    const auto bin = opt.propose_sample(0);
    const auto first = opt.complete_trial(0, 2.0);
    EXPECT_EQ(first.trials, 1u);
    EXPECT_DOUBLE_EQ(first.noise, 4.0);
    EXPECT_EQ(opt.current_sample(0), bin);
    const auto second = opt.complete_trial(0, 4.0);
    EXPECT_EQ(second.trials, 2u);
    EXPECT_DOUBLE_EQ(second.mean, 3.0);
    EXPECT_DOUBLE_EQ(second.noise, 1.0);
    EXPECT_GT(second.timestamp, first.timestamp);
    EXPECT_FALSE(opt.current_sample(0));
    EXPECT_DOUBLE_EQ(opt.known(1).at(*bin).mean, 3.0);
    EXPECT_EQ(opt.best_known(1), bin);
    EXPECT_THROW(opt.complete_trial(0, 1.0), ContractViolation);
}

TEST(NoSharing, RobotsSearchIndependently)
{
    std::vector<double> prior(30);
    std::iota(prior.begin(), prior.end(), 0.0);
    const auto map = test::line_map(prior);
    for (DecVariant v : {DecVariant::NoSharing, DecVariant::RandomNoSharing}) {
        DecConfig c;
        c.variant = v;
        c.max_sim_time = 600.0;
        DecentralisedOptimizer opt(map, labels({"a", "a", "a"}), c, 9);
        const auto result = opt.run(table_evaluator(prior));
        for (std::size_t r = 0; r < 3; ++r)
            for (const auto& [bin, msg] : opt.known(r))
                EXPECT_EQ(msg.sender, r);
        if (v == DecVariant::NoSharing) {
            // Same prior, no communication: every robot walks the same path.
            for (std::size_t r = 1; r < 3; ++r)
                for (std::size_t i = 0; i < result.per_robot[0].records.size(); ++i)
                    EXPECT_EQ(result.per_robot[r].records[i].bin, result.per_robot[0].records[i].bin);
        }
    }
}

TEST(Run, AggregateAndCsv)
{
    const auto map = test::line_map({0.5, 1.0, 1.5, 2.0});
    DecConfig c;
    c.max_sim_time = 500.0;
    DecentralisedOptimizer opt(map, labels({"a", "a", nullptr}), c, 3);
    const auto result = opt.run(table_evaluator({0.5, 1.0, 1.5, 2.0}));
    ASSERT_EQ(result.aggregate.records.size(), 5u);
    EXPECT_DOUBLE_EQ(result.aggregate.records[0].best_so_far, 0.0);
    EXPECT_DOUBLE_EQ(result.aggregate.records[1].fitness, 2.0);
    for (std::size_t i = 1; i < 5; ++i)
        EXPECT_GE(result.aggregate.records[i].best_so_far, result.aggregate.records[i - 1].best_so_far);
    EXPECT_FALSE(result.best_bin[2]);

    EXPECT_EQ(dec_csv_header(1), trace_csv_header(1) + ",robot_id,group_id");
    std::ostringstream out;
    write_dec_rows(out, result, 1);
    std::size_t swarm_rows = 0, robot_rows = 0;
    std::istringstream in(out.str());
    for (std::string line; std::getline(in, line);)
        (line.ends_with(",swarm,-") ? swarm_rows : robot_rows)++;
    EXPECT_EQ(swarm_rows, 5u);
    EXPECT_EQ(robot_rows, result.per_robot[0].records.size() + result.per_robot[1].records.size());
}

TEST(Compose, UsesBestKnownBins)
{
    const auto map = test::line_map({1, 2, 3});
    DecResult r;
    r.best_bin = {1u, std::nullopt, 1u};
    std::vector<std::size_t> seen;
    const auto c = compose_swarm(r, map, [&](const std::vector<std::size_t>& bins) {
        seen = bins;
        return 0.25;
    });
    EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 1}));
    EXPECT_FALSE(c.homogeneous);
    EXPECT_DOUBLE_EQ(c.fitness, 0.25);
    r.best_bin = {2u, 2u, std::nullopt};
    EXPECT_TRUE(compose_swarm(r, map, [](const auto&) { return 0.0; }).homogeneous);
}

TEST(Scenario, EndToEndDeterministic)
{
    EvolutionConfig e;
    e.generations = 2;
    e.batch_size = 8;
    e.initial_population = 8;
    e.trials_per_evaluation = 1;
    e.arena = test::short_arena(20.0);
    const auto map = evolve(e);
    const Scenario s = sample_scenario(ScenarioCategory::SoftwareFood, e.arena, 3);
    const auto labels = worker_labels(s);
    EXPECT_EQ(std::count(labels.begin(), labels.end(), std::nullopt), 1);

    DecConfig c;
    c.max_sim_time = 200.0;
    const auto a = run_smbo_dec(map, s, e.arena, c, 5);
    const auto b = run_smbo_dec(map, s, e.arena, c, 5);
    EXPECT_EQ(a.aggregate.records.size(), 10u);
    std::ostringstream oa, ob;
    write_dec_rows(oa, a, map.dims());
    write_dec_rows(ob, b, map.dims());
    EXPECT_EQ(oa.str(), ob.str());
    EXPECT_EQ(a.aggregate.fault, scenario_id(s));
}
