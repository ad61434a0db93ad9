#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include <swarmbo/experiment.hpp>
#include <swarmbo/simulator.hpp>

using namespace swarmbo;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string trace_path;
    std::string map_path;
    std::string descriptor;
    std::string learners;
    std::string variants;
    std::string categories;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> replicates;
    std::optional<std::size_t> n_seeds;
    std::optional<std::size_t> budget_evals;
    std::optional<double> budget_time;
    std::string trace_dir;
    std::string reference = "smbo";
};

ExperimentConfig build_config(const Options& o)
{
    const KeyValueConfig cfg = o.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config_path);
    ExperimentConfig c = experiment_from_config(cfg);
    if (o.seed)
        c.evolution.seed = *o.seed;
    if (!o.map_path.empty())
        c.map_path = o.map_path;
    if (!o.descriptor.empty())
        c.evolution.descriptor = descriptor_kind_from_string(o.descriptor);
    if (o.generations)
        c.evolution.generations = *o.generations;
    if (o.batch)
        c.evolution.batch_size = *o.batch;
    auto names = [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& s : split(text, ','))
            if (!trim(s).empty())
                out.push_back(trim(s));
        return out;
    };
    if (!o.learners.empty()) {
        c.learners.clear();
        for (const auto& n : names(o.learners))
            if (n != "none")
                c.learners.push_back(learner_from_string(n));
    }
    if (!o.variants.empty()) {
        c.dec_variants.clear();
        for (const auto& n : names(o.variants))
            c.dec_variants.push_back(dec_variant_from_string(n));
    }
    if (!o.categories.empty()) {
        c.categories.clear();
        for (const auto& n : names(o.categories))
            c.categories.push_back(category_from_string(n));
    }
    if (o.replicates)
        c.replicates = *o.replicates;
    if (o.n_seeds) {
        c.seeds.clear();
        for (std::size_t s = 1; s <= *o.n_seeds; ++s)
            c.seeds.push_back(s);
    }
    if (o.budget_evals)
        c.budget.max_evaluations = *o.budget_evals;
    if (o.budget_time)
        c.budget.max_sim_time = *o.budget_time;
    c.reference_learner = o.reference;
    return c;
}

void export_trace(const std::string& path, const BehaviourPerformanceMap& map, const ArenaConfig& arena,
                  const Disturbance& disturbance, std::uint64_t seed)
{
    const std::vector<Genotype> swarm(arena.n_robots, map.at(best_bin(map)).genotype);
    const TrialResult result = run_trial(swarm, arena, disturbance, seed);
    std::ostringstream out;
    write_trace(out, result.trace);
    write_file_atomic(path, out.str());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Swarm behaviour-performance maps and fault adaptation"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output directory");
    };

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "evolve a behaviour-performance map");
    common(evolve_cmd);
    evolve_cmd->add_option("--descriptor", o.descriptor, "hbd, sdbc or sdbc-std");
    evolve_cmd->add_option("--generations", o.generations, "number of generations");
    evolve_cmd->add_option("--batch", o.batch, "offspring per generation");
    evolve_cmd->add_option("--trace", o.trace_path, "write a trajectory CSV of the best elite");

    CLI::App* adapt_cmd = app.add_subcommand("adapt", "adapt to sampled fault scenarios");
    common(adapt_cmd);
    adapt_cmd->add_option("--map", o.map_path, "archive written by evolve");
    adapt_cmd->add_option("--learners", o.learners, "comma list: smbo, smbo-uniform, random, gradient-ascent, none");
    adapt_cmd->add_option("--variant", o.variants,
                          "comma list of decentralised variants: smbo-dec, smbo-dec-naive, smbo-no-sharing, "
                          "random-no-sharing");
    adapt_cmd->add_option("--category", o.categories, "comma list of scenario categories");
    adapt_cmd->add_option("--replicates", o.replicates, "scenarios per category");
    adapt_cmd->add_option("--seeds", o.n_seeds, "number of seeds (1..n)");
    adapt_cmd->add_option("--budget-evals", o.budget_evals, "maximum evaluations");
    adapt_cmd->add_option("--budget-time", o.budget_time, "maximum simulated seconds");
    adapt_cmd->add_option("--trace", o.trace_path, "write a trajectory CSV of the best elite in the first scenario");

    CLI::App* compare_cmd = app.add_subcommand("compare", "summarise a trace directory");
    compare_cmd->add_option("traces", o.trace_dir, "directory of trace CSVs")->required();
    compare_cmd->add_option("--reference", o.reference, "reference learner for the rank-sum test");
    compare_cmd->add_option("--out", o.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (evolve_cmd->parsed()) {
            const ExperimentConfig c = build_config(o);
            const BehaviourPerformanceMap map = cmd_evolve(c, o.out);
            const MapMetrics m = map_metrics(map);
            std::cout << "config_hash " << config_hash(c.evolution) << "\n"
                      << "coverage " << m.coverage << "\n"
                      << "global " << format_double(m.global_performance) << "\n";
            if (!o.trace_path.empty())
                export_trace(o.trace_path, map, c.evolution.arena, Disturbance{}, c.evolution.seed);
        }
        else if (adapt_cmd->parsed()) {
            const ExperimentConfig c = build_config(o);
            if (c.map_path.empty())
                throw ContractViolation("adapt needs --map or a 'map' configuration key");
            const BehaviourPerformanceMap map = load_map(c.map_path);
            const AdaptSummary s = cmd_adapt(c, map, o.out);
            std::cout << "config_hash " << config_hash(c) << "\n"
                      << "files " << s.files << "\n"
                      << "rows " << s.rows << "\n";
            if (!o.trace_path.empty() && !c.categories.empty()) {
                const Scenario sc = sample_scenario(
                    c.categories.front(), c.evolution.arena,
                    derive_seed(c.evolution.seed, {stream::scenario, static_cast<std::uint64_t>(c.categories.front()), 0}));
                export_trace(o.trace_path, map, scenario_arena(sc, c.evolution.arena), sc.disturbance(), c.evolution.seed);
            }
        }
        else if (compare_cmd->parsed()) {
            const auto rows = compare_traces(o.trace_dir, o.reference);
            write_file_atomic((std::filesystem::path(o.out) / "compare.csv").string(), compare_csv(rows));
            std::cout << compare_table(rows, o.reference);
        }
    }
    catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
