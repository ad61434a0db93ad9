#include <swarmbo/experiment.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <swarmbo/stats.hpp>

namespace swarmbo {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kArenaKeys{"width",          "height",           "nest_width",      "control_dt",
                                       "trial_duration", "wall_thickness",   "n_robots",        "robot.body_length",
                                       "robot.body_width", "robot.max_linear_speed", "robot.wheel_track",
                                       "robot.proximity_range", "food"};

const std::set<std::string> kExperimentKeys{
    "generations", "batch_size",  "initial_population", "trials_per_evaluation", "descriptor",
    "bins_per_dim", "seed",       "mutation.weight",    "mutation.weight_sigma", "mutation.add_connection",
    "mutation.add_node", "mutation.remove_connection", "map", "learners", "variants", "categories",
    "replicates",  "seeds",       "budget_evals",       "budget_time",           "adapt_trials",
    "dec.trials_per_controller", "reference", "kernel.rho", "kernel.noise_var", "kernel.alpha"};

std::size_t get_size(const KeyValueConfig& cfg, const std::string& key, std::size_t fallback)
{
    const std::int64_t v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0)
        throw ContractViolation("'" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> list(const std::string& text)
{
    std::vector<std::string> out;
    for (const auto& item : split(text, ','))
        if (const auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

template <class T>
std::string join(const std::vector<T>& items)
{
    std::string s;
    for (const auto& item : items) {
        if (!s.empty())
            s += ',';
        if constexpr (std::is_arithmetic_v<T>)
            s += std::to_string(item);
        else
            s += to_string(item);
    }
    return s;
}

std::string cell_name(const std::string& learner, const Scenario& scenario, std::size_t replicate, std::uint64_t seed)
{
    return learner + "__" + to_string(scenario.category) + "__" + std::to_string(replicate) + "__" +
           std::to_string(seed) + ".csv";
}

} // namespace

ExperimentConfig experiment_from_config(const KeyValueConfig& cfg)
{
    for (const auto& key : cfg.keys())
        if (!kArenaKeys.count(key) && !kExperimentKeys.count(key))
            throw ContractViolation("unknown configuration key '" + key + "'");

    ExperimentConfig c;
    auto& e = c.evolution;
    e.arena = arena_from_config(cfg);
    e.generations = get_size(cfg, "generations", e.generations);
    e.batch_size = get_size(cfg, "batch_size", e.batch_size);
    e.initial_population = get_size(cfg, "initial_population", e.initial_population);
    e.trials_per_evaluation = get_size(cfg, "trials_per_evaluation", e.trials_per_evaluation);
    e.descriptor = descriptor_kind_from_string(cfg.get_string("descriptor", to_string(e.descriptor)));
    e.bins_per_dim = static_cast<int>(get_size(cfg, "bins_per_dim", static_cast<std::size_t>(e.bins_per_dim)));
    e.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(e.seed)));
    e.mutation.weight = cfg.get_double("mutation.weight", e.mutation.weight);
    e.mutation.weight_sigma = cfg.get_double("mutation.weight_sigma", e.mutation.weight_sigma);
    e.mutation.add_connection = cfg.get_double("mutation.add_connection", e.mutation.add_connection);
    e.mutation.add_node = cfg.get_double("mutation.add_node", e.mutation.add_node);
    e.mutation.remove_connection = cfg.get_double("mutation.remove_connection", e.mutation.remove_connection);

    c.map_path = cfg.get_string("map", c.map_path);
    if (cfg.has("learners")) {
        c.learners.clear();
        for (const auto& name : list(cfg.get_string("learners", "")))
            c.learners.push_back(learner_from_string(name));
    }
    if (cfg.has("variants")) {
        c.dec_variants.clear();
        for (const auto& name : list(cfg.get_string("variants", "")))
            c.dec_variants.push_back(dec_variant_from_string(name));
    }
    if (cfg.has("categories")) {
        c.categories.clear();
        for (const auto& name : list(cfg.get_string("categories", "")))
            c.categories.push_back(category_from_string(name));
    }
    c.replicates = get_size(cfg, "replicates", c.replicates);
    if (cfg.has("seeds")) {
        c.seeds.clear();
        for (const auto& s : list(cfg.get_string("seeds", "")))
            c.seeds.push_back(static_cast<std::uint64_t>(parse_int(s)));
    }
    c.budget.max_evaluations = get_size(cfg, "budget_evals", c.budget.max_evaluations);
    c.budget.max_sim_time = cfg.get_double("budget_time", c.budget.max_sim_time);
    c.trials_per_evaluation = get_size(cfg, "adapt_trials", c.trials_per_evaluation);
    c.dec.trials_per_controller = get_size(cfg, "dec.trials_per_controller", c.dec.trials_per_controller);
    c.dec.kernel.rho = cfg.get_double("kernel.rho", c.dec.kernel.rho);
    c.dec.kernel.noise_var = cfg.get_double("kernel.noise_var", c.dec.kernel.noise_var);
    c.dec.kernel.alpha = cfg.get_double("kernel.alpha", c.dec.kernel.alpha);
    c.dec.kernel.validate();
    c.reference_learner = cfg.get_string("reference", c.reference_learner);
    return c;
}

std::string canonical_text(const ExperimentConfig& c)
{
    std::ostringstream out;
    out << canonical_text(c.evolution) << "map = " << c.map_path << "\n"
        << "learners = " << join(c.learners) << "\n"
        << "variants = " << join(c.dec_variants) << "\n"
        << "categories = " << join(c.categories) << "\n"
        << "replicates = " << c.replicates << "\n"
        << "seeds = " << join(c.seeds) << "\n"
        << "budget_evals = " << c.budget.max_evaluations << "\n"
        << "budget_time = " << format_double(c.budget.max_sim_time) << "\n"
        << "adapt_trials = " << c.trials_per_evaluation << "\n"
        << "dec.trials_per_controller = " << c.dec.trials_per_controller << "\n"
        << "kernel.rho = " << format_double(c.dec.kernel.rho) << "\n"
        << "kernel.noise_var = " << format_double(c.dec.kernel.noise_var) << "\n"
        << "kernel.alpha = " << format_double(c.dec.kernel.alpha) << "\n"
        << "reference = " << c.reference_learner << "\n";
    return out.str();
}

std::string config_hash(const ExperimentConfig& config)
{
    return hash_hex(canonical_text(config));
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ContractViolation("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out)
            throw ContractViolation("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string provenance_line(const std::string& hash, std::uint64_t seed)
{
    return "# swarmbo config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

BehaviourPerformanceMap cmd_evolve(const ExperimentConfig& config, const std::string& out_dir)
{
    const std::string hash = config_hash(config.evolution);
    std::ostringstream metrics;
    metrics << provenance_line(hash, config.evolution.seed) << "generation,global,coverage,average\n";
    BehaviourPerformanceMap map = evolve(config.evolution, [&](std::size_t gen, const BehaviourPerformanceMap& m) {
        const MapMetrics mm = map_metrics(m);
        metrics << gen << ',' << format_double(mm.global_performance) << ',' << mm.coverage << ','
                << format_double(mm.average_performance) << '\n';
    });
    std::ostringstream archive;
    save_map(archive, map);
    write_file_atomic((fs::path(out_dir) / "map.txt").string(), archive.str());
    write_file_atomic((fs::path(out_dir) / "metrics.csv").string(), metrics.str());
    return map;
}

AdaptSummary cmd_adapt(const ExperimentConfig& config, const BehaviourPerformanceMap& map, const std::string& out_dir)
{
    if (map.empty())
        throw ContractViolation("adaptation needs a non-empty map");
    const std::string hash = config_hash(config);
    const ArenaConfig& arena = config.evolution.arena;
    const std::size_t dims = map.dims();
    const fs::path traces = fs::path(out_dir) / "traces";
    AdaptSummary summary;
    std::ostringstream scenario_list;
    scenario_list << provenance_line(hash, config.evolution.seed);

    for (const ScenarioCategory category : config.categories) {
        for (std::size_t r = 0; r < config.replicates; ++r) {
            const Scenario scenario = sample_scenario(
                category, arena,
                derive_seed(config.evolution.seed, {stream::scenario, static_cast<std::uint64_t>(category), r}));
            scenario_list << serialize(scenario) << '\n';
            for (const std::uint64_t seed : config.seeds) {
                const std::uint64_t run_seed = derive_seed(seed, {stream::evaluation, static_cast<std::uint64_t>(category), r});
                const EvaluationHarness harness = make_harness(map, scenario, arena, run_seed, config.trials_per_evaluation);

                std::ostringstream base;
                base << provenance_line(hash, seed) << trace_csv_header(dims) << '\n';
                AdaptationTrace baseline;
                baseline.learner = "fault-injection";
                baseline.fault = scenario_id(scenario);
                baseline.seed = seed;
                const std::size_t elite = best_bin(map);
                const double f0 = harness.evaluate(elite);
                baseline.records.push_back({0, 0.0, elite, map.at(elite).descriptor, f0, f0});
                write_trace_rows(base, baseline, dims);
                write_file_atomic((traces / cell_name("fault-injection", scenario, r, seed)).string(), base.str());
                ++summary.files;
                ++summary.rows;

                for (const Learner learner : config.learners) {
                    AdaptationTrace trace = run_learner(learner, map, harness, config.budget, config.dec.kernel, seed);
                    trace.fault = scenario_id(scenario);
                    std::ostringstream out;
                    out << provenance_line(hash, seed) << trace_csv_header(dims) << '\n';
                    write_trace_rows(out, trace, dims);
                    write_file_atomic((traces / cell_name(to_string(learner), scenario, r, seed)).string(), out.str());
                    ++summary.files;
                    summary.rows += trace.records.size();
                }

                for (const DecVariant variant : config.dec_variants) {
                    DecConfig dec = config.dec;
                    dec.variant = variant;
                    dec.max_controllers_per_robot = config.budget.max_evaluations;
                    dec.max_sim_time = config.budget.max_sim_time;
                    const DecResult result = run_smbo_dec(map, scenario, arena, dec, seed);
                    const ComposedSwarm composed =
                        compose_swarm(result, map, make_composed_evaluator(map, scenario, arena, seed));
                    std::ostringstream out;
                    out << provenance_line(hash, seed) << "# composed_fitness=" << format_double(composed.fitness)
                        << " homogeneous=" << (composed.homogeneous ? 1 : 0) << '\n'
                        << dec_csv_header(dims) << '\n';
                    write_dec_rows(out, result, dims);
                    write_file_atomic((traces / cell_name(to_string(variant), scenario, r, seed)).string(), out.str());
                    ++summary.files;
                    for (const auto& t : result.per_robot)
                        summary.rows += t.records.size();
                    summary.rows += result.aggregate.records.size();
                }
            }
        }
    }
    write_file_atomic((fs::path(out_dir) / "scenarios.txt").string(), scenario_list.str());
    return summary;
}

namespace {

struct CellFinal {
    std::string learner;
    std::string category;
    double value = 0.0;
};

/// Final value of a trace file; decentralised traces also yield their
/// composed-swarm fitness under `<variant>/composed`.
std::vector<CellFinal> read_cell(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractViolation("cannot read trace '" + path.string() + "'");
    std::string line;
    std::vector<std::string> header;
    std::optional<CellFinal> cell;
    std::optional<double> composed;
    const std::string composed_tag = "# composed_fitness=";
    while (std::getline(in, line)) {
        if (line.rfind(composed_tag, 0) == 0) {
            const auto rest = line.substr(composed_tag.size());
            composed = parse_double(rest.substr(0, rest.find(' ')));
            continue;
        }
        if (line.empty() || line[0] == '#')
            continue;
        const auto fields = split(line, ',');
        if (header.empty()) {
            header = fields;
            continue;
        }
        if (fields.size() != header.size())
            throw ContractViolation("malformed row in '" + path.string() + "'");
        auto col = [&](const std::string& name) -> const std::string& {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end())
                throw ContractViolation("trace '" + path.string() + "' lacks column '" + name + "'");
            return fields[static_cast<std::size_t>(it - header.begin())];
        };
        if (std::find(header.begin(), header.end(), "robot_id") != header.end() && col("robot_id") != "swarm")
            continue;
        CellFinal c;
        c.learner = col("learner");
        const std::string fault = col("fault");
        c.category = fault.substr(0, fault.find(':'));
        c.value = parse_double(col("best_so_far"));
        cell = c;
    }
    std::vector<CellFinal> out;
    if (cell) {
        out.push_back(*cell);
        if (composed)
            out.push_back({cell->learner + "/composed", cell->category, *composed});
    }
    return out;
}

} // namespace

std::vector<CompareRow> compare_traces(const std::string& trace_dir, const std::string& reference, double alpha)
{
    if (!fs::is_directory(trace_dir))
        throw ContractViolation("trace directory '" + trace_dir + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(trace_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto& f : files)
        for (const auto& cell : read_cell(f))
            groups[{cell.category, cell.learner}].push_back(cell.value);

    std::vector<CompareRow> rows;
    for (const auto& [key, values] : groups) {
        CompareRow row;
        row.category = key.first;
        row.learner = key.second;
        row.values = values;
        row.mean = mean(values);
        row.sd = stddev(values);
        row.median = median(values);
        if (row.learner != reference) {
            const auto ref = groups.find({row.category, reference});
            if (ref != groups.end()) {
                row.p = wilcoxon_rank_sum(ref->second, values).p;
                row.significant = *row.p < alpha;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows)
{
    std::ostringstream out;
    out << "category,learner,n,mean,sd,median,p_vs_reference,significant\n";
    for (const auto& r : rows)
        out << r.category << ',' << r.learner << ',' << r.values.size() << ',' << format_double(r.mean) << ','
            << format_double(r.sd) << ',' << format_double(r.median) << ',' << (r.p ? format_double(*r.p) : "-")
            << ',' << (r.significant ? 1 : 0) << '\n';
    return out.str();
}

std::string compare_table(const std::vector<CompareRow>& rows, const std::string& reference)
{
    std::ostringstream out;
    out << std::left << std::setw(18) << "category" << std::setw(28) << "learner" << std::setw(6) << "n"
        << std::setw(20) << "mean +- sd" << "p vs " << reference << '\n';
    out << std::fixed << std::setprecision(2);
    for (const auto& r : rows) {
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(2) << r.mean << " +- " << r.sd;
        out << std::setw(18) << r.category << std::setw(28) << r.learner << std::setw(6) << r.values.size()
            << std::setw(20) << ms.str();
        if (r.p) {
            std::ostringstream ps;
            ps << std::setprecision(4) << *r.p;
            out << ps.str() << (r.significant ? " *" : "");
        }
        else
            out << '-';
        out << '\n';
    }
    return out.str();
}

} // namespace swarmbo
