#include <swarmbo/map_elites.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace swarmbo {

BehaviourPerformanceMap::BehaviourPerformanceMap(std::vector<int> bins_per_dim, std::string descriptor_name,
                                                 std::string config_hash)
    : bins_per_dim_(std::move(bins_per_dim)), descriptor_name_(std::move(descriptor_name)),
      config_hash_(std::move(config_hash))
{
    if (bins_per_dim_.empty())
        throw ContractViolation("map needs at least one dimension");
    for (int b : bins_per_dim_)
        if (b <= 0)
            throw ContractViolation("bins per dimension must be positive");
}

std::size_t BehaviourPerformanceMap::n_bins() const
{
    std::size_t n = 1;
    for (int b : bins_per_dim_)
        n *= static_cast<std::size_t>(b);
    return n;
}

std::size_t BehaviourPerformanceMap::bin_index(const Descriptor& d) const
{
    if (static_cast<std::size_t>(d.size()) != dims())
        throw ContractViolation("descriptor dimension does not match the map");
    std::vector<int> coords(dims());
    for (std::size_t k = 0; k < dims(); ++k) {
        if (!(d[k] >= 0.0 && d[k] <= 1.0))
            throw ContractViolation("descriptor outside the unit cube");
        coords[k] = std::min(static_cast<int>(std::floor(d[k] * bins_per_dim_[k])), bins_per_dim_[k] - 1);
    }
    return flat_index(coords);
}

std::size_t BehaviourPerformanceMap::flat_index(const std::vector<int>& coords) const
{
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dims(); ++k)
        idx = idx * static_cast<std::size_t>(bins_per_dim_[k]) + static_cast<std::size_t>(coords[k]);
    return idx;
}

std::vector<int> BehaviourPerformanceMap::bin_coords(std::size_t bin) const
{
    std::vector<int> coords(dims());
    for (std::size_t k = dims(); k-- > 0;) {
        coords[k] = static_cast<int>(bin % static_cast<std::size_t>(bins_per_dim_[k]));
        bin /= static_cast<std::size_t>(bins_per_dim_[k]);
    }
    return coords;
}

std::vector<std::size_t> BehaviourPerformanceMap::occupied_neighbours(std::size_t bin) const
{
    std::vector<std::size_t> out;
    const auto coords = bin_coords(bin);
    for (std::size_t k = 0; k < dims(); ++k)
        for (int delta : {-1, 1}) {
            auto c = coords;
            c[k] += delta;
            if (c[k] < 0 || c[k] >= bins_per_dim_[k])
                continue;
            const std::size_t nb = flat_index(c);
            if (elites_.count(nb))
                out.push_back(nb);
        }
    std::sort(out.begin(), out.end());
    return out;
}

bool BehaviourPerformanceMap::insert(const Genotype& g, const Descriptor& d, double fitness)
{
    const std::size_t bin = bin_index(d);
    auto it = elites_.find(bin);
    if (it != elites_.end() && !(fitness > it->second.fitness))
        return false;
    elites_[bin] = Elite{g, fitness, d};
    return true;
}

const Elite* BehaviourPerformanceMap::find(std::size_t bin) const
{
    const auto it = elites_.find(bin);
    return it == elites_.end() ? nullptr : &it->second;
}

const Elite& BehaviourPerformanceMap::at(std::size_t bin) const
{
    const Elite* e = find(bin);
    if (!e)
        throw ContractViolation("map bin " + std::to_string(bin) + " is empty");
    return *e;
}

std::vector<std::size_t> BehaviourPerformanceMap::occupied_bins() const
{
    std::vector<std::size_t> out;
    out.reserve(elites_.size());
    for (const auto& [bin, e] : elites_)
        out.push_back(bin);
    return out;
}

MapMetrics map_metrics(const BehaviourPerformanceMap& map)
{
    MapMetrics m;
    m.coverage = map.coverage();
    if (map.empty())
        return m;
    double sum = 0.0;
    m.global_performance = -std::numeric_limits<double>::infinity();
    for (const auto& [bin, e] : map.elites()) {
        m.global_performance = std::max(m.global_performance, e.fitness);
        sum += e.fitness;
    }
    m.average_performance = sum / static_cast<double>(m.coverage);
    return m;
}

void save_map(std::ostream& out, const BehaviourPerformanceMap& map)
{
    out << "swarmbo-map 1\n";
    out << "dims " << map.dims() << "\n";
    out << "grid";
    for (int b : map.bins_per_dim())
        out << ' ' << b;
    out << "\n";
    out << "descriptor " << map.descriptor_name() << "\n";
    out << "config_hash " << (map.config_hash().empty() ? "-" : map.config_hash()) << "\n";
    out << "elites " << map.coverage() << "\n";
    for (const auto& [bin, e] : map.elites()) {
        out << bin;
        for (Eigen::Index k = 0; k < e.descriptor.size(); ++k)
            out << ' ' << format_double(e.descriptor[k]);
        out << ' ' << format_double(e.fitness) << ' ' << encode(e.genotype) << "\n";
    }
}

namespace {

std::string expect_field(std::istream& in, const std::string& key)
{
    std::string line;
    if (!std::getline(in, line))
        throw ContractViolation("archive truncated before '" + key + "'");
    if (line.rfind(key + " ", 0) != 0)
        throw ContractViolation("archive: expected '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
}

} // namespace

BehaviourPerformanceMap load_map(std::istream& in)
{
    if (expect_field(in, "swarmbo-map") != "1")
        throw ContractViolation("unsupported archive version");
    const auto dims = static_cast<std::size_t>(parse_int(expect_field(in, "dims")));
    std::vector<int> grid;
    {
        std::istringstream g(expect_field(in, "grid"));
        std::string tok;
        while (g >> tok)
            grid.push_back(static_cast<int>(parse_int(tok)));
    }
    if (grid.size() != dims)
        throw ContractViolation("archive grid does not match its dimension count");
    const std::string descriptor = expect_field(in, "descriptor");
    std::string hash = expect_field(in, "config_hash");
    if (hash == "-")
        hash.clear();
    const auto n = static_cast<std::size_t>(parse_int(expect_field(in, "elites")));

    BehaviourPerformanceMap map(grid, descriptor, hash);
    std::string line;
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::getline(in, line))
            throw ContractViolation("archive truncated: expected " + std::to_string(n) + " elites");
        std::istringstream rec(line);
        std::string tok;
        rec >> tok;
        const auto bin = static_cast<std::size_t>(parse_int(tok));
        Descriptor d(static_cast<Eigen::Index>(dims));
        for (std::size_t k = 0; k < dims; ++k) {
            if (!(rec >> tok))
                throw ContractViolation("archive record truncated");
            d[static_cast<Eigen::Index>(k)] = parse_double(tok);
        }
        if (!(rec >> tok))
            throw ContractViolation("archive record truncated");
        const double fitness = parse_double(tok);
        std::string genotype;
        std::getline(rec, genotype);
        const Genotype g = decode(trim(genotype));
        if (map.bin_index(d) != bin)
            throw ContractViolation("archive record bin does not match its descriptor");
        if (!map.insert(g, d, fitness))
            throw ContractViolation("archive holds two elites for bin " + std::to_string(bin));
    }
    return map;
}

void save_map(const std::string& path, const BehaviourPerformanceMap& map)
{
    std::ofstream out(path);
    if (!out)
        throw ContractViolation("cannot write archive " + path);
    save_map(out, map);
}

BehaviourPerformanceMap load_map(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ContractViolation("cannot read archive " + path);
    return load_map(in);
}

std::string canonical_text(const EvolutionConfig& c)
{
    std::ostringstream out;
    out << "generations = " << c.generations << "\n"
        << "batch_size = " << c.batch_size << "\n"
        << "initial_population = " << c.initial_population << "\n"
        << "trials_per_evaluation = " << c.trials_per_evaluation << "\n"
        << "descriptor = " << to_string(c.descriptor) << "\n"
        << "bins_per_dim = " << c.bins_per_dim << "\n"
        << "mutation.weight = " << format_double(c.mutation.weight) << "\n"
        << "mutation.weight_sigma = " << format_double(c.mutation.weight_sigma) << "\n"
        << "mutation.add_connection = " << format_double(c.mutation.add_connection) << "\n"
        << "mutation.add_node = " << format_double(c.mutation.add_node) << "\n"
        << "mutation.remove_connection = " << format_double(c.mutation.remove_connection) << "\n"
        << "seed = " << c.seed << "\n"
        << to_config_text(c.arena);
    return out.str();
}

std::string config_hash(const EvolutionConfig& config)
{
    return hash_hex(canonical_text(config));
}

Evaluation evaluate_homogeneous(const Genotype& g, const ArenaConfig& arena, DescriptorKind kind, std::size_t trials,
                                std::uint64_t seed)
{
    const std::vector<Genotype> swarm(arena.n_robots, g);
    std::vector<TrialResult> results;
    results.reserve(trials);
    double fitness = 0.0;
    for (std::size_t k = 0; k < trials; ++k) {
        results.push_back(run_trial(swarm, arena, Disturbance{}, derive_seed(seed, {k})));
        fitness += results.back().fitness;
    }
    return {fitness / static_cast<double>(trials), compute_descriptor(kind, results)};
}

BehaviourPerformanceMap evolve(const EvolutionConfig& config, const GenerationCallback& on_generation)
{
    if (config.trials_per_evaluation == 0)
        throw ContractViolation("evolution needs at least one trial per evaluation");
    validate(config.arena);
    const int dims = descriptor_dims(config.descriptor);
    BehaviourPerformanceMap map(std::vector<int>(static_cast<std::size_t>(dims), config.bins_per_dim),
                                to_string(config.descriptor), config_hash(config));

    auto evaluate_and_insert = [&](Genotype g, std::size_t generation, std::size_t index) {
        const std::uint64_t eval_seed = derive_seed(config.seed, {stream::evaluation, generation, index});
        g.lineage = eval_seed;
        const Evaluation e =
            evaluate_homogeneous(g, config.arena, config.descriptor, config.trials_per_evaluation, eval_seed);
        map.insert(g, e.descriptor, e.fitness);
    };

    for (std::size_t i = 0; i < config.initial_population; ++i) {
        Rng rng = make_rng(config.seed, {stream::evolution, 0, i});
        evaluate_and_insert(random_genotype(rng), 0, i);
    }
    if (on_generation)
        on_generation(0, map);

    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        if (!map.empty()) {
            const auto parents = map.occupied_bins();
            Rng select = make_rng(config.seed, {stream::evolution, gen});
            std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
            std::vector<Genotype> offspring;
            offspring.reserve(config.batch_size);
            for (std::size_t i = 0; i < config.batch_size; ++i) {
                const Genotype& parent = map.at(parents[pick(select)]).genotype;
                Rng rng = make_rng(config.seed, {stream::evolution, gen, i});
                offspring.push_back(mutate(parent, config.mutation, rng));
            }
            // Evaluations are independent; insertion runs in batch order.
            for (std::size_t i = 0; i < offspring.size(); ++i)
                evaluate_and_insert(std::move(offspring[i]), gen, i);
        }
        if (on_generation)
            on_generation(gen, map);
    }
    return map;
}

} // namespace swarmbo
