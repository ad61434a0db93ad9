#include <swarmbo/map_prior.hpp>

#include <algorithm>
#include <memory>
#include <unordered_map>

namespace swarmbo {

Gp::PriorFn map_prior(const BehaviourPerformanceMap& map)
{
    auto fitness = std::make_shared<std::unordered_map<std::size_t, double>>();
    for (const auto& [bin, e] : map.elites())
        fitness->emplace(bin, e.fitness);
    const double fallback = mean_fitness(map);
    auto grid = std::make_shared<BehaviourPerformanceMap>(map.bins_per_dim(), map.descriptor_name());
    return [fitness, grid, fallback](const Gp::Vector& x) {
        const auto it = fitness->find(grid->bin_index(x));
        return it == fitness->end() ? fallback : it->second;
    };
}

Gp::PriorFn uniform_prior(double value)
{
    return [value](const Gp::Vector&) { return value; };
}

double mean_fitness(const BehaviourPerformanceMap& map)
{
    return map_metrics(map).average_performance;
}

std::size_t best_bin(const BehaviourPerformanceMap& map)
{
    if (map.empty())
        throw ContractViolation("empty map has no best bin");
    std::size_t best = map.elites().begin()->first;
    double best_f = map.elites().begin()->second.fitness;
    for (const auto& [bin, e] : map.elites())
        if (e.fitness > best_f) {
            best = bin;
            best_f = e.fitness;
        }
    return best;
}

double estimate_lipschitz(const BehaviourPerformanceMap& map, double floor)
{
    double l = floor;
    for (const auto& [bin, e] : map.elites())
        for (std::size_t nb : map.occupied_neighbours(bin)) {
            if (nb < bin)
                continue;
            const Elite& other = map.at(nb);
            const double dist = (other.descriptor - e.descriptor).norm();
            if (dist <= 0.0)
                continue;
            l = std::max(l, std::abs(other.fitness - e.fitness) / dist);
        }
    return l;
}

} // namespace swarmbo
