#ifndef SWARMBO_MAP_ELITES_HPP
#define SWARMBO_MAP_ELITES_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <swarmbo/arena.hpp>
#include <swarmbo/controller.hpp>
#include <swarmbo/descriptors.hpp>

namespace swarmbo {

struct Elite {
    Genotype genotype;
    double fitness = 0.0;
    Descriptor descriptor;
};

/// Grid archive with at most one elite per bin. Bin coordinates are
/// floor(d * bins) clamped to the upper edge; the flat index is row-major
/// with the first descriptor component most significant.
class BehaviourPerformanceMap {
public:
    BehaviourPerformanceMap() = default;
    BehaviourPerformanceMap(std::vector<int> bins_per_dim, std::string descriptor_name, std::string config_hash = "");

    std::size_t dims() const { return bins_per_dim_.size(); }
    const std::vector<int>& bins_per_dim() const { return bins_per_dim_; }
    std::size_t n_bins() const;
    const std::string& descriptor_name() const { return descriptor_name_; }
    const std::string& config_hash() const { return config_hash_; }

    std::size_t bin_index(const Descriptor& d) const;
    std::vector<int> bin_coords(std::size_t bin) const;
    std::size_t flat_index(const std::vector<int>& coords) const;
    /// Non-empty bins one grid step away along a single axis.
    std::vector<std::size_t> occupied_neighbours(std::size_t bin) const;

    /// Accepts iff the bin is empty or `fitness` strictly beats the incumbent.
    bool insert(const Genotype& g, const Descriptor& d, double fitness);

    const Elite* find(std::size_t bin) const;
    const Elite& at(std::size_t bin) const;
    const std::map<std::size_t, Elite>& elites() const { return elites_; }
    std::vector<std::size_t> occupied_bins() const;
    std::size_t coverage() const { return elites_.size(); }
    bool empty() const { return elites_.empty(); }

private:
    std::vector<int> bins_per_dim_;
    std::string descriptor_name_;
    std::string config_hash_;
    std::map<std::size_t, Elite> elites_;
};

struct MapMetrics {
    double global_performance = 0.0;
    std::size_t coverage = 0;
    double average_performance = 0.0; // 0 for an empty map
};

MapMetrics map_metrics(const BehaviourPerformanceMap& map);

/// Line-delimited text archive:
///   swarmbo-map 1
///   dims <D>
///   grid <b_1> ... <b_D>
///   descriptor <name>
///   config_hash <hex>
///   elites <N>
///   <bin> <d_1> ... <d_D> <fitness> <genotype record>   (N lines, ascending bin)
void save_map(std::ostream& out, const BehaviourPerformanceMap& map);
BehaviourPerformanceMap load_map(std::istream& in);
void save_map(const std::string& path, const BehaviourPerformanceMap& map);
BehaviourPerformanceMap load_map(const std::string& path);

struct EvolutionConfig {
    std::size_t generations = 200;
    std::size_t batch_size = 32;
    std::size_t initial_population = 32;
    std::size_t trials_per_evaluation = 3;
    DescriptorKind descriptor = DescriptorKind::Hbd;
    int bins_per_dim = 10;
    ArenaConfig arena = default_arena();
    MutationRates mutation;
    std::uint64_t seed = 1;
};

std::string canonical_text(const EvolutionConfig& config);
std::string config_hash(const EvolutionConfig& config);

struct Evaluation {
    double fitness = 0.0;
    Descriptor descriptor;
};

/// Homogeneous swarm (one genotype copied to every robot), unperturbed
/// arena, `trials` trials; fitness and descriptor are trial means.
Evaluation evaluate_homogeneous(const Genotype& g, const ArenaConfig& arena, DescriptorKind kind, std::size_t trials,
                                std::uint64_t seed);

/// Called after initialisation (generation 0) and after every generation.
using GenerationCallback = std::function<void(std::size_t generation, const BehaviourPerformanceMap& map)>;

/// MAP-Elites: evaluate and insert a random initial population, then each
/// generation draw `batch_size` parents uniformly from the occupied bins,
/// mutate, evaluate and insert in batch order.
BehaviourPerformanceMap evolve(const EvolutionConfig& config, const GenerationCallback& on_generation = {});

} // namespace swarmbo

#endif
