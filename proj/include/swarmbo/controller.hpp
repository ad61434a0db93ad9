#ifndef SWARMBO_CONTROLLER_HPP
#define SWARMBO_CONTROLLER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <swarmbo/faults.hpp>
#include <swarmbo/rng.hpp>

namespace swarmbo {

enum class NodeKind : char { Input = 'i', Bias = 'b', Output = 'o', Hidden = 'h' };

struct Connection {
    std::size_t from;
    std::size_t to;
    double weight;
    bool enabled = true;

    bool operator==(const Connection&) const = default;
};

/// Directly encoded recurrent network. Node ids are positions in `nodes`:
/// 0..8 sensor inputs, 9 bias, 10 and 11 the left/right wheel outputs,
/// 12.. hidden units. Connections may form cycles and self-loops but never
/// target an input or the bias.
struct Genotype {
    static constexpr std::size_t kInputs = kSensorCount;
    static constexpr std::size_t kBias = kSensorCount;
    static constexpr std::size_t kFirstOutput = kSensorCount + 1;
    static constexpr std::size_t kOutputs = 2;
    static constexpr std::size_t kFixedNodes = kFirstOutput + kOutputs;
    static constexpr double kMaxWeight = 5.0;

    std::vector<NodeKind> nodes;
    std::vector<Connection> connections;
    std::uint64_t lineage = 0;

    std::size_t n_hidden() const { return nodes.size() - kFixedNodes; }
    bool operator==(const Genotype&) const = default;
};

/// Throws ContractViolation unless the genotype has the fixed 10-input,
/// 2-output layout, valid connection endpoints and bounded weights.
void check_invariants(const Genotype& g);

/// Inputs, bias and outputs only, with no connections.
Genotype empty_genotype();

/// Minimal topology: every input and the bias connected to both outputs,
/// weights uniform in [-1, 1].
Genotype random_genotype(Rng& rng);

/// Per-robot node activations, persisted across control cycles of a trial.
struct ControllerState {
    std::vector<double> activation;
    std::vector<double> accumulator;
};

ControllerState initial_state(const Genotype& g);

/// One synchronous propagation step: input nodes take `inputs` (bias = 1),
/// every other node becomes tanh of its weighted input computed from the
/// previous activations. Returns the two output activations in [-1, 1].
Eigen::Vector2d activate(const Genotype& g, ControllerState& state, std::span<const double, kSensorCount> inputs);

struct MutationRates {
    double weight = 0.8; // per offspring; perturbs every connection
    double weight_sigma = 0.5;
    double add_connection = 0.1;
    double add_node = 0.05;
    double remove_connection = 0.05;

    bool operator==(const MutationRates&) const = default;
};

/// Applies each operator independently with its probability. Structural
/// operators that have no valid target are skipped.
Genotype mutate(const Genotype& parent, const MutationRates& rates, Rng& rng);

/// `lineage=<u64> nodes=<kinds> conns=<from>:<to>:<weight>:<enabled>;...`
std::string encode(const Genotype& g);
Genotype decode(const std::string& text);

} // namespace swarmbo

#endif
