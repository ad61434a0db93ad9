#include <swarmbo/controller.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swarmbo {

void check_invariants(const Genotype& g)
{
    if (g.nodes.size() < Genotype::kFixedNodes)
        throw ContractViolation("genotype has too few nodes");
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        NodeKind expected = NodeKind::Hidden;
        if (i < Genotype::kInputs)
            expected = NodeKind::Input;
        else if (i == Genotype::kBias)
            expected = NodeKind::Bias;
        else if (i < Genotype::kFixedNodes)
            expected = NodeKind::Output;
        if (g.nodes[i] != expected)
            throw ContractViolation("genotype node " + std::to_string(i) + " has the wrong kind");
    }
    for (const auto& c : g.connections) {
        if (c.from >= g.nodes.size() || c.to >= g.nodes.size())
            throw ContractViolation("connection endpoint out of range");
        if (c.to < Genotype::kFirstOutput)
            throw ContractViolation("connection targets an input or the bias");
        if (!(std::abs(c.weight) <= Genotype::kMaxWeight))
            throw ContractViolation("connection weight out of bounds");
    }
}

Genotype empty_genotype()
{
    Genotype g;
    g.nodes.assign(Genotype::kInputs, NodeKind::Input);
    g.nodes.push_back(NodeKind::Bias);
    g.nodes.push_back(NodeKind::Output);
    g.nodes.push_back(NodeKind::Output);
    return g;
}

Genotype random_genotype(Rng& rng)
{
    std::uniform_real_distribution<double> weight(-1.0, 1.0);
    Genotype g = empty_genotype();
    for (std::size_t from = 0; from <= Genotype::kBias; ++from)
        for (std::size_t k = 0; k < Genotype::kOutputs; ++k)
            g.connections.push_back({from, Genotype::kFirstOutput + k, weight(rng), true});
    return g;
}

ControllerState initial_state(const Genotype& g)
{
    return {std::vector<double>(g.nodes.size(), 0.0), std::vector<double>(g.nodes.size(), 0.0)};
}

Eigen::Vector2d activate(const Genotype& g, ControllerState& state, std::span<const double, kSensorCount> inputs)
{
    auto& act = state.activation;
    auto& acc = state.accumulator;
    if (act.size() != g.nodes.size()) {
        act.assign(g.nodes.size(), 0.0);
        acc.assign(g.nodes.size(), 0.0);
    }
    std::copy(inputs.begin(), inputs.end(), act.begin());
    act[Genotype::kBias] = 1.0;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& c : g.connections)
        if (c.enabled)
            acc[c.to] += c.weight * act[c.from];
    for (std::size_t i = Genotype::kFirstOutput; i < act.size(); ++i)
        act[i] = std::tanh(acc[i]);
    return {act[Genotype::kFirstOutput], act[Genotype::kFirstOutput + 1]};
}

namespace {

bool chance(double p, Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::size_t pick(std::size_t n, Rng& rng)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

void add_connection(Genotype& g, Rng& rng)
{
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t from = 0; from < g.nodes.size(); ++from)
        for (std::size_t to = Genotype::kFirstOutput; to < g.nodes.size(); ++to) {
            const bool taken = std::any_of(g.connections.begin(), g.connections.end(),
                                           [&](const Connection& c) { return c.from == from && c.to == to; });
            if (!taken)
                free.emplace_back(from, to);
        }
    if (free.empty())
        return;
    const auto [from, to] = free[pick(free.size(), rng)];
    g.connections.push_back({from, to, std::uniform_real_distribution<double>(-1.0, 1.0)(rng), true});
}

void add_node(Genotype& g, Rng& rng)
{
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < g.connections.size(); ++i)
        if (g.connections[i].enabled)
            enabled.push_back(i);
    if (enabled.empty())
        return;
    Connection& split = g.connections[enabled[pick(enabled.size(), rng)]];
    split.enabled = false;
    const std::size_t hidden = g.nodes.size();
    g.nodes.push_back(NodeKind::Hidden);
    const Connection old = split;
    g.connections.push_back({old.from, hidden, 1.0, true});
    g.connections.push_back({hidden, old.to, old.weight, true});
}

} // namespace

Genotype mutate(const Genotype& parent, const MutationRates& rates, Rng& rng)
{
    Genotype g = parent;
    if (chance(rates.weight, rng)) {
        std::normal_distribution<double> noise(0.0, rates.weight_sigma);
        for (auto& c : g.connections)
            c.weight = std::clamp(c.weight + noise(rng), -Genotype::kMaxWeight, Genotype::kMaxWeight);
    }
    if (chance(rates.add_connection, rng))
        add_connection(g, rng);
    if (chance(rates.add_node, rng))
        add_node(g, rng);
    if (chance(rates.remove_connection, rng) && !g.connections.empty())
        g.connections.erase(g.connections.begin() + static_cast<std::ptrdiff_t>(pick(g.connections.size(), rng)));
    return g;
}

std::string encode(const Genotype& g)
{
    std::string out = "lineage=" + std::to_string(g.lineage) + " nodes=";
    for (auto k : g.nodes)
        out += static_cast<char>(k);
    out += " conns=";
    for (std::size_t i = 0; i < g.connections.size(); ++i) {
        const auto& c = g.connections[i];
        if (i)
            out += ';';
        out += std::to_string(c.from) + ':' + std::to_string(c.to) + ':' + format_double(c.weight) + ':' +
               (c.enabled ? '1' : '0');
    }
    return out;
}

Genotype decode(const std::string& text)
{
    std::istringstream in(text);
    std::string lineage, nodes, conns;
    if (!(in >> lineage >> nodes) || lineage.rfind("lineage=", 0) != 0 || nodes.rfind("nodes=", 0) != 0)
        throw ContractViolation("malformed genotype record");
    if (!(in >> conns))
        conns = "";
    if (conns.rfind("conns=", 0) != 0)
        throw ContractViolation("malformed genotype record: missing conns");
    std::string rest;
    if (in >> rest)
        throw ContractViolation("trailing data in genotype record");

    Genotype g;
    g.lineage = std::stoull(lineage.substr(8));
    for (char c : nodes.substr(6)) {
        if (c != 'i' && c != 'b' && c != 'o' && c != 'h')
            throw ContractViolation(std::string("unknown node kind '") + c + "'");
        g.nodes.push_back(static_cast<NodeKind>(c));
    }
    const std::string body = conns.substr(6);
    if (!body.empty()) {
        for (const auto& rec : split(body, ';')) {
            const auto f = split(rec, ':');
            if (f.size() != 4 || (f[3] != "0" && f[3] != "1"))
                throw ContractViolation("malformed connection '" + rec + "'");
            g.connections.push_back({static_cast<std::size_t>(parse_int(f[0])), static_cast<std::size_t>(parse_int(f[1])),
                                     parse_double(f[2]), f[3] == "1"});
        }
    }
    check_invariants(g);
    return g;
}

} // namespace swarmbo
