#include <swarmbo/smbo_dec.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <tuple>

#include <swarmbo/simulator.hpp>

namespace swarmbo {

std::string to_string(DecVariant variant)
{
    switch (variant) {
    case DecVariant::Full:
        return "smbo-dec";
    case DecVariant::Naive:
        return "smbo-dec-naive";
    case DecVariant::NoSharing:
        return "smbo-no-sharing";
    case DecVariant::RandomNoSharing:
        return "random-no-sharing";
    }
    return "smbo-dec";
}

DecVariant dec_variant_from_string(const std::string& name)
{
    for (DecVariant v : {DecVariant::Full, DecVariant::Naive, DecVariant::NoSharing, DecVariant::RandomNoSharing})
        if (to_string(v) == name)
            return v;
    if (name == "full")
        return DecVariant::Full;
    if (name == "naive")
        return DecVariant::Naive;
    if (name == "no-sharing")
        return DecVariant::NoSharing;
    throw ContractViolation("unknown SMBO-Dec variant '" + name + "'");
}

double standard_error_noise(const std::vector<double>& v)
{
    if (v.empty())
        throw ContractViolation("standard error of an empty sample");
    if (v.size() == 1)
        return v[0] * v[0];
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return ss / (n - 1.0) / n;
}

DecentralisedOptimizer::DecentralisedOptimizer(const BehaviourPerformanceMap& map,
                                               std::vector<std::optional<std::string>> labels, DecConfig config,
                                               std::uint64_t seed)
    : map_(map), labels_(std::move(labels)), config_(config), group_of_(labels_.size())
{
    if (map.empty())
        throw ContractViolation("decentralised adaptation needs a non-empty map");
    if (config_.trials_per_controller == 0)
        throw ContractViolation("trials per controller must be positive");
    config_.kernel.validate();
    const bool sharing = config_.variant == DecVariant::Full || config_.variant == DecVariant::Naive;
    for (std::size_t r = 0; r < labels_.size(); ++r) {
        if (!labels_[r])
            continue;
        const std::string key = sharing ? *labels_[r] : *labels_[r] + "#" + std::to_string(r);
        auto it = std::find_if(groups_.begin(), groups_.end(), [&](const FaultGroup& g) { return g.label == key; });
        if (it == groups_.end()) {
            FaultGroup g;
            g.id = groups_.size();
            g.label = key;
            groups_.push_back(std::move(g));
            it = groups_.end() - 1;
        }
        it->members.push_back(r);
        group_of_[r] = it->id;
    }
    lipschitz_ = estimate_lipschitz(map);
    group_max_.assign(groups_.size(), map_metrics(map).global_performance);
    for (auto& g : groups_) {
        g.penalisation.lipschitz = lipschitz_;
        g.penalisation.max_value = group_max_[g.id];
    }
    workers_.resize(labels_.size());
    for (std::size_t r = 0; r < labels_.size(); ++r) {
        workers_[r].rng = make_rng(seed, {stream::learner, 100 + r});
        workers_[r].trace.learner = to_string(config_.variant);
        workers_[r].trace.seed = seed;
    }
}

std::vector<std::size_t> DecentralisedOptimizer::candidates(std::size_t robot, bool include_busy) const
{
    const auto& known = workers_[robot].known;
    const auto& busy = groups_[*group_of_[robot]].busy;
    std::vector<std::size_t> out;
    for (const auto& [bin, e] : map_.elites()) {
        if (known.count(bin))
            continue;
        if (!include_busy &&
            std::any_of(busy.begin(), busy.end(), [bin = bin](const auto& kv) { return kv.second == bin; }))
            continue;
        out.push_back(bin);
    }
    return out;
}

const Gp& DecentralisedOptimizer::model(std::size_t robot)
{
    Worker& w = workers_[robot];
    if (!w.model || w.dirty) {
        if (!w.model)
            w.model.emplace(config_.kernel, map_prior(map_));
        const Eigen::Index t = static_cast<Eigen::Index>(w.known.size());
        Gp::Matrix x(t, static_cast<Eigen::Index>(map_.dims()));
        Gp::Vector f(t), noise(t);
        Eigen::Index i = 0;
        for (const auto& [bin, msg] : w.known) {
            x.row(i) = msg.descriptor.transpose();
            f[i] = msg.mean;
            noise[i] = config_.noise == NoiseRule::Fixed ? config_.kernel.noise_var : msg.noise;
            ++i;
        }
        w.model->set_samples(x, f, noise);
        w.dirty = false;
    }
    return *w.model;
}

std::optional<std::size_t> DecentralisedOptimizer::propose_sample(std::size_t robot)
{
    if (robot >= workers_.size() || !is_worker(robot))
        throw ContractViolation("robot " + std::to_string(robot) + " is not an adapting worker");
    Worker& w = workers_[robot];
    if (w.current)
        throw ContractViolation("robot " + std::to_string(robot) + " is already evaluating a sample");
    if (w.completed >= config_.max_controllers_per_robot)
        return std::nullopt;
    FaultGroup& group = groups_[*group_of_[robot]];
    const double alpha = config_.kernel.alpha;

    std::optional<std::size_t> chosen;
    switch (config_.variant) {
    case DecVariant::RandomNoSharing: {
        const auto ids = candidates(robot, false);
        if (!ids.empty())
            chosen = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(w.rng)];
        break;
    }
    case DecVariant::Naive: {
        // Rank every unexplored bin by UCB; take the best one nobody in the
        // group is evaluating.
        const auto ids = candidates(robot, true);
        const Gp& gp = model(robot);
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t bin : ids)
            ranked.emplace_back(ucb(gp.posterior(map_.at(bin).descriptor), alpha), bin);
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.first > b.first || (a.first == b.first && a.second < b.second);
        });
        for (const auto& [score, bin] : ranked)
            if (std::none_of(group.busy.begin(), group.busy.end(), [bin = bin](const auto& kv) { return kv.second == bin; })) {
                chosen = bin;
                break;
            }
        break;
    }
    case DecVariant::Full:
    case DecVariant::NoSharing: {
        const auto ids = candidates(robot, false);
        const Gp& gp = model(robot);
        group.penalisation.lipschitz = lipschitz_;
        group.penalisation.max_value = group_max_[group.id];
        group.penalisation.busy.clear();
        for (const auto& [other, bin] : group.busy)
            group.penalisation.busy.push_back(map_.at(bin).descriptor);
        std::vector<double> scores(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const Descriptor& x = map_.at(ids[i]).descriptor;
            const auto post = gp.posterior(x);
            scores[i] = ucb(post, alpha) * local_penalty(group.penalisation, post, x);
        }
        if (const auto best = argmax_lowest_id(ids, scores))
            chosen = ids[*best];
        break;
    }
    }
    if (chosen) {
        w.current = chosen;
        w.values.clear();
        group.busy[robot] = *chosen;
    }
    return chosen;
}

void DecentralisedOptimizer::merge(std::size_t robot, const ObservationMessage& msg)
{
    Worker& w = workers_[robot];
    auto it = w.known.find(msg.bin);
    if (it == w.known.end() ||
        std::tie(msg.timestamp, msg.sender) > std::tie(it->second.timestamp, it->second.sender)) {
        w.known[msg.bin] = msg;
        w.dirty = true;
    }
}

ObservationMessage DecentralisedOptimizer::complete_trial(std::size_t robot, double fitness)
{
    if (robot >= workers_.size() || !is_worker(robot) || !workers_[robot].current)
        throw ContractViolation("robot " + std::to_string(robot) + " has no sample under evaluation");
    Worker& w = workers_[robot];
    FaultGroup& group = groups_[*group_of_[robot]];
    w.values.push_back(fitness);

    ObservationMessage msg;
    msg.sender = robot;
    msg.bin = *w.current;
    msg.descriptor = map_.at(msg.bin).descriptor;
    msg.mean = std::accumulate(w.values.begin(), w.values.end(), 0.0) / static_cast<double>(w.values.size());
    msg.trials = w.values.size();
    msg.noise = standard_error_noise(w.values);
    msg.timestamp = ++clock_;

    DeliveryRecord record{msg, {}};
    for (std::size_t member : group.members) {
        merge(member, msg);
        record.recipients.push_back(member);
    }
    deliveries_.push_back(std::move(record));
    group_max_[group.id] = std::max(group_max_[group.id], msg.mean);

    if (w.values.size() >= config_.trials_per_controller) {
        ++w.completed;
        const auto best = best_known(robot);
        w.trace.records.push_back({w.completed, sim_time_, msg.bin, msg.descriptor, msg.mean, w.known.at(*best).mean});
        group.busy.erase(robot);
        w.current.reset();
    }
    return msg;
}

std::optional<std::size_t> DecentralisedOptimizer::best_known(std::size_t robot) const
{
    std::optional<std::size_t> best;
    double best_mean = 0.0;
    for (const auto& [bin, msg] : workers_[robot].known)
        if (msg.trials >= config_.trials_per_controller && (!best || msg.mean > best_mean)) {
            best = bin;
            best_mean = msg.mean;
        }
    return best;
}

std::size_t DecentralisedOptimizer::fallback_bin(std::size_t robot) const
{
    if (const auto b = best_known(robot))
        return *b;
    return best_bin(map_);
}

DecResult DecentralisedOptimizer::run(const SwarmEvaluator& evaluate)
{
    DecResult result;
    result.group_of = group_of_;
    result.aggregate.learner = to_string(config_.variant);
    const std::size_t rounds = static_cast<std::size_t>(std::floor(config_.max_sim_time / config_.seconds_per_trial + 1e-9));

    std::vector<std::size_t> workers;
    for (std::size_t r = 0; r < n_robots(); ++r)
        if (is_worker(r))
            workers.push_back(r);

    double aggregate_best = 0.0;
    for (std::size_t round = 0; round < rounds; ++round) {
        std::vector<std::size_t> proposed;
        for (std::size_t r : workers)
            if (!workers_[r].current)
                if (const auto bin = propose_sample(r))
                    proposed.push_back(*bin);

        std::vector<std::size_t> bins(n_robots());
        for (std::size_t r = 0; r < n_robots(); ++r)
            bins[r] = workers_[r].current ? *workers_[r].current : fallback_bin(r);
        const std::vector<double> fitness = evaluate(bins, round);
        if (fitness.size() != n_robots())
            throw ContractViolation("swarm evaluator returned the wrong number of robots");
        sim_time_ = static_cast<double>(round + 1) * config_.seconds_per_trial;

        // Completion events ordered by (time, robot id). With synchronous
        // resets all trials end together and the robot id decides.
        using Event = std::pair<double, std::size_t>;
        std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
        for (std::size_t r : workers)
            if (workers_[r].current)
                events.emplace(sim_time_, r);
        while (!events.empty()) {
            const auto [time, r] = events.top();
            events.pop();
            complete_trial(r, fitness[r]);
            if (!workers_[r].current && round + 1 < rounds)
                if (const auto bin = propose_sample(r))
                    proposed.push_back(*bin);
        }
        result.proposals_per_round.push_back(std::move(proposed));

        double sum = 0.0;
        for (std::size_t r : workers)
            if (const auto b = best_known(r))
                sum += workers_[r].known.at(*b).mean;
        const double agg = workers.empty() ? 0.0 : sum / static_cast<double>(workers.size());
        aggregate_best = round == 0 ? agg : std::max(aggregate_best, agg);
        result.aggregate.records.push_back({round + 1, sim_time_, std::nullopt, Descriptor(), agg, aggregate_best});
    }
    for (std::size_t r = 0; r < n_robots(); ++r) {
        result.per_robot.push_back(workers_[r].trace);
        result.best_bin.push_back(is_worker(r) ? best_known(r) : std::nullopt);
    }
    return result;
}

std::vector<std::optional<std::string>> worker_labels(const Scenario& scenario)
{
    std::vector<std::optional<std::string>> labels;
    for (std::size_t r = 0; r < scenario.n_robots(); ++r) {
        if (scenario.disruption.active() && scenario.disruption.robot == r)
            labels.emplace_back(std::nullopt);
        else
            labels.emplace_back(to_string(scenario.robot_faults[r].kind));
    }
    return labels;
}

SwarmEvaluator make_swarm_evaluator(const BehaviourPerformanceMap& map, const Scenario& scenario,
                                    const ArenaConfig& base_arena, std::uint64_t run_seed)
{
    const ArenaConfig arena = scenario_arena(scenario, base_arena);
    const Disturbance disturbance = scenario.disturbance();
    return [&map, arena, disturbance, run_seed](const std::vector<std::size_t>& bins, std::size_t round) {
        std::vector<Genotype> swarm;
        swarm.reserve(bins.size());
        for (std::size_t b : bins)
            swarm.push_back(map.at(b).genotype);
        const TrialResult t = run_trial(swarm, arena, disturbance, derive_seed(run_seed, {stream::evaluation, round}));
        return std::vector<double>(t.delivered_by.begin(), t.delivered_by.end());
    };
}

ComposedEvaluator make_composed_evaluator(const BehaviourPerformanceMap& map, const Scenario& scenario,
                                          const ArenaConfig& base_arena, std::uint64_t run_seed)
{
    const ArenaConfig arena = scenario_arena(scenario, base_arena);
    const Disturbance disturbance = scenario.disturbance();
    return [&map, arena, disturbance, run_seed](const std::vector<std::size_t>& bins) {
        std::vector<Genotype> swarm;
        for (std::size_t b : bins)
            swarm.push_back(map.at(b).genotype);
        return run_trial(swarm, arena, disturbance, derive_seed(run_seed, {stream::compose})).fitness;
    };
}

DecResult run_smbo_dec(const BehaviourPerformanceMap& map, const Scenario& scenario, const ArenaConfig& base_arena,
                       const DecConfig& config, std::uint64_t seed)
{
    DecConfig cfg = config;
    cfg.seconds_per_trial = scenario_arena(scenario, base_arena).trial_duration;
    DecentralisedOptimizer opt(map, worker_labels(scenario), cfg, seed);
    DecResult result = opt.run(make_swarm_evaluator(map, scenario, base_arena, seed));
    const std::string fault = scenario_id(scenario);
    for (auto& t : result.per_robot)
        t.fault = fault;
    result.aggregate.fault = fault;
    result.aggregate.seed = seed;
    return result;
}

ComposedSwarm compose_swarm(const DecResult& result, const BehaviourPerformanceMap& map,
                            const ComposedEvaluator& evaluate)
{
    ComposedSwarm c;
    const std::size_t fallback = best_bin(map);
    for (const auto& b : result.best_bin)
        c.bins.push_back(b ? *b : fallback);
    c.homogeneous = std::adjacent_find(c.bins.begin(), c.bins.end(), std::not_equal_to<>()) == c.bins.end();
    c.fitness = evaluate(c.bins);
    return c;
}

std::string dec_csv_header(std::size_t dims)
{
    return trace_csv_header(dims) + ",robot_id,group_id";
}

void write_dec_rows(std::ostream& out, const DecResult& result, std::size_t dims)
{
    for (std::size_t r = 0; r < result.per_robot.size(); ++r) {
        if (!result.group_of[r])
            continue;
        for (const auto& rec : result.per_robot[r].records) {
            write_trace_row(out, result.per_robot[r], rec, dims);
            out << ',' << r << ',' << *result.group_of[r] << '\n';
        }
    }
    for (const auto& rec : result.aggregate.records) {
        write_trace_row(out, result.aggregate, rec, dims);
        out << ",swarm,-\n";
    }
}

} // namespace swarmbo
