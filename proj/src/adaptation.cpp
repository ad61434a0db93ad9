#include <swarmbo/adaptation.hpp>

#include <algorithm>
#include <ostream>
#include <set>

#include <swarmbo/simulator.hpp>

namespace swarmbo {

std::optional<std::size_t> AdaptationTrace::best_bin() const
{
    std::optional<std::size_t> bin;
    double best = 0.0;
    for (const auto& r : records)
        if (r.bin && (!bin || r.fitness > best)) {
            bin = r.bin;
            best = r.fitness;
        }
    return bin;
}

EvaluationHarness make_harness(const BehaviourPerformanceMap& map, const Scenario& scenario,
                               const ArenaConfig& base_arena, std::uint64_t run_seed, std::size_t trials)
{
    if (trials == 0)
        throw ContractViolation("an evaluation needs at least one trial");
    const ArenaConfig arena = scenario_arena(scenario, base_arena);
    if (scenario.n_robots() != arena.n_robots)
        throw ContractViolation("scenario swarm size does not match the arena");
    const Disturbance disturbance = scenario.disturbance();
    EvaluationHarness h;
    h.seconds_per_evaluation = static_cast<double>(trials) * arena.trial_duration;
    h.evaluate = [&map, arena, disturbance, run_seed, trials](std::size_t bin) {
        const std::vector<Genotype> swarm(arena.n_robots, map.at(bin).genotype);
        double sum = 0.0;
        for (std::size_t k = 0; k < trials; ++k)
            sum += run_trial(swarm, arena, disturbance, derive_seed(run_seed, {stream::evaluation, bin, k})).fitness;
        return sum / static_cast<double>(trials);
    };
    return h;
}

double fitness_at_injection(const BehaviourPerformanceMap& map, const EvaluationHarness& harness)
{
    return harness.evaluate(best_bin(map));
}

namespace {

/// Budget accounting and trace bookkeeping shared by every learner.
class Session {
public:
    Session(const BehaviourPerformanceMap& map, const EvaluationHarness& harness, const AdaptationBudget& budget,
            std::string learner)
        : map_(map), harness_(harness), budget_(budget)
    {
        if (map.empty())
            throw ContractViolation("adaptation needs a non-empty map");
        trace_.learner = std::move(learner);
        unexplored_ = map.occupied_bins();
    }

    bool can_evaluate() const
    {
        return trace_.records.size() < budget_.max_evaluations &&
               sim_time_ + harness_.seconds_per_evaluation <= budget_.max_sim_time + 1e-9;
    }

    bool exhausted()
    {
        if (unexplored_.empty()) {
            trace_.exhausted = true;
            return true;
        }
        return false;
    }

    double evaluate(std::size_t bin)
    {
        const auto it = std::lower_bound(unexplored_.begin(), unexplored_.end(), bin);
        if (it == unexplored_.end() || *it != bin)
            throw ContractViolation("learner re-evaluated bin " + std::to_string(bin));
        unexplored_.erase(it);
        const double f = harness_.evaluate(bin);
        sim_time_ += harness_.seconds_per_evaluation;
        best_ = trace_.records.empty() ? f : std::max(best_, f);
        trace_.records.push_back({trace_.records.size() + 1, sim_time_, bin, map_.at(bin).descriptor, f, best_});
        return f;
    }

    bool explored(std::size_t bin) const { return !std::binary_search(unexplored_.begin(), unexplored_.end(), bin); }
    const std::vector<std::size_t>& unexplored() const { return unexplored_; }
    AdaptationTrace finish() { return std::move(trace_); }

private:
    const BehaviourPerformanceMap& map_;
    const EvaluationHarness& harness_;
    AdaptationBudget budget_;
    AdaptationTrace trace_;
    std::vector<std::size_t> unexplored_;
    double sim_time_ = 0.0;
    double best_ = 0.0;
};

} // namespace

AdaptationTrace run_smbo_with_prior(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                    const AdaptationBudget& budget, const KernelConfig<double>& kernel,
                                    Gp::PriorFn prior, std::string learner)
{
    Session session(map, harness, budget, std::move(learner));
    Gp gp(kernel, std::move(prior));
    while (session.can_evaluate() && !session.exhausted()) {
        const auto& ids = session.unexplored();
        std::vector<double> scores(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i)
            scores[i] = ucb(gp.posterior(map.at(ids[i]).descriptor), kernel.alpha);
        const std::size_t bin = ids[*argmax_lowest_id(ids, scores)];
        const double f = session.evaluate(bin);
        gp.add_sample(map.at(bin).descriptor, f);
    }
    return session.finish();
}

AdaptationTrace run_smbo(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                         const AdaptationBudget& budget, const KernelConfig<double>& kernel)
{
    return run_smbo_with_prior(map, harness, budget, kernel, map_prior(map), "smbo");
}

AdaptationTrace run_smbo_uniform(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                 const AdaptationBudget& budget, const KernelConfig<double>& kernel)
{
    return run_smbo_with_prior(map, harness, budget, kernel, uniform_prior(mean_fitness(map)), "smbo-uniform");
}

AdaptationTrace run_random_search(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                  const AdaptationBudget& budget, Rng& rng)
{
    Session session(map, harness, budget, "random");
    while (session.can_evaluate() && !session.exhausted()) {
        const auto& ids = session.unexplored();
        session.evaluate(ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)]);
    }
    return session.finish();
}

AdaptationTrace run_gradient_ascent(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                    const AdaptationBudget& budget, Rng& rng)
{
    Session session(map, harness, budget, "gradient-ascent");
    if (!session.can_evaluate())
        return session.finish();
    std::size_t current = best_bin(map);
    double current_f = session.evaluate(current);
    while (session.can_evaluate() && !session.exhausted()) {
        std::optional<std::size_t> next;
        for (std::size_t nb : map.occupied_neighbours(current))
            if (!session.explored(nb) && (!next || map.at(nb).fitness > map.at(*next).fitness))
                next = nb;
        if (!next) {
            const auto& ids = session.unexplored();
            current = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
            current_f = session.evaluate(current);
            continue;
        }
        const double f = session.evaluate(*next);
        if (f > current_f) {
            current = *next;
            current_f = f;
        }
    }
    return session.finish();
}

std::string to_string(Learner learner)
{
    switch (learner) {
    case Learner::Smbo:
        return "smbo";
    case Learner::SmboUniform:
        return "smbo-uniform";
    case Learner::Random:
        return "random";
    case Learner::GradientAscent:
        return "gradient-ascent";
    }
    return "smbo";
}

Learner learner_from_string(const std::string& name)
{
    for (Learner l : {Learner::Smbo, Learner::SmboUniform, Learner::Random, Learner::GradientAscent})
        if (to_string(l) == name)
            return l;
    throw ContractViolation("unknown learner '" + name + "'");
}

AdaptationTrace run_learner(Learner learner, const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                            const AdaptationBudget& budget, const KernelConfig<double>& kernel, std::uint64_t seed)
{
    Rng rng = make_rng(seed, {stream::learner, static_cast<std::uint64_t>(learner)});
    AdaptationTrace trace;
    switch (learner) {
    case Learner::Smbo:
        trace = run_smbo(map, harness, budget, kernel);
        break;
    case Learner::SmboUniform:
        trace = run_smbo_uniform(map, harness, budget, kernel);
        break;
    case Learner::Random:
        trace = run_random_search(map, harness, budget, rng);
        break;
    case Learner::GradientAscent:
        trace = run_gradient_ascent(map, harness, budget, rng);
        break;
    }
    trace.seed = seed;
    return trace;
}

std::string trace_csv_header(std::size_t dims)
{
    std::string h = "eval,sim_time_s,bin_index";
    for (std::size_t k = 0; k < dims; ++k)
        h += ",d" + std::to_string(k);
    return h + ",fitness,best_so_far,learner,fault,seed";
}

void write_trace_row(std::ostream& out, const AdaptationTrace& trace, const TraceRecord& r, std::size_t dims)
{
    out << r.eval << ',' << format_double(r.sim_time) << ',';
    if (r.bin)
        out << *r.bin;
    else
        out << '-';
    for (std::size_t k = 0; k < dims; ++k) {
        out << ',';
        if (static_cast<std::size_t>(r.descriptor.size()) == dims)
            out << format_double(r.descriptor[static_cast<Eigen::Index>(k)]);
    }
    out << ',' << format_double(r.fitness) << ',' << format_double(r.best_so_far) << ',' << trace.learner << ','
        << trace.fault << ',' << trace.seed;
}

void write_trace_rows(std::ostream& out, const AdaptationTrace& trace, std::size_t dims)
{
    for (const auto& r : trace.records) {
        write_trace_row(out, trace, r, dims);
        out << '\n';
    }
}

} // namespace swarmbo
