#ifndef SWARMBO_ADAPTATION_HPP
#define SWARMBO_ADAPTATION_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <swarmbo/faults.hpp>
#include <swarmbo/map_elites.hpp>
#include <swarmbo/map_prior.hpp>

namespace swarmbo {

struct AdaptationBudget {
    std::size_t max_evaluations = 30;
    double max_sim_time = 3600.0;
    std::size_t trials_per_evaluation = 1;
};

struct TraceRecord {
    std::size_t eval = 0;
    double sim_time = 0.0;
    std::optional<std::size_t> bin; // empty for swarm-aggregate rows
    Descriptor descriptor;
    double fitness = 0.0;
    double best_so_far = 0.0;
};

struct AdaptationTrace {
    std::string learner;
    std::string fault;
    std::uint64_t seed = 0;
    std::vector<TraceRecord> records;
    bool exhausted = false; // map ran out of unexplored bins before the budget

    double final_best() const { return records.empty() ? 0.0 : records.back().best_so_far; }
    std::optional<std::size_t> best_bin() const;
};

/// Deploys one map bin's controller and returns the measured fitness. All
/// learners in a comparison share one harness so that equal (scenario, seed,
/// bin) always yields equal fitness.
struct EvaluationHarness {
    std::function<double(std::size_t bin)> evaluate;
    double seconds_per_evaluation = 0.0;
};

/// Homogeneous swarm running the bin's genotype under `scenario`, averaged
/// over `trials` trials seeded from (run_seed, bin, trial).
EvaluationHarness make_harness(const BehaviourPerformanceMap& map, const Scenario& scenario,
                               const ArenaConfig& base_arena, std::uint64_t run_seed, std::size_t trials);

/// Fitness of the map's best elite under the harness: the performance at the
/// time of fault injection.
double fitness_at_injection(const BehaviourPerformanceMap& map, const EvaluationHarness& harness);

AdaptationTrace run_smbo(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                         const AdaptationBudget& budget, const KernelConfig<double>& kernel);

/// SMBO with the prior mean fixed to the map's mean fitness.
AdaptationTrace run_smbo_uniform(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                 const AdaptationBudget& budget, const KernelConfig<double>& kernel);

/// SMBO with an arbitrary prior mean; the two above are thin wrappers.
AdaptationTrace run_smbo_with_prior(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                    const AdaptationBudget& budget, const KernelConfig<double>& kernel,
                                    Gp::PriorFn prior, std::string learner);

AdaptationTrace run_random_search(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                  const AdaptationBudget& budget, Rng& rng);

/// Grid hill-climb: starts at the best-prior bin, repeatedly tries the
/// best-prior unexplored occupied axis-neighbour of the current bin and moves
/// there if the measured fitness improves; restarts at a random unexplored
/// bin when the neighbourhood is used up.
AdaptationTrace run_gradient_ascent(const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                                    const AdaptationBudget& budget, Rng& rng);

enum class Learner { Smbo, SmboUniform, Random, GradientAscent };
std::string to_string(Learner learner);
Learner learner_from_string(const std::string& name);

AdaptationTrace run_learner(Learner learner, const BehaviourPerformanceMap& map, const EvaluationHarness& harness,
                            const AdaptationBudget& budget, const KernelConfig<double>& kernel, std::uint64_t seed);

/// `eval,sim_time_s,bin_index,d0..d{D-1},fitness,best_so_far,learner,fault,seed`
std::string trace_csv_header(std::size_t dims);
/// One row without the trailing newline.
void write_trace_row(std::ostream& out, const AdaptationTrace& trace, const TraceRecord& record, std::size_t dims);
void write_trace_rows(std::ostream& out, const AdaptationTrace& trace, std::size_t dims);

} // namespace swarmbo

#endif
