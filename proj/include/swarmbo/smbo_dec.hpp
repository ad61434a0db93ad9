#ifndef SWARMBO_SMBO_DEC_HPP
#define SWARMBO_SMBO_DEC_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <swarmbo/adaptation.hpp>

namespace swarmbo {

enum class DecVariant { Full, Naive, NoSharing, RandomNoSharing };
std::string to_string(DecVariant variant);
DecVariant dec_variant_from_string(const std::string& name);

/// Observation noise of a sample: the standard error of its trials, or the
/// kernel's fixed noise variance (used to compare against centralised SMBO).
enum class NoiseRule { StandardError, Fixed };

struct DecConfig {
    DecVariant variant = DecVariant::Full;
    std::size_t trials_per_controller = 2;
    std::size_t max_controllers_per_robot = 30;
    double max_sim_time = 3600.0;
    double seconds_per_trial = 100.0;
    KernelConfig<double> kernel;
    NoiseRule noise = NoiseRule::StandardError;
};

/// Standard error of a running estimate: sample variance / n, or f^2 after a
/// single trial.
double standard_error_noise(const std::vector<double>& trial_values);

struct ObservationMessage {
    std::size_t sender = 0;
    std::size_t bin = 0;
    Descriptor descriptor;
    double mean = 0.0;
    std::size_t trials = 0;
    double noise = 0.0;
    std::uint64_t timestamp = 0;
};

struct FaultGroup {
    std::size_t id = 0;
    std::string label;
    std::vector<std::size_t> members;
    std::map<std::size_t, std::size_t> busy; // robot -> bin under evaluation
    PenalisationState<double> penalisation;  // busy list refreshed at proposal time
};

struct DeliveryRecord {
    ObservationMessage message;
    std::vector<std::size_t> recipients;
};

/// Joint trial with one bin per robot; returns per-robot fitness (items
/// delivered by that robot in the trial).
using SwarmEvaluator = std::function<std::vector<double>(const std::vector<std::size_t>& bins, std::size_t round)>;

/// Joint trial with one bin per robot; returns the swarm fitness.
using ComposedEvaluator = std::function<double(const std::vector<std::size_t>& bins)>;

struct DecResult {
    std::vector<AdaptationTrace> per_robot; // empty traces for non-workers
    AdaptationTrace aggregate;              // mean per-worker best known fitness, one row per round
    std::vector<std::optional<std::size_t>> group_of;
    std::vector<std::optional<std::size_t>> best_bin; // best completed observation each robot holds
    std::vector<std::vector<std::size_t>> proposals_per_round; // bins proposed, in event order
};

/// Robots are batch-BO workers. Robots with equal labels share a model by
/// broadcasting observations; a robot whose label is empty does not adapt.
class DecentralisedOptimizer {
public:
    DecentralisedOptimizer(const BehaviourPerformanceMap& map, std::vector<std::optional<std::string>> labels,
                           DecConfig config, std::uint64_t seed);

    std::size_t n_robots() const { return labels_.size(); }
    bool is_worker(std::size_t robot) const { return group_of_[robot].has_value(); }
    const std::vector<FaultGroup>& groups() const { return groups_; }
    std::optional<std::size_t> group_of(std::size_t robot) const { return group_of_[robot]; }
    std::optional<std::size_t> current_sample(std::size_t robot) const { return workers_[robot].current; }
    const std::map<std::size_t, ObservationMessage>& known(std::size_t robot) const { return workers_[robot].known; }
    const std::vector<DeliveryRecord>& deliveries() const { return deliveries_; }

    /// Chooses the robot's next bin and marks it busy in the robot's group.
    /// Empty when no unexplored, non-busy bin remains.
    std::optional<std::size_t> propose_sample(std::size_t robot);

    /// Folds one trial result into the robot's running estimate, updates the
    /// sender's model and delivers the observation to its group. The sample
    /// leaves the busy list after the configured number of trials.
    ObservationMessage complete_trial(std::size_t robot, double fitness);

    /// Model of `robot` built from the observations it holds.
    const Gp& model(std::size_t robot);

    /// Runs the synchronous-reset schedule until the time budget is spent.
    DecResult run(const SwarmEvaluator& evaluate);

    AdaptationTrace& trace(std::size_t robot) { return workers_[robot].trace; }

    /// Bin of the best completed observation the robot holds, its own or
    /// received from its group.
    std::optional<std::size_t> best_known(std::size_t robot) const;

private:
    struct Worker {
        std::optional<std::size_t> current;
        std::vector<double> values;
        std::map<std::size_t, ObservationMessage> known;
        std::optional<Gp> model;
        bool dirty = true;
        Rng rng;
        AdaptationTrace trace;
        std::size_t completed = 0;
    };

    void merge(std::size_t robot, const ObservationMessage& msg);
    std::vector<std::size_t> candidates(std::size_t robot, bool include_busy) const;
    std::size_t fallback_bin(std::size_t robot) const;

    const BehaviourPerformanceMap& map_;
    std::vector<std::optional<std::string>> labels_;
    DecConfig config_;
    std::vector<std::optional<std::size_t>> group_of_;
    std::vector<FaultGroup> groups_;
    std::vector<Worker> workers_;
    std::vector<DeliveryRecord> deliveries_;
    std::vector<double> group_max_;
    double lipschitz_ = 1.0;
    std::uint64_t clock_ = 0;
    double sim_time_ = 0.0;
};

/// Worker labels for a scenario: the fault label of each robot, except the
/// disrupted robot which gets none.
std::vector<std::optional<std::string>> worker_labels(const Scenario& scenario);

/// Per-robot joint-trial evaluator for the scenario, seeded from
/// (run_seed, round).
SwarmEvaluator make_swarm_evaluator(const BehaviourPerformanceMap& map, const Scenario& scenario,
                                    const ArenaConfig& base_arena, std::uint64_t run_seed);

/// Swarm-fitness evaluator for a composed heterogeneous swarm, from a fresh
/// seed stream distinct from the adaptation trials.
ComposedEvaluator make_composed_evaluator(const BehaviourPerformanceMap& map, const Scenario& scenario,
                                          const ArenaConfig& base_arena, std::uint64_t run_seed);

DecResult run_smbo_dec(const BehaviourPerformanceMap& map, const Scenario& scenario, const ArenaConfig& base_arena,
                       const DecConfig& config, std::uint64_t seed);

struct ComposedSwarm {
    std::vector<std::size_t> bins;
    double fitness = 0.0;
    bool homogeneous = false;
};

/// Assigns every robot the best controller it knows of (the map's best elite
/// for robots without one) and evaluates the joint swarm once.
ComposedSwarm compose_swarm(const DecResult& result, const BehaviourPerformanceMap& map,
                            const ComposedEvaluator& evaluate);

/// Per-robot rows: the adaptation schema plus `robot_id,group_id`; swarm
/// aggregate rows use robot_id `swarm`.
std::string dec_csv_header(std::size_t dims);
void write_dec_rows(std::ostream& out, const DecResult& result, std::size_t dims);

} // namespace swarmbo

#endif
