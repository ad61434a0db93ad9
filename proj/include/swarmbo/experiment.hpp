#ifndef SWARMBO_EXPERIMENT_HPP
#define SWARMBO_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <swarmbo/adaptation.hpp>
#include <swarmbo/smbo_dec.hpp>

namespace swarmbo {

struct ExperimentConfig {
    EvolutionConfig evolution;
    std::string map_path;
    std::vector<Learner> learners{Learner::Smbo, Learner::SmboUniform, Learner::Random, Learner::GradientAscent};
    std::vector<DecVariant> dec_variants;
    std::vector<ScenarioCategory> categories{ScenarioCategory::Proximity, ScenarioCategory::Actuator,
                                             ScenarioCategory::FoodScarcity};
    std::size_t replicates = 5; // scenarios per category
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    AdaptationBudget budget;
    std::size_t trials_per_evaluation = 1;
    DecConfig dec;
    std::string reference_learner = "smbo";
};

/// Reads every recognised key; arena keys are handled by arena_from_config.
ExperimentConfig experiment_from_config(const KeyValueConfig& cfg);
std::string canonical_text(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

/// Replaces `path` with `content` through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// `# swarmbo config_hash=<hash> seed=<seed>`
std::string provenance_line(const std::string& hash, std::uint64_t seed);

/// Writes `map.txt` and `metrics.csv` (`generation,global,coverage,average`)
/// under `out_dir`; returns the evolved map.
BehaviourPerformanceMap cmd_evolve(const ExperimentConfig& config, const std::string& out_dir);

struct AdaptSummary {
    std::size_t files = 0;
    std::size_t rows = 0;
};

/// One trace file per (learner, scenario, seed) cell plus a fault-injection
/// baseline file per (scenario, seed); scenarios are listed in
/// `scenarios.txt`.
AdaptSummary cmd_adapt(const ExperimentConfig& config, const BehaviourPerformanceMap& map, const std::string& out_dir);

struct CompareRow {
    std::string category;
    std::string learner;
    std::vector<double> values; // final performance per (scenario, seed) cell
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    std::optional<double> p; // against the reference learner
    bool significant = false;
};

/// Final performance of every trace file under `trace_dir`: the last
/// best-so-far of each cell (swarm rows for decentralised traces, the
/// measured fitness for baseline rows).
std::vector<CompareRow> compare_traces(const std::string& trace_dir, const std::string& reference,
                                       double alpha = 0.05);
std::string compare_csv(const std::vector<CompareRow>& rows);
std::string compare_table(const std::vector<CompareRow>& rows, const std::string& reference);

} // namespace swarmbo

#endif
