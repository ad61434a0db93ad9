#ifndef SWARMBO_FAULTS_HPP
#define SWARMBO_FAULTS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <swarmbo/arena.hpp>
#include <swarmbo/rng.hpp>

namespace swarmbo {

enum class FaultKind {
    None,
    ProximityRandom,
    ProximityMax,
    ProximityMin,
    GroundRandom,
    GroundMax,
    GroundMin,
    ActuatorLeftHalf,
    ActuatorRightHalf,
    ActuatorBothHalf,
};

struct FaultCondition {
    FaultKind kind = FaultKind::None;
    bool operator==(const FaultCondition&) const = default;
};

std::string to_string(FaultKind kind);
FaultKind fault_kind_from_string(const std::string& name);

/// A robot that has lost its normal controller. It is placed by the scenario
/// and ignores its genotype for the whole trial.
struct Disruption {
    enum class Mode { None, NestPatrol, FoodSquat };
    Mode mode = Mode::None;
    std::size_t robot = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();

    bool active() const { return mode != Mode::None; }
    bool operator==(const Disruption&) const = default;
};

/// Per-trial disturbance handed to the simulator.
struct Disturbance {
    std::vector<FaultCondition> faults; // one per robot; empty means no faults
    Disruption disruption;

    FaultCondition fault_of(std::size_t robot) const { return robot < faults.size() ? faults[robot] : FaultCondition{}; }
};

/// Number of sensor channels: 5 front proximity, 2 rear proximity, 2 ground.
inline constexpr std::size_t kSensorCount = 9;
inline constexpr std::size_t kFrontProximity = 5;
inline constexpr std::size_t kProximity = 7;
using SensorVector = std::array<double, kSensorCount>;

/// Overrides raw (pre-scaling, [0,1]) readings. Proximity faults touch the five
/// front sensors only; ground faults touch both ground sensors. Random faults
/// draw a fresh value per sensor per call.
void apply_sensor_fault(FaultCondition condition, std::span<double, kSensorCount> raw, Rng& rng);

/// Halves the affected wheel command(s).
Eigen::Vector2d apply_actuator_fault(FaultCondition condition, const Eigen::Vector2d& wheels);

enum class ScenarioCategory {
    None,
    Proximity,
    Ground,
    Actuator,
    SoftwareNest,
    SoftwareFood,
    FoodScarcity,
    Proximity2x,
    FoodScarcity2x,
};

std::string to_string(ScenarioCategory category);
ScenarioCategory category_from_string(const std::string& name);
bool is_doubled(ScenarioCategory category);

struct Scenario {
    ScenarioCategory category = ScenarioCategory::None;
    std::vector<FaultCondition> robot_faults;
    std::optional<std::size_t> food_kept; // food-scarcity: index of the single remaining source
    Disruption disruption;
    std::uint64_t seed = 0;

    std::size_t n_robots() const { return robot_faults.size(); }
    Disturbance disturbance() const { return {robot_faults, disruption}; }
    bool operator==(const Scenario&) const = default;
};

/// Samples a scenario of `category`. `base` is the unperturbed arena; for the
/// doubled categories the swarm size is taken from doubled(base).
Scenario sample_scenario(ScenarioCategory category, const ArenaConfig& base, std::uint64_t seed);

/// The arena a scenario runs in: doubled for 2x categories, food list
/// truncated for food scarcity.
ArenaConfig scenario_arena(const Scenario& scenario, const ArenaConfig& base);

/// One-line text record, e.g.
/// `category=proximity seed=3 faults=none,proximity-max,... food=- disrupt=-`.
std::string serialize(const Scenario& scenario);
Scenario parse_scenario(const std::string& line);

/// Short identifier used in trace CSVs (`proximity:3`).
std::string scenario_id(const Scenario& scenario);

} // namespace swarmbo

#endif
