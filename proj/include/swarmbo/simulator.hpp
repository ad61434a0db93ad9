#ifndef SWARMBO_SIMULATOR_HPP
#define SWARMBO_SIMULATOR_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <swarmbo/arena.hpp>
#include <swarmbo/controller.hpp>
#include <swarmbo/faults.hpp>
#include <swarmbo/rng.hpp>

namespace swarmbo {

struct RobotState {
    std::size_t id = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double heading = 0.0;
    bool carrying = false;
    Eigen::Vector2d wheel_cmd = Eigen::Vector2d::Zero(); // (left, right) m/s
};

struct World {
    ArenaConfig arena;
    std::vector<RobotState> robots;
    std::size_t items_delivered = 0;
    std::vector<std::size_t> delivered_by;
    Disruption disruption;

    World() = default;
    World(ArenaConfig a, std::vector<RobotState> r, Disruption d = {});
};

/// Angles of the seven proximity rays relative to the heading: five front
/// sensors fanned over +-0.7 rad, two rear sensors pointing backwards.
inline constexpr double kProximityAngles[kProximity] = {-0.70, -0.35, 0.0, 0.35, 0.70, 3.14159265358979323846 - 0.25,
                                                        -3.14159265358979323846 + 0.25};
/// Ground sample points, in the robot frame (forward, left).
inline constexpr double kGroundOffsets[2][2] = {{0.05, 0.012}, {0.05, -0.012}};

/// Raw readings in [0,1]: proximity = 1 - d/range (0 when nothing is within
/// range), ground = reflectance (food 0, floor 0.5, nest 1).
SensorVector raw_sense(const World& world, std::size_t robot);

/// Scales raw readings to [-1,1].
SensorVector scale_readings(const SensorVector& raw);

/// Raw readings, then the robot's fault, then scaling.
SensorVector sense(const World& world, std::size_t robot, FaultCondition fault, Rng& rng);

/// Clamps each wheel command to the robot's speed limit.
Eigen::Vector2d clamp_wheels(const Eigen::Vector2d& wheels, const RobotSpec& spec);

/// Exact differential-drive pose update over `dt` for constant wheel speeds.
void integrate_pose(RobotState& robot, const Eigen::Vector2d& wheels, double track, double dt);

/// Advances the world by one control cycle: kinematics, collision
/// resolution, wall containment, then food pickup and nest delivery.
void step(World& world, std::span<const Eigen::Vector2d> wheel_commands);

/// Pose and sensor record of one robot after one control cycle.
struct RobotSample {
    Eigen::Vector2d position;
    double heading;
    bool carrying;
    Eigen::Vector2d wheels; // applied commands (post clamp and actuator fault)
    SensorVector sensors;   // scaled readings fed to the controller
};

struct TraceFrame {
    double width = 0;
    double height = 0;
    double nest_width = 0;
    double control_dt = 0;
    double max_linear_speed = 0;
    double max_angular_speed = 0;
    double wheel_track = 0;
};

/// Cycle-major record of a trial: `at(cycle, robot)`.
struct Trace {
    TraceFrame frame;
    std::size_t n_robots = 0;
    std::size_t n_cycles = 0;
    std::vector<RobotSample> samples;

    const RobotSample& at(std::size_t cycle, std::size_t robot) const { return samples[cycle * n_robots + robot]; }
    RobotSample& at(std::size_t cycle, std::size_t robot) { return samples[cycle * n_robots + robot]; }
};

struct TrialResult {
    double fitness = 0.0; // items delivered per robot
    std::size_t items_delivered = 0;
    std::vector<std::size_t> delivered_by;
    std::uint64_t seed = 0;
    Trace trace;

    bool operator==(const TrialResult& other) const;
};

/// Runs one trial: places the robots, then each cycle senses, activates the
/// controllers, clamps and faults the wheel commands, and steps the world.
/// Pure function of its arguments.
TrialResult run_trial(std::span<const Genotype> controllers, const ArenaConfig& arena, const Disturbance& disturbance,
                      std::uint64_t seed);

/// Non-overlapping random initial poses; a disrupted robot is placed at the
/// disruption's position first.
std::vector<RobotState> place_robots(const ArenaConfig& arena, std::size_t n, const Disruption& disruption, Rng& rng);

/// `cycle,robot_id,x,y,heading,carrying` lines.
void write_trace(std::ostream& out, const Trace& trace);

} // namespace swarmbo

#endif
