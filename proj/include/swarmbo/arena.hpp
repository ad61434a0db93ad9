#ifndef SWARMBO_ARENA_HPP
#define SWARMBO_ARENA_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <swarmbo/config.hpp>

namespace swarmbo {

struct FoodSource {
    Eigen::Vector2d center;
    double radius;

    bool contains(const Eigen::Vector2d& p) const { return (p - center).squaredNorm() <= radius * radius; }
    bool operator==(const FoodSource&) const = default;
};

/// Thymio-like differential-drive robot. The wheel track is chosen so that
/// the stated speed limits are consistent: track = 2 v_max / w_max.
struct RobotSpec {
    double body_length = 0.11;
    double body_width = 0.085;
    double max_linear_speed = 0.10;
    double wheel_track = 0.09;
    double proximity_range = 0.11;
    int n_front_proximity = 5;
    int n_rear_proximity = 2;
    int n_ground = 2;

    double max_angular_speed() const { return 2.0 * max_linear_speed / wheel_track; }
    /// Robots collide as discs circumscribing the body rectangle.
    double collision_radius() const { return 0.5 * std::hypot(body_length, body_width); }
    int n_proximity() const { return n_front_proximity + n_rear_proximity; }
    int n_sensors() const { return n_proximity() + n_ground; }

    bool operator==(const RobotSpec&) const = default;
};

/// Rectangular foraging arena. x runs along the long side, y along the short
/// side; the nest is the strip 0 <= y <= nest_width spanning the full length.
struct ArenaConfig {
    double width = 4.2;
    double height = 2.1;
    double nest_width = 0.32;
    std::vector<FoodSource> food_sources;
    double control_dt = 0.20;
    double trial_duration = 100.0;
    double wall_thickness = 0.02;
    std::size_t n_robots = 6;
    RobotSpec robot;

    std::size_t cycles() const { return static_cast<std::size_t>(std::floor(trial_duration / control_dt + 1e-9)); }
    double diagonal() const { return std::hypot(width, height); }
    bool in_nest(const Eigen::Vector2d& p) const { return p.y() <= nest_width; }

    bool operator==(const ArenaConfig&) const = default;
};

/// The reference arena: 4.2 m x 2.1 m, a 0.32 m nest strip and ten food
/// discs of radius 0.1/0.2/0.3 m in two mirrored clusters.
ArenaConfig default_arena();

/// Doubles arena extent, food layout, trial duration and swarm size; robot
/// dimensions, nest width and food radii are unchanged.
ArenaConfig doubled(const ArenaConfig& base);

/// Throws ContractViolation if a food source leaves the arena or touches the
/// nest strip, or if a dimension is non-positive.
void validate(const ArenaConfig& arena);

/// Reads arena keys (width, height, nest_width, control_dt, trial_duration,
/// wall_thickness, n_robots, robot.*, and repeated `food = x y r`) on top of
/// `base`. If any `food` line is present the food list is replaced.
ArenaConfig arena_from_config(const KeyValueConfig& cfg, ArenaConfig base = default_arena());

/// Canonical text form, loadable by arena_from_config.
std::string to_config_text(const ArenaConfig& arena);

} // namespace swarmbo

#endif
