#ifndef SWARMBO_TEST_SUPPORT_HPP
#define SWARMBO_TEST_SUPPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <swarmbo/map_elites.hpp>
#include <swarmbo/simulator.hpp>

namespace swarmbo::test {

/// 1-D map with one elite per bin; bin i sits at descriptor (i + 0.5) / n.
inline BehaviourPerformanceMap line_map(const std::vector<double>& fitness)
{
    const int n = static_cast<int>(fitness.size());
    BehaviourPerformanceMap map({n}, "test");
    for (int i = 0; i < n; ++i) {
        Genotype g = empty_genotype();
        g.lineage = static_cast<std::uint64_t>(i);
        map.insert(g, Descriptor::Constant(1, (i + 0.5) / n), fitness[static_cast<std::size_t>(i)]);
    }
    return map;
}

/// Synthetic trial with every sample zeroed; callers fill in positions.
inline TrialResult blank_trial(const ArenaConfig& arena, std::size_t robots, std::size_t cycles)
{
    TrialResult t;
    t.trace.frame = {arena.width,
                     arena.height,
                     arena.nest_width,
                     arena.control_dt,
                     arena.robot.max_linear_speed,
                     arena.robot.max_angular_speed(),
                     arena.robot.wheel_track};
    t.trace.n_robots = robots;
    t.trace.n_cycles = cycles;
    RobotSample zero{Eigen::Vector2d::Zero(), 0.0, false, Eigen::Vector2d::Zero(), SensorVector{}};
    t.trace.samples.assign(robots * cycles, zero);
    t.delivered_by.assign(robots, 0);
    return t;
}

inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("swarmbo_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline ArenaConfig short_arena(double seconds = 10.0)
{
    ArenaConfig a = default_arena();
    a.trial_duration = seconds;
    return a;
}

} // namespace swarmbo::test

#endif
