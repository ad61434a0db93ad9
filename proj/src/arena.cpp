#include <swarmbo/arena.hpp>

#include <sstream>

namespace swarmbo {

ArenaConfig default_arena()
{
    ArenaConfig arena;
    // Two mirrored clusters of five discs; (x, y, radius) in metres.
    const double layout[10][3] = {
        {1.2, 0.8, 0.1}, {0.5, 0.8, 0.1}, {1.0, 1.3, 0.2}, {0.5, 1.5, 0.2}, {1.7, 1.6, 0.3},
        {3.3, 0.8, 0.1}, {2.6, 0.8, 0.1}, {3.1, 1.3, 0.2}, {2.6, 1.5, 0.2}, {3.8, 1.6, 0.3},
    };
    for (const auto& f : layout)
        arena.food_sources.push_back({Eigen::Vector2d(f[0], f[1]), f[2]});
    return arena;
}

ArenaConfig doubled(const ArenaConfig& base)
{
    ArenaConfig arena = base;
    arena.width *= 2.0;
    arena.height *= 2.0;
    arena.trial_duration *= 2.0;
    arena.n_robots *= 2;
    for (auto& f : arena.food_sources)
        f.center *= 2.0;
    return arena;
}

void validate(const ArenaConfig& arena)
{
    if (arena.width <= 0 || arena.height <= 0 || arena.control_dt <= 0 || arena.trial_duration <= 0)
        throw ContractViolation("arena dimensions and timings must be positive");
    if (arena.nest_width <= 0 || arena.nest_width >= arena.height)
        throw ContractViolation("nest width must lie inside the arena");
    if (arena.n_robots == 0)
        throw ContractViolation("arena needs at least one robot");
    if (arena.robot.wheel_track <= 0 || arena.robot.max_linear_speed <= 0 || arena.robot.proximity_range <= 0)
        throw ContractViolation("robot dimensions must be positive");
    if (arena.robot.n_front_proximity != 5 || arena.robot.n_rear_proximity != 2 || arena.robot.n_ground != 2)
        throw ContractViolation("controllers expect 5 front, 2 rear proximity and 2 ground sensors");
    for (const auto& f : arena.food_sources) {
        const auto& c = f.center;
        if (f.radius <= 0 || c.x() - f.radius < 0 || c.x() + f.radius > arena.width || c.y() + f.radius > arena.height)
            throw ContractViolation("food source outside the arena");
        if (c.y() - f.radius <= arena.nest_width)
            throw ContractViolation("food source overlaps the nest strip");
    }
}

ArenaConfig arena_from_config(const KeyValueConfig& cfg, ArenaConfig base)
{
    ArenaConfig a = std::move(base);
    a.width = cfg.get_double("width", a.width);
    a.height = cfg.get_double("height", a.height);
    a.nest_width = cfg.get_double("nest_width", a.nest_width);
    a.control_dt = cfg.get_double("control_dt", a.control_dt);
    a.trial_duration = cfg.get_double("trial_duration", a.trial_duration);
    a.wall_thickness = cfg.get_double("wall_thickness", a.wall_thickness);
    a.n_robots = static_cast<std::size_t>(cfg.get_int("n_robots", static_cast<std::int64_t>(a.n_robots)));
    auto& r = a.robot;
    r.body_length = cfg.get_double("robot.body_length", r.body_length);
    r.body_width = cfg.get_double("robot.body_width", r.body_width);
    r.max_linear_speed = cfg.get_double("robot.max_linear_speed", r.max_linear_speed);
    r.wheel_track = cfg.get_double("robot.wheel_track", r.wheel_track);
    r.proximity_range = cfg.get_double("robot.proximity_range", r.proximity_range);
    if (cfg.has("food")) {
        a.food_sources.clear();
        for (const auto& line : cfg.all("food")) {
            std::istringstream in(line);
            std::string xs, ys, rs, extra;
            if (!(in >> xs >> ys >> rs) || (in >> extra))
                throw ContractViolation("food entry must be 'x y radius', got '" + line + "'");
            a.food_sources.push_back({Eigen::Vector2d(parse_double(xs), parse_double(ys)), parse_double(rs)});
        }
    }
    validate(a);
    return a;
}

std::string to_config_text(const ArenaConfig& a)
{
    std::ostringstream out;
    out << "width = " << format_double(a.width) << "\n"
        << "height = " << format_double(a.height) << "\n"
        << "nest_width = " << format_double(a.nest_width) << "\n"
        << "control_dt = " << format_double(a.control_dt) << "\n"
        << "trial_duration = " << format_double(a.trial_duration) << "\n"
        << "wall_thickness = " << format_double(a.wall_thickness) << "\n"
        << "n_robots = " << a.n_robots << "\n"
        << "robot.body_length = " << format_double(a.robot.body_length) << "\n"
        << "robot.body_width = " << format_double(a.robot.body_width) << "\n"
        << "robot.max_linear_speed = " << format_double(a.robot.max_linear_speed) << "\n"
        << "robot.wheel_track = " << format_double(a.robot.wheel_track) << "\n"
        << "robot.proximity_range = " << format_double(a.robot.proximity_range) << "\n";
    for (const auto& f : a.food_sources)
        out << "food = " << format_double(f.center.x()) << " " << format_double(f.center.y()) << " "
            << format_double(f.radius) << "\n";
    return out.str();
}

} // namespace swarmbo
