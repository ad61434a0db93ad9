#include <swarmbo/simulator.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace swarmbo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDisruptorHold = 5; // cycles between random commands
constexpr int kCollisionPasses = 4;

double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a;
}

double ray_to_walls(const Eigen::Vector2d& o, const Eigen::Vector2d& u, double width, double height)
{
    double t = kInf;
    if (u.x() > 0)
        t = std::min(t, (width - o.x()) / u.x());
    else if (u.x() < 0)
        t = std::min(t, -o.x() / u.x());
    if (u.y() > 0)
        t = std::min(t, (height - o.y()) / u.y());
    else if (u.y() < 0)
        t = std::min(t, -o.y() / u.y());
    return std::max(t, 0.0);
}

double ray_to_disc(const Eigen::Vector2d& o, const Eigen::Vector2d& u, const Eigen::Vector2d& c, double r)
{
    const Eigen::Vector2d oc = c - o;
    const double c2 = oc.squaredNorm() - r * r;
    if (c2 <= 0)
        return 0.0;
    const double b = u.dot(oc);
    if (b <= 0)
        return kInf;
    const double disc = b * b - c2;
    if (disc < 0)
        return kInf;
    return b - std::sqrt(disc);
}

double reflectance(const World& w, const Eigen::Vector2d& p)
{
    for (const auto& f : w.arena.food_sources)
        if (f.contains(p))
            return 0.0;
    if (w.arena.in_nest(p))
        return 1.0;
    return 0.5;
}

bool is_fixed(const World& w, std::size_t i)
{
    return w.disruption.mode == Disruption::Mode::FoodSquat && w.disruption.robot == i;
}

bool is_disrupted(const World& w, std::size_t i)
{
    return w.disruption.active() && w.disruption.robot == i;
}

void contain(const World& w, RobotState& r)
{
    const double rad = w.arena.robot.collision_radius();
    r.position.x() = std::clamp(r.position.x(), rad, w.arena.width - rad);
    r.position.y() = std::clamp(r.position.y(), rad, w.arena.height - rad);
    if (w.disruption.mode == Disruption::Mode::NestPatrol && w.disruption.robot == r.id) {
        const double half = 0.5 * w.arena.robot.body_length;
        r.position.y() = std::clamp(r.position.y(), std::max(rad, w.arena.nest_width - half), w.arena.nest_width + half);
    }
    if (is_fixed(w, r.id))
        r.position = w.disruption.position;
}

} // namespace

World::World(ArenaConfig a, std::vector<RobotState> r, Disruption d)
    : arena(std::move(a)), robots(std::move(r)), delivered_by(robots.size(), 0), disruption(d)
{
}

SensorVector raw_sense(const World& world, std::size_t robot)
{
    if (robot >= world.robots.size())
        throw ContractViolation("unknown robot id " + std::to_string(robot));
    const RobotState& self = world.robots[robot];
    const RobotSpec& spec = world.arena.robot;
    const double rad = spec.collision_radius();
    SensorVector raw{};
    for (std::size_t s = 0; s < kProximity; ++s) {
        const double a = self.heading + kProximityAngles[s];
        const Eigen::Vector2d u(std::cos(a), std::sin(a));
        const Eigen::Vector2d o = self.position + rad * u;
        double d = ray_to_walls(o, u, world.arena.width, world.arena.height);
        for (const auto& other : world.robots)
            if (other.id != self.id)
                d = std::min(d, ray_to_disc(o, u, other.position, rad));
        raw[s] = d < spec.proximity_range ? 1.0 - d / spec.proximity_range : 0.0;
    }
    const double c = std::cos(self.heading), sn = std::sin(self.heading);
    for (std::size_t g = 0; g < 2; ++g) {
        const double fwd = kGroundOffsets[g][0], left = kGroundOffsets[g][1];
        const Eigen::Vector2d p = self.position + Eigen::Vector2d(c * fwd - sn * left, sn * fwd + c * left);
        raw[kProximity + g] = reflectance(world, p);
    }
    return raw;
}

SensorVector scale_readings(const SensorVector& raw)
{
    SensorVector out;
    for (std::size_t i = 0; i < kSensorCount; ++i)
        out[i] = 2.0 * raw[i] - 1.0;
    return out;
}

SensorVector sense(const World& world, std::size_t robot, FaultCondition fault, Rng& rng)
{
    SensorVector raw = raw_sense(world, robot);
    apply_sensor_fault(fault, raw, rng);
    return scale_readings(raw);
}

Eigen::Vector2d clamp_wheels(const Eigen::Vector2d& wheels, const RobotSpec& spec)
{
    const double v = spec.max_linear_speed;
    return {std::clamp(wheels.x(), -v, v), std::clamp(wheels.y(), -v, v)};
}

void integrate_pose(RobotState& robot, const Eigen::Vector2d& wheels, double track, double dt)
{
    const double v = 0.5 * (wheels.x() + wheels.y());
    const double w = (wheels.y() - wheels.x()) / track;
    const double th = robot.heading;
    if (std::abs(w) < 1e-12) {
        robot.position += v * dt * Eigen::Vector2d(std::cos(th), std::sin(th));
    }
    else {
        const double th1 = th + w * dt;
        robot.position += (v / w) * Eigen::Vector2d(std::sin(th1) - std::sin(th), std::cos(th) - std::cos(th1));
        robot.heading = wrap_angle(th1);
    }
    robot.wheel_cmd = wheels;
}

void step(World& world, std::span<const Eigen::Vector2d> wheel_commands)
{
    auto& robots = world.robots;
    if (wheel_commands.size() != robots.size())
        throw ContractViolation("step needs one wheel command per robot");
    const RobotSpec& spec = world.arena.robot;
    for (std::size_t i = 0; i < robots.size(); ++i) {
        const Eigen::Vector2d cmd = is_fixed(world, i) ? Eigen::Vector2d::Zero() : clamp_wheels(wheel_commands[i], spec);
        integrate_pose(robots[i], cmd, spec.wheel_track, world.arena.control_dt);
    }

    const double min_sep = 2.0 * spec.collision_radius();
    for (int pass = 0; pass < kCollisionPasses; ++pass) {
        bool moved = false;
        for (std::size_t i = 0; i < robots.size(); ++i)
            for (std::size_t j = i + 1; j < robots.size(); ++j) {
                Eigen::Vector2d d = robots[j].position - robots[i].position;
                double dist = d.norm();
                if (dist >= min_sep)
                    continue;
                moved = true;
                // Coincident centres separate along the x axis.
                const Eigen::Vector2d n = dist > 1e-12 ? Eigen::Vector2d(d / dist) : Eigen::Vector2d(1.0, 0.0);
                const double overlap = min_sep - dist;
                const bool fi = is_fixed(world, i), fj = is_fixed(world, j);
                if (fi && fj)
                    continue;
                if (fi)
                    robots[j].position += overlap * n;
                else if (fj)
                    robots[i].position -= overlap * n;
                else {
                    robots[i].position -= 0.5 * overlap * n;
                    robots[j].position += 0.5 * overlap * n;
                }
            }
        for (auto& r : robots)
            contain(world, r);
        if (!moved)
            break;
    }

    for (std::size_t i = 0; i < robots.size(); ++i) {
        if (is_disrupted(world, i))
            continue;
        RobotState& r = robots[i];
        if (!r.carrying) {
            for (const auto& f : world.arena.food_sources)
                if (f.contains(r.position)) {
                    r.carrying = true;
                    break;
                }
        }
        else if (world.arena.in_nest(r.position)) {
            r.carrying = false;
            ++world.items_delivered;
            ++world.delivered_by[i];
        }
    }
}

std::vector<RobotState> place_robots(const ArenaConfig& arena, std::size_t n, const Disruption& disruption, Rng& rng)
{
    const double rad = arena.robot.collision_radius();
    const double sep2 = 4.0 * rad * rad;
    std::uniform_real_distribution<double> ux(rad, arena.width - rad), uy(rad, arena.height - rad),
        uh(-std::numbers::pi, std::numbers::pi);
    std::vector<RobotState> robots(n);
    std::vector<bool> placed(n, false);
    auto free_at = [&](const Eigen::Vector2d& p) {
        for (std::size_t k = 0; k < n; ++k)
            if (placed[k] && (robots[k].position - p).squaredNorm() < sep2)
                return false;
        return true;
    };
    for (std::size_t i = 0; i < n; ++i)
        robots[i].id = i;
    if (disruption.active() && disruption.robot < n) {
        RobotState& r = robots[disruption.robot];
        r.position = disruption.position;
        r.heading = uh(rng);
        placed[disruption.robot] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (placed[i])
            continue;
        RobotState& r = robots[i];
        bool ok = false;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            const Eigen::Vector2d p(ux(rng), uy(rng));
            if (free_at(p)) {
                r.position = p;
                ok = true;
            }
        }
        if (!ok) {
            // Grid fallback: first free lattice point.
            const double spacing = 2.0 * rad + 1e-6;
            for (double y = rad; y <= arena.height - rad && !ok; y += spacing)
                for (double x = rad; x <= arena.width - rad && !ok; x += spacing)
                    if (free_at({x, y})) {
                        r.position = {x, y};
                        ok = true;
                    }
            if (!ok)
                throw ContractViolation("arena too small for the swarm");
        }
        r.heading = uh(rng);
        placed[i] = true;
    }
    return robots;
}

bool TrialResult::operator==(const TrialResult& other) const
{
    if (fitness != other.fitness || items_delivered != other.items_delivered || delivered_by != other.delivered_by ||
        seed != other.seed || trace.n_robots != other.trace.n_robots || trace.n_cycles != other.trace.n_cycles ||
        trace.samples.size() != other.trace.samples.size())
        return false;
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        const auto& a = trace.samples[k];
        const auto& b = other.trace.samples[k];
        if (a.position != b.position || a.heading != b.heading || a.carrying != b.carrying || a.wheels != b.wheels ||
            a.sensors != b.sensors)
            return false;
    }
    return true;
}

TrialResult run_trial(std::span<const Genotype> controllers, const ArenaConfig& arena, const Disturbance& disturbance,
                      std::uint64_t seed)
{
    const std::size_t n = controllers.size();
    if (n == 0)
        throw ContractViolation("a trial needs at least one controller");
    if (!disturbance.faults.empty() && disturbance.faults.size() != n)
        throw ContractViolation("fault list size does not match the swarm size");
    if (disturbance.disruption.active() && disturbance.disruption.robot >= n)
        throw ContractViolation("disrupted robot index out of range");
    for (const auto& g : controllers)
        check_invariants(g);

    Rng placement = make_rng(seed, {stream::placement});
    World world(arena, place_robots(arena, n, disturbance.disruption, placement), disturbance.disruption);

    std::vector<Rng> fault_rng;
    fault_rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        fault_rng.push_back(make_rng(seed, {stream::fault, i}));
    Rng disruptor_rng = make_rng(seed, {stream::disruptor});
    std::uniform_real_distribution<double> random_wheel(-arena.robot.max_linear_speed, arena.robot.max_linear_speed);
    Eigen::Vector2d disruptor_cmd = Eigen::Vector2d::Zero();

    std::vector<ControllerState> states;
    states.reserve(n);
    for (const auto& g : controllers)
        states.push_back(initial_state(g));

    TrialResult result;
    result.seed = seed;
    Trace& trace = result.trace;
    trace.frame = {arena.width,
                   arena.height,
                   arena.nest_width,
                   arena.control_dt,
                   arena.robot.max_linear_speed,
                   arena.robot.max_angular_speed(),
                   arena.robot.wheel_track};
    trace.n_robots = n;
    trace.n_cycles = arena.cycles();
    trace.samples.resize(trace.n_cycles * n);

    std::vector<SensorVector> readings(n);
    std::vector<Eigen::Vector2d> commands(n);
    for (std::size_t cycle = 0; cycle < trace.n_cycles; ++cycle) {
        for (std::size_t i = 0; i < n; ++i)
            readings[i] = sense(world, i, disturbance.fault_of(i), fault_rng[i]);
        for (std::size_t i = 0; i < n; ++i) {
            if (disturbance.disruption.active() && disturbance.disruption.robot == i) {
                if (disturbance.disruption.mode == Disruption::Mode::NestPatrol) {
                    if (cycle % kDisruptorHold == 0)
                        disruptor_cmd = {random_wheel(disruptor_rng), random_wheel(disruptor_rng)};
                    commands[i] = disruptor_cmd;
                }
                else {
                    commands[i] = Eigen::Vector2d::Zero();
                }
                continue;
            }
            const Eigen::Vector2d out = activate(controllers[i], states[i], readings[i]);
            const Eigen::Vector2d wheels = clamp_wheels(arena.robot.max_linear_speed * out, arena.robot);
            commands[i] = apply_actuator_fault(disturbance.fault_of(i), wheels);
        }
        step(world, commands);
        for (std::size_t i = 0; i < n; ++i) {
            const RobotState& r = world.robots[i];
            trace.at(cycle, i) = {r.position, r.heading, r.carrying, r.wheel_cmd, readings[i]};
        }
    }
    result.items_delivered = world.items_delivered;
    result.delivered_by = world.delivered_by;
    result.fitness = static_cast<double>(world.items_delivered) / static_cast<double>(n);
    return result;
}

void write_trace(std::ostream& out, const Trace& trace)
{
    out << "cycle,robot_id,x,y,heading,carrying\n";
    for (std::size_t c = 0; c < trace.n_cycles; ++c)
        for (std::size_t i = 0; i < trace.n_robots; ++i) {
            const auto& s = trace.at(c, i);
            out << c << ',' << i << ',' << format_double(s.position.x()) << ',' << format_double(s.position.y()) << ','
                << format_double(s.heading) << ',' << (s.carrying ? 1 : 0) << '\n';
        }
}

} // namespace swarmbo
