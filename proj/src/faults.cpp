#include <swarmbo/faults.hpp>

#include <sstream>

namespace swarmbo {

namespace {

struct KindName {
    FaultKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {FaultKind::None, "none"},
    {FaultKind::ProximityRandom, "proximity-random"},
    {FaultKind::ProximityMax, "proximity-max"},
    {FaultKind::ProximityMin, "proximity-min"},
    {FaultKind::GroundRandom, "ground-random"},
    {FaultKind::GroundMax, "ground-max"},
    {FaultKind::GroundMin, "ground-min"},
    {FaultKind::ActuatorLeftHalf, "actuator-left-half"},
    {FaultKind::ActuatorRightHalf, "actuator-right-half"},
    {FaultKind::ActuatorBothHalf, "actuator-both-half"},
};

struct CategoryName {
    ScenarioCategory category;
    const char* name;
};

constexpr CategoryName kCategoryNames[] = {
    {ScenarioCategory::None, "none"},
    {ScenarioCategory::Proximity, "proximity"},
    {ScenarioCategory::Ground, "ground"},
    {ScenarioCategory::Actuator, "actuator"},
    {ScenarioCategory::SoftwareNest, "software-nest"},
    {ScenarioCategory::SoftwareFood, "software-food"},
    {ScenarioCategory::FoodScarcity, "food-scarcity"},
    {ScenarioCategory::Proximity2x, "proximity-2x"},
    {ScenarioCategory::FoodScarcity2x, "food-scarcity-2x"},
};

std::size_t uniform_index(std::size_t n, Rng& rng)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

} // namespace

std::string to_string(FaultKind kind)
{
    for (const auto& k : kKindNames)
        if (k.kind == kind)
            return k.name;
    return "none";
}

FaultKind fault_kind_from_string(const std::string& name)
{
    for (const auto& k : kKindNames)
        if (name == k.name)
            return k.kind;
    throw ContractViolation("unknown fault kind '" + name + "'");
}

std::string to_string(ScenarioCategory category)
{
    for (const auto& c : kCategoryNames)
        if (c.category == category)
            return c.name;
    return "none";
}

ScenarioCategory category_from_string(const std::string& name)
{
    for (const auto& c : kCategoryNames)
        if (name == c.name)
            return c.category;
    throw ContractViolation("unknown scenario category '" + name + "'");
}

bool is_doubled(ScenarioCategory category)
{
    return category == ScenarioCategory::Proximity2x || category == ScenarioCategory::FoodScarcity2x;
}

void apply_sensor_fault(FaultCondition condition, std::span<double, kSensorCount> raw, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (condition.kind) {
    case FaultKind::ProximityRandom:
        for (std::size_t i = 0; i < kFrontProximity; ++i)
            raw[i] = unit(rng);
        break;
    case FaultKind::ProximityMax:
        for (std::size_t i = 0; i < kFrontProximity; ++i)
            raw[i] = 1.0;
        break;
    case FaultKind::ProximityMin:
        for (std::size_t i = 0; i < kFrontProximity; ++i)
            raw[i] = 0.0;
        break;
    case FaultKind::GroundRandom:
        for (std::size_t i = kProximity; i < kSensorCount; ++i)
            raw[i] = unit(rng);
        break;
    case FaultKind::GroundMax:
        for (std::size_t i = kProximity; i < kSensorCount; ++i)
            raw[i] = 1.0;
        break;
    case FaultKind::GroundMin:
        for (std::size_t i = kProximity; i < kSensorCount; ++i)
            raw[i] = 0.0;
        break;
    default:
        break;
    }
}

Eigen::Vector2d apply_actuator_fault(FaultCondition condition, const Eigen::Vector2d& wheels)
{
    switch (condition.kind) {
    case FaultKind::ActuatorLeftHalf:
        return {0.5 * wheels.x(), wheels.y()};
    case FaultKind::ActuatorRightHalf:
        return {wheels.x(), 0.5 * wheels.y()};
    case FaultKind::ActuatorBothHalf:
        return 0.5 * wheels;
    default:
        return wheels;
    }
}

Scenario sample_scenario(ScenarioCategory category, const ArenaConfig& base, std::uint64_t seed)
{
    Rng rng = make_rng(seed, {stream::scenario, static_cast<std::uint64_t>(category)});
    Scenario s;
    s.category = category;
    s.seed = seed;
    const ArenaConfig arena = is_doubled(category) ? doubled(base) : base;
    s.robot_faults.assign(arena.n_robots, FaultCondition{});

    auto draw_faults = [&](FaultKind a, FaultKind b, FaultKind c) {
        const FaultKind options[4] = {a, b, c, FaultKind::None};
        for (auto& f : s.robot_faults)
            f.kind = options[uniform_index(4, rng)];
    };

    switch (category) {
    case ScenarioCategory::None:
        break;
    case ScenarioCategory::Proximity:
    case ScenarioCategory::Proximity2x:
        draw_faults(FaultKind::ProximityRandom, FaultKind::ProximityMax, FaultKind::ProximityMin);
        break;
    case ScenarioCategory::Ground:
        draw_faults(FaultKind::GroundRandom, FaultKind::GroundMax, FaultKind::GroundMin);
        break;
    case ScenarioCategory::Actuator:
        draw_faults(FaultKind::ActuatorLeftHalf, FaultKind::ActuatorRightHalf, FaultKind::ActuatorBothHalf);
        break;
    case ScenarioCategory::SoftwareNest: {
        const double r = arena.robot.collision_radius();
        s.disruption.mode = Disruption::Mode::NestPatrol;
        s.disruption.robot = uniform_index(arena.n_robots, rng);
        const double x = std::uniform_real_distribution<double>(r, arena.width - r)(rng);
        s.disruption.position = Eigen::Vector2d(x, arena.nest_width);
        break;
    }
    case ScenarioCategory::SoftwareFood: {
        s.disruption.mode = Disruption::Mode::FoodSquat;
        s.disruption.robot = uniform_index(arena.n_robots, rng);
        const std::size_t food = uniform_index(arena.food_sources.size(), rng);
        s.disruption.position = arena.food_sources[food].center;
        break;
    }
    case ScenarioCategory::FoodScarcity:
    case ScenarioCategory::FoodScarcity2x:
        s.food_kept = uniform_index(arena.food_sources.size(), rng);
        break;
    }
    return s;
}

ArenaConfig scenario_arena(const Scenario& scenario, const ArenaConfig& base)
{
    ArenaConfig arena = is_doubled(scenario.category) ? doubled(base) : base;
    if (scenario.food_kept) {
        if (*scenario.food_kept >= arena.food_sources.size())
            throw ContractViolation("scenario keeps a food source the arena does not have");
        arena.food_sources = {arena.food_sources[*scenario.food_kept]};
    }
    return arena;
}

std::string serialize(const Scenario& s)
{
    std::ostringstream out;
    out << "category=" << to_string(s.category) << " seed=" << s.seed << " faults=";
    for (std::size_t i = 0; i < s.robot_faults.size(); ++i)
        out << (i ? "," : "") << to_string(s.robot_faults[i].kind);
    out << " food=";
    if (s.food_kept)
        out << *s.food_kept;
    else
        out << "-";
    out << " disrupt=";
    switch (s.disruption.mode) {
    case Disruption::Mode::None:
        out << "-";
        break;
    case Disruption::Mode::NestPatrol:
    case Disruption::Mode::FoodSquat:
        out << (s.disruption.mode == Disruption::Mode::NestPatrol ? "nest:" : "food:") << s.disruption.robot << ":"
            << format_double(s.disruption.position.x()) << ":" << format_double(s.disruption.position.y());
        break;
    }
    return out.str();
}

Scenario parse_scenario(const std::string& line)
{
    Scenario s;
    std::istringstream in(line);
    std::string token;
    bool seen[5] = {};
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ContractViolation("malformed scenario token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "category") {
            s.category = category_from_string(value);
            seen[0] = true;
        }
        else if (key == "seed") {
            s.seed = static_cast<std::uint64_t>(parse_int(value));
            seen[1] = true;
        }
        else if (key == "faults") {
            s.robot_faults.clear();
            if (!value.empty())
                for (const auto& name : split(value, ','))
                    s.robot_faults.push_back({fault_kind_from_string(name)});
            seen[2] = true;
        }
        else if (key == "food") {
            if (value != "-")
                s.food_kept = static_cast<std::size_t>(parse_int(value));
            seen[3] = true;
        }
        else if (key == "disrupt") {
            if (value != "-") {
                const auto parts = split(value, ':');
                if (parts.size() != 4 || (parts[0] != "nest" && parts[0] != "food"))
                    throw ContractViolation("malformed disruption '" + value + "'");
                s.disruption.mode = parts[0] == "nest" ? Disruption::Mode::NestPatrol : Disruption::Mode::FoodSquat;
                s.disruption.robot = static_cast<std::size_t>(parse_int(parts[1]));
                s.disruption.position = Eigen::Vector2d(parse_double(parts[2]), parse_double(parts[3]));
            }
            seen[4] = true;
        }
        else {
            throw ContractViolation("unknown scenario field '" + key + "'");
        }
    }
    for (bool b : seen)
        if (!b)
            throw ContractViolation("scenario record is missing a field: " + line);
    if (s.disruption.active() && s.disruption.robot >= s.robot_faults.size())
        throw ContractViolation("disrupted robot index out of range");
    return s;
}

std::string scenario_id(const Scenario& s)
{
    return to_string(s.category) + ":" + std::to_string(s.seed);
}

} // namespace swarmbo
