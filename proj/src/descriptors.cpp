#include <swarmbo/descriptors.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace swarmbo {

namespace {

void require_traces(std::span<const TrialResult> trials)
{
    if (trials.empty())
        throw ContractViolation("descriptor needs at least one trace");
    for (const auto& t : trials)
        if (t.trace.n_cycles == 0 || t.trace.n_robots == 0)
            throw ContractViolation("descriptor needs a non-empty trace");
}

double linear_speed(const RobotSample& s)
{
    return std::abs(0.5 * (s.wheels.x() + s.wheels.y()));
}

Descriptor clamp_unit(Descriptor d)
{
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d[i] = std::clamp(d[i], 0.0, 1.0);
    return d;
}

} // namespace

std::string to_string(DescriptorKind kind)
{
    switch (kind) {
    case DescriptorKind::Hbd:
        return "hbd";
    case DescriptorKind::Sdbc:
        return "sdbc";
    case DescriptorKind::SdbcWithStd:
        return "sdbc-std";
    }
    return "hbd";
}

DescriptorKind descriptor_kind_from_string(const std::string& name)
{
    if (name == "hbd")
        return DescriptorKind::Hbd;
    if (name == "sdbc")
        return DescriptorKind::Sdbc;
    if (name == "sdbc-std")
        return DescriptorKind::SdbcWithStd;
    throw ContractViolation("unknown descriptor '" + name + "'");
}

int descriptor_dims(DescriptorKind kind)
{
    return kind == DescriptorKind::SdbcWithStd ? 6 : 3;
}

Descriptor hbd_compute(std::span<const TrialResult> trials)
{
    require_traces(trials);
    Descriptor sum = Descriptor::Zero(3);
    for (const auto& t : trials) {
        const Trace& tr = t.trace;
        const double cw = tr.frame.width / kHbdColumns, ch = tr.frame.height / kHbdRows;
        std::vector<bool> visited(kHbdRows * kHbdColumns, false);
        double nest_half = 0.0, speed = 0.0;
        for (std::size_t c = 0; c < tr.n_cycles; ++c) {
            std::size_t in_half = 0;
            for (std::size_t i = 0; i < tr.n_robots; ++i) {
                const auto& s = tr.at(c, i);
                const int col = std::clamp(static_cast<int>(std::floor(s.position.x() / cw)), 0, kHbdColumns - 1);
                const int row = std::clamp(static_cast<int>(std::floor(s.position.y() / ch)), 0, kHbdRows - 1);
                visited[row * kHbdColumns + col] = true;
                if (s.position.y() < 0.5 * tr.frame.height)
                    ++in_half;
                speed += linear_speed(s);
            }
            nest_half += static_cast<double>(in_half) / static_cast<double>(tr.n_robots);
        }
        const double cycles = static_cast<double>(tr.n_cycles);
        sum[0] += static_cast<double>(std::count(visited.begin(), visited.end(), true)) / (kHbdRows * kHbdColumns);
        sum[1] += nest_half / cycles;
        sum[2] += speed / (cycles * static_cast<double>(tr.n_robots) * tr.frame.max_linear_speed);
    }
    return clamp_unit(sum / static_cast<double>(trials.size()));
}

Descriptor sdbc_compute(std::span<const TrialResult> trials, bool with_std)
{
    require_traces(trials);
    Descriptor sum = Descriptor::Zero(with_std ? 6 : 3);
    for (const auto& t : trials) {
        const Trace& tr = t.trace;
        if (tr.n_robots < 2)
            throw ContractViolation("SDBC needs at least two robots");
        const double diag = std::hypot(tr.frame.width, tr.frame.height);
        const double wall_norm = 0.5 * std::min(tr.frame.width, tr.frame.height);
        const double pairs = 0.5 * static_cast<double>(tr.n_robots * (tr.n_robots - 1));
        Eigen::Vector3d mean = Eigen::Vector3d::Zero(), sq = Eigen::Vector3d::Zero();
        for (std::size_t c = 0; c < tr.n_cycles; ++c) {
            double pair_dist = 0.0, wall = 0.0, speed = 0.0;
            for (std::size_t i = 0; i < tr.n_robots; ++i) {
                const auto& p = tr.at(c, i).position;
                for (std::size_t j = i + 1; j < tr.n_robots; ++j)
                    pair_dist += (tr.at(c, j).position - p).norm();
                wall += std::min({p.x(), tr.frame.width - p.x(), p.y(), tr.frame.height - p.y()});
                speed += linear_speed(tr.at(c, i));
            }
            const double n = static_cast<double>(tr.n_robots);
            const Eigen::Vector3d f(pair_dist / pairs / diag, wall / n / wall_norm, speed / n / tr.frame.max_linear_speed);
            mean += f;
            sq += f.cwiseProduct(f);
        }
        const double cycles = static_cast<double>(tr.n_cycles);
        mean /= cycles;
        sum.head<3>() += mean;
        if (with_std) {
            const Eigen::Vector3d var = (sq / cycles - mean.cwiseProduct(mean)).cwiseMax(0.0);
            sum.tail<3>() += var.cwiseSqrt() / 0.5;
        }
    }
    return clamp_unit(sum / static_cast<double>(trials.size()));
}

Descriptor compute_descriptor(DescriptorKind kind, std::span<const TrialResult> trials)
{
    switch (kind) {
    case DescriptorKind::Hbd:
        return hbd_compute(trials);
    case DescriptorKind::Sdbc:
        return sdbc_compute(trials, false);
    case DescriptorKind::SdbcWithStd:
        return sdbc_compute(trials, true);
    }
    return hbd_compute(trials);
}

} // namespace swarmbo
