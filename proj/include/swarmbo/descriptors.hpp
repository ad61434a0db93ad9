#ifndef SWARMBO_DESCRIPTORS_HPP
#define SWARMBO_DESCRIPTORS_HPP

#include <span>
#include <string>

#include <Eigen/Core>

#include <swarmbo/simulator.hpp>

namespace swarmbo {

/// Point in the closed unit cube summarising a swarm trial.
using Descriptor = Eigen::VectorXd;

enum class DescriptorKind { Hbd, Sdbc, SdbcWithStd };

std::string to_string(DescriptorKind kind);
DescriptorKind descriptor_kind_from_string(const std::string& name);
int descriptor_dims(DescriptorKind kind);

inline constexpr int kHbdRows = 7;    // cells across the short side
inline constexpr int kHbdColumns = 14; // cells along the long side

/// Grid statistics of the arena, averaged over traces:
///  0: fraction of the 7x14 cells visited by any robot,
///  1: mean fraction of robots in the nest-side half,
///  2: mean linear speed / max speed.
Descriptor hbd_compute(std::span<const TrialResult> trials);

/// Relations between entities (robots, walls), averaged over traces:
///  0: mean pairwise robot distance / arena diagonal,
///  1: mean robot-to-nearest-wall distance / half the short side,
///  2: mean linear speed / max speed.
/// With `with_std`, three more components hold the per-cycle standard
/// deviations of the same features divided by 0.5.
Descriptor sdbc_compute(std::span<const TrialResult> trials, bool with_std = false);

Descriptor compute_descriptor(DescriptorKind kind, std::span<const TrialResult> trials);

} // namespace swarmbo

#endif
