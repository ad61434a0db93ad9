#ifndef SWARMBO_MAP_PRIOR_HPP
#define SWARMBO_MAP_PRIOR_HPP

#include <vector>

#include <swarmbo/gp.hpp>
#include <swarmbo/map_elites.hpp>

namespace swarmbo {

using Gp = GaussianProcess<double>;

/// Prior mean = fitness of the elite in the bin containing x.
Gp::PriorFn map_prior(const BehaviourPerformanceMap& map);

/// Constant prior mean.
Gp::PriorFn uniform_prior(double value);

/// Mean fitness over occupied bins (0 for an empty map).
double mean_fitness(const BehaviourPerformanceMap& map);

/// Occupied bin with the highest fitness; ties go to the lowest bin index.
std::size_t best_bin(const BehaviourPerformanceMap& map);

/// Largest |delta fitness| / |delta descriptor| over pairs of occupied bins
/// that are one grid step apart along a single axis, floored at `floor`.
double estimate_lipschitz(const BehaviourPerformanceMap& map, double floor = 1e-6);

} // namespace swarmbo

#endif
