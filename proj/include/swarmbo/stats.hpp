#ifndef SWARMBO_STATS_HPP
#define SWARMBO_STATS_HPP

#include <span>
#include <vector>

namespace swarmbo {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1); zero for fewer than two values.
double stddev(std::span<const double> v);
double median(std::span<const double> v);

struct RankSumResult {
    double w = 0.0;   // sum of the ranks of the first sample
    double p = 1.0;   // two-sided
    bool exact = false;
};

/// Two-sided Wilcoxon rank-sum test with midranks for ties. The null
/// distribution is enumerated exactly when both samples have at most
/// `exact_limit` values, otherwise a tie-corrected normal approximation is
/// used.
RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y, std::size_t exact_limit = 10);

} // namespace swarmbo

#endif
