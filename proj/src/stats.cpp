#include <swarmbo/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <swarmbo/config.hpp>

namespace swarmbo {

double mean(std::span<const double> v)
{
    if (v.empty())
        throw ContractViolation("mean of an empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::span<const double> v)
{
    if (v.empty())
        throw ContractViolation("median of an empty sample");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

namespace {

/// Doubled midranks (integers) of the pooled sample.
std::vector<std::int64_t> doubled_midranks(const std::vector<double>& pooled)
{
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<std::int64_t> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]])
            ++j;
        // ranks i+1 .. j+1 share (i + j + 2) / 2
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = static_cast<std::int64_t>(i + j + 2);
        i = j + 1;
    }
    return ranks;
}

} // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y, std::size_t exact_limit)
{
    if (x.empty() || y.empty())
        throw ContractViolation("rank-sum test needs two non-empty samples");
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::size_t nx = x.size(), ny = y.size(), n = pooled.size();
    const auto ranks = doubled_midranks(pooled);
    std::int64_t w2 = 0;
    for (std::size_t i = 0; i < nx; ++i)
        w2 += ranks[i];

    RankSumResult result;
    result.w = static_cast<double>(w2) / 2.0;

    if (nx <= exact_limit && ny <= exact_limit) {
        // count[k][s]: number of k-subsets of the pooled ranks with doubled sum s
        const std::int64_t total = std::accumulate(ranks.begin(), ranks.end(), std::int64_t{0});
        std::vector<std::vector<double>> count(nx + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
        count[0][0] = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = std::min(i + 1, nx); k >= 1; --k)
                for (std::int64_t s = total; s >= ranks[i]; --s)
                    count[k][static_cast<std::size_t>(s)] += count[k - 1][static_cast<std::size_t>(s - ranks[i])];
        double le = 0.0, ge = 0.0, all = 0.0;
        for (std::int64_t s = 0; s <= total; ++s) {
            const double c = count[nx][static_cast<std::size_t>(s)];
            all += c;
            if (s <= w2)
                le += c;
            if (s >= w2)
                ge += c;
        }
        result.p = std::min(1.0, 2.0 * std::min(le, ge) / all);
        result.exact = true;
        return result;
    }

    const double dx = static_cast<double>(nx), dy = static_cast<double>(ny), dn = static_cast<double>(n);
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    const double var = dx * dy / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
    if (var <= 0.0)
        return result;
    const double z = (result.w - dx * (dn + 1.0) / 2.0) / std::sqrt(var);
    result.p = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
    return result;
}

} // namespace swarmbo
