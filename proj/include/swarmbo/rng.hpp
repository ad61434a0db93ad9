#ifndef SWARMBO_RNG_HPP
#define SWARMBO_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace swarmbo {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Mixes a base seed with a list of stream identifiers. Every stochastic
/// component of a run draws from its own derived stream, so adding a
/// component never perturbs the others.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> streams)
{
    std::uint64_t h = splitmix64(base);
    for (auto s : streams)
        h = splitmix64(h ^ splitmix64(s + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> streams)
{
    return Rng(derive_seed(base, streams));
}

// Stream tags, kept stable because they feed archived seeds.
namespace stream {
constexpr std::uint64_t placement = 1;
constexpr std::uint64_t fault = 2;
constexpr std::uint64_t disruptor = 3;
constexpr std::uint64_t evolution = 4;
constexpr std::uint64_t evaluation = 5;
constexpr std::uint64_t scenario = 6;
constexpr std::uint64_t learner = 7;
constexpr std::uint64_t compose = 8;
} // namespace stream

} // namespace swarmbo

#endif
