#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace specmarket {

/// Independent random sources of a run. Each gets its own engine so that
/// switching one source off (e.g. prob_news = 0) leaves the others intact.
enum class Stream : std::uint64_t {
    dividends = 1,
    news = 2,
    weight_I = 3,
    weight_II = 4,
    shock_I = 5,
    shock_II = 6,
    traders = 7,
    garch = 8,
    pareto = 9,
    kesten = 10,
    uniform = 11,
};

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for one named substream of a master seed.
inline Engine make_engine(std::uint64_t seed, Stream stream) {
    return Engine{splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)))};
}

/// Seed of path `index` within an experiment. Depends only on
/// (master, index), so records do not depend on evaluation order.
constexpr std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master + splitmix64(index + 1));
}

/// Uniform draw on [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform draw on (0, 1].
inline double uniform_open0(Engine& eng) {
    return 1.0 - uniform01(eng);
}

/// Exponential draw with the given mean; mean 0 is the point mass at 0.
inline double exponential_mean(Engine& eng, double mean) {
    if (mean <= 0.0) {
        return 0.0;
    }
    return -mean * std::log(uniform_open0(eng));
}

/// Standard normal via Box-Muller (cosine branch only, no cached state),
/// so draws are identical across standard library implementations.
inline double standard_normal(Engine& eng) {
    const double u1 = uniform_open0(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double normal(Engine& eng, double mean, double sd) {
    return mean + sd * standard_normal(eng);
}

} // namespace specmarket
