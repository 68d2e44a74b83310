#pragma once

#include <cstdint>
#include <random>

namespace bayesqc {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream seed for (seed, stream). Chains, matrix cells and
// simulation states each take their own stream index so that results do not
// depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return Engine{derive_seed(seed, stream)};
}

// Beta(a, b) variate as G_a / (G_a + G_b).
inline double draw_beta(Engine& eng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    for (;;) {
        const double x = ga(eng);
        const double y = gb(eng);
        const double s = x + y;
        if (s > 0.0) return x / s;
    }
}

}  // namespace bayesqc
