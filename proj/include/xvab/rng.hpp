#pragma once

#include <cstdint>
#include <random>

namespace xvab {

/// SplitMix64 finaliser, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for substream `stream` of a run seeded with `base`. Path i always
/// gets the same substream regardless of how many paths are simulated.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Per-stream normal generator: mt19937_64 seeded from stream_seed().
class NormalStream {
public:
    NormalStream(std::uint64_t base, std::uint64_t stream) : engine_(stream_seed(base, stream)) {}
    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace xvab
