#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace windtrip {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive an independent substream seed from a master seed and a stream name.
// The same (master, name) pair always yields the same seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name) {
    return splitmix64(master ^ fnv1a64(stream_name));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index + 0x9e3779b97f4a7c15ull));
}

// Seeded Gaussian stream; one instance per consumer keeps draws reproducible
// regardless of what other parts of a run do.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : seed_(seed), rng_(seed) {}

    double next() { return dist_(rng_); }

    std::uint64_t seed_used() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace windtrip
