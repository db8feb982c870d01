#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace nfsim {

// 64-bit FNV-1a hash. Used to derive named substreams and config hashes;
// stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t fnv1a64(const void* data, std::size_t bytes);

// Deterministic random stream. All randomness in the project flows through
// this wrapper so that a run is a pure function of (master seed, stream name).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    // Substream derivation: seed' = seed XOR fnv1a64(name). Streams with
    // distinct names are independent for practical purposes.
    RandomStream(std::uint64_t master_seed, std::string_view substream);

    std::uint64_t next_u64();

    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double gaussian();                      // standard normal (Box-Muller)
    int uniform_int(int lo, int hi);        // inclusive bounds

    std::vector<double> gaussian_vector(std::size_t n);

    // k distinct indices drawn uniformly from [0, n), partial Fisher-Yates.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace nfsim
