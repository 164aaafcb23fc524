#pragma once

#include <cstdint>

namespace uvclt {

/// Counter-based pseudo-random stream (splitmix64). Streams are keyed by
/// (master seed, substream index), so per-path parallelism reproduces the
/// same draws regardless of worker count or scheduling.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Well-separated substream key for (master seed, index).
inline std::uint64_t substream_key(std::uint64_t master_seed, std::uint64_t index) {
    RandomStream hash_master(master_seed);
    const std::uint64_t mixed = hash_master.next_u64();
    RandomStream hash_pair(mixed ^ (index + 0x632BE59BD9B4E019ull));
    return hash_pair.next_u64();
}

}  // namespace uvclt
