#pragma once

// SplitMix64: a small, portable 64-bit generator with cheap splitting.
// Substreams are derived by hashing (seed, stream id), so per-EV streams
// stay stable when the fleet grows. Distribution helpers are hand-rolled
// because std distributions are not bit-reproducible across standard
// library implementations.

#include <cstdint>

namespace gridsched {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi] inclusive.
    int next_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    bool next_bool(double p_true) { return next_double() < p_true; }

    /// Independent substream; stable under changes to how much the parent
    /// stream was consumed.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream_id) {
        SplitMix64 mixer(seed ^ (0x6a09e667f3bcc909ULL + stream_id * 0x9e3779b97f4a7c15ULL));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

}  // namespace gridsched
