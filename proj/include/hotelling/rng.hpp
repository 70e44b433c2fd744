#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hotelling {

/// Per-path random stream. The engine state depends only on (seed, stream_id), so paths can be
/// generated in any order or on any thread.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) : seed_(seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform on (0, 1], 53 random bits.
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Exponential with the given rate, by inversion.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace hotelling
