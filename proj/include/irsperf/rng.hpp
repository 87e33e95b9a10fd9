#pragma once

#include <cstdint>

namespace irsperf {

// Identifies an independent random stream.  Identical (seed, stream_id)
// always reproduces the same draw sequence.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

// Self-contained xoshiro256++ generator.  Substreams are keyed by
// (seed, stream_id, substream), so trial substreams can be created
// independently by worker threads and still match a serial run.
class Rng {
public:
    explicit Rng(const RngStream& stream, std::uint64_t substream = 0) {
        std::uint64_t x = stream.seed;
        x ^= 0xD2B74407B1CE6E93ULL * (stream.stream_id + 1);
        detail::splitmix64(x);
        x ^= 0xCA5A826395121157ULL * (substream + 1);
        detail::splitmix64(x);
        for (int i = 0; i < 4; ++i) s_[i] = detail::splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on (0,1), never exactly 0 or 1
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal, Box-Muller with one cached value
    double normal();

    // gamma(shape, scale), Marsaglia-Tsang squeeze; shape > 0
    double gamma(double shape, double scale);

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace irsperf
