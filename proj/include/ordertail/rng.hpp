#pragma once

#include <array>
#include <cstdint>

namespace ordertail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** generator. A stream is addressed by (seed, stream id, chunk)
// so every chunk of every estimator pass owns an independent, reproducible
// substream regardless of which worker executes it.
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t stream_id = 0, std::uint64_t chunk = 0) {
        std::uint64_t sm = seed;
        std::uint64_t mix = splitmix64(sm) ^ (stream_id * 0xd1b54a32d192ed03ULL);
        mix = splitmix64(mix) ^ (chunk * 0x8cb92ba72f3d8dd7ULL);
        for (auto& word : s_) word = splitmix64(mix);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by inversion.
    double normal();

    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace ordertail
