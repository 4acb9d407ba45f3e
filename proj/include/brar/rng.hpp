#pragma once

#include <cstdint>

// xoshiro256++ with splitmix64 seeding. Chosen over <random> engines so that
// streams are bit-reproducible across standard libraries, which the output
// determinism contract relies on. Replication streams are derived by hashing
// (master seed, replication index, retry index).

namespace brar {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
 public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

 private:
    std::uint64_t state_[4];
};

// Stream key for replication `rep` (retry `retry`) of an experiment with the
// given master seed. Distinct inputs map to well-separated xoshiro seeds.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t rep,
                                   std::uint64_t retry = 0) {
    std::uint64_t s = master;
    std::uint64_t h = detail::splitmix64_next(s);
    s = h ^ (rep * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
    h = detail::splitmix64_next(s);
    s = h ^ (retry * 0xbf58476d1ce4e5b9ULL + 0x1ce4e5b9ULL);
    return detail::splitmix64_next(s);
}

}  // namespace brar
