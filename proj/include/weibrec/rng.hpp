#pragma once

#include <cstdint>
#include <limits>

namespace weibrec {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `stream_id` under `master`:
///   mix64(master + 0x9e3779b97f4a7c15 * (stream_id + 1))
/// Distinct ids give distinct seeds for a fixed master.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) noexcept {
    return mix64(master + 0x9e3779b97f4a7c15ULL * (stream_id + 1));
}

/// SplitMix64 generator (Weyl sequence through mix64). Seeding is free, which
/// matters because every Monte Carlo replicate opens two fresh substreams.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

using Engine = SplitMix64;

/// A reproducible random substream identified by (master_seed, stream_id).
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    Engine engine() const { return Engine(derive_seed(master_seed, stream_id)); }
};

}  // namespace weibrec
