#pragma once

#include <cstdint>
#include <random>

namespace bee {

/// SplitMix64 finalizer. Used to derive independent stream keys and as a
/// counter-based generator for per-round draws.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine_keys(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// Maps the top 53 bits of a word onto [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Named substreams hanging off a master seed.
enum class Stream : std::uint64_t {
    TaskLabels = 1,
    ExpertOpinions = 2,
    TieBreak = 3,
    Policy = 4,
    Profile = 5,
    OracleMonteCarlo = 6,
};

/// Master seed plus replication index. Every random source in a run is
/// derived from this pair, so two runs with equal seeds are bit-identical.
struct WorldSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t replication = 0;

    [[nodiscard]] std::uint64_t key(Stream s) const noexcept {
        return combine_keys(combine_keys(master_seed, replication),
                            static_cast<std::uint64_t>(s));
    }
    [[nodiscard]] std::uint64_t key(Stream s, std::uint64_t sub) const noexcept {
        return combine_keys(key(s), sub);
    }
};

/// Stateless draw number `counter` of stream `key`.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t counter) noexcept {
    return to_unit(mix64(key ^ mix64(counter)));
}

/// Sequential generator for streams consumed in program order (tie-break
/// coins, posterior draws).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : engine_(key) {}

    double uniform() { return to_unit(engine_()); }

    int coin() { return (engine_() >> 63) != 0 ? 1 : -1; }

    std::mt19937_64& engine() noexcept { return engine_; }

    /// Shared gamma sampler; callers pass the shape per draw. Keeping one
    /// instance lets it reuse its cached normal variate.
    std::gamma_distribution<double>& gamma() noexcept { return gamma_; }

private:
    std::mt19937_64 engine_;
    std::gamma_distribution<double> gamma_;
};

}  // namespace bee
